// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rmaisac/swarm.hpp"

#include "rmaisac/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace rmaisac {

const char* to_string(Mode mode) { return mode == Mode::sensing ? "sensing" : "comm"; }

bool ParticleLayout::is_rotation(int i) const {
  return (i >= tx_rotation() && i < tx_rotation() + 3) || (i >= rx_rotation() && i < rx_rotation() + 3);
}

RVec encode(const ArrayState& state) {
  const ParticleLayout lay{static_cast<int>(state.tx_placements.size()),
                           static_cast<int>(state.rx_placements.size())};
  RVec x(lay.size());
  for (int n = 0; n < lay.n_tx; ++n) {
    x(lay.tx_position(n)) = state.tx_placements[n].y;
    x(lay.tx_position(n) + 1) = state.tx_placements[n].z;
  }
  x.segment<3>(lay.tx_rotation()) << state.tx_rotation.alpha, state.tx_rotation.beta, state.tx_rotation.gamma;
  for (int n = 0; n < lay.n_rx; ++n) {
    x(lay.rx_position(n)) = state.rx_placements[n].y;
    x(lay.rx_position(n) + 1) = state.rx_placements[n].z;
  }
  x.segment<3>(lay.rx_rotation()) << state.rx_rotation.alpha, state.rx_rotation.beta, state.rx_rotation.gamma;
  return x;
}

ArrayState decode(const RVec& x, const ArrayState& like) {
  const ParticleLayout lay{static_cast<int>(like.tx_placements.size()), static_cast<int>(like.rx_placements.size())};
  if (x.size() != lay.size()) throw ContractViolation("decode: coordinate count does not match the array");
  ArrayState s = like;
  for (int n = 0; n < lay.n_tx; ++n) s.tx_placements[n] = {x(lay.tx_position(n)), x(lay.tx_position(n) + 1)};
  for (int n = 0; n < lay.n_rx; ++n) s.rx_placements[n] = {x(lay.rx_position(n)), x(lay.rx_position(n) + 1)};
  s.tx_rotation = {x(lay.tx_rotation()), x(lay.tx_rotation() + 1), x(lay.tx_rotation() + 2)};
  s.rx_rotation = {x(lay.rx_rotation()), x(lay.rx_rotation() + 1), x(lay.rx_rotation() + 2)};
  return s;
}

void PsoConfig::validate() const {
  if (swarm_size < 1) throw ContractViolation("pso: swarm size must be >= 1");
  if (max_iterations < 0) throw ContractViolation("pso: max iterations must be >= 0");
  if (omega_min > omega_max) throw ContractViolation("pso: omega_min must not exceed omega_max");
  if (!(mu0 > 0.0 && mu1 > 0.0 && mu2 > 0.0 && mu3 > 0.0)) throw ContractViolation("pso: penalties must be > 0");
  if (rotation_bits && *rotation_bits < 1) throw ContractViolation("pso: rotation bits must be >= 1");
}

namespace {

struct Evaluated {
  ChannelSet channels;
  double trace_crb = std::numeric_limits<double>::infinity();
  RVec sinr;
};

// Shared geometry part of both fitness functions. Returns false for
// degenerate geometry.
bool evaluate_geometry(const ArrayState& state, const FitnessContext& ctx, FitnessBreakdown& out, Evaluated& ev,
                       bool need_crb) {
  out.spacing_pairs = static_cast<int>(spacing_violations(state, ctx.geometry.min_spacing).size());
  out.reflection_elements = static_cast<int>(reflection_violations(state).size());
  try {
    ev.channels = build_channels(state, ctx.users, ctx.target, ctx.eta, ctx.geometry, ctx.wavelength,
                                 Execution::serial);
    if (need_crb) {
      const TargetDerivatives d = target_channel_derivatives(state, ctx.target, ctx.geometry, ctx.wavelength);
      const FimBlocks j = fim_blocks(ev.channels, d, ctx.beam.total_covariance,
                                     SensingParams::from(ctx.target, ctx.eta), ctx.coherence_length,
                                     ctx.target_noise_power);
      ev.trace_crb = trace_crb(j);
    }
  } catch (const DegenerateGeometry&) {
    out.degenerate = true;
    return false;
  } catch (const UnobservableTarget&) {
    out.degenerate = true;
    return false;
  }
  if (!std::isfinite(ev.trace_crb) && need_crb) {
    out.degenerate = true;
    return false;
  }
  ev.sinr = sinrs(ev.channels, ctx.beam, ctx.user_noise_powers);
  if (ctx.gamma_min > 0.0)
    out.sinr_penalty = (ctx.gamma_min - ev.sinr.array()).cwiseMax(0.0).square().sum();
  return true;
}

}  // namespace

FitnessBreakdown fitness_sensing(const ArrayState& state, const FitnessContext& ctx) {
  FitnessBreakdown out;
  Evaluated ev;
  if (!evaluate_geometry(state, ctx, out, ev, true)) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.objective = ev.trace_crb;
  out.value = out.objective + ctx.mu1 * out.spacing_pairs + ctx.mu2 * out.reflection_elements +
              ctx.mu3 * out.sinr_penalty;
  return out;
}

FitnessBreakdown fitness_comm(const ArrayState& state, const FitnessContext& ctx) {
  FitnessBreakdown out;
  Evaluated ev;
  const bool budget = std::isfinite(ctx.crb_budget);
  if (!evaluate_geometry(state, ctx, out, ev, budget)) {
    out.value = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.objective = surrogate_f2(ev.channels, ctx.beam, ctx.rho, ctx.nu, ctx.user_noise_powers);
  if (budget) {
    const double excess = std::max(0.0, ev.trace_crb - ctx.crb_budget);
    out.crb_penalty = excess * excess;
  }
  out.value = out.objective - ctx.mu1 * out.spacing_pairs - ctx.mu2 * out.reflection_elements -
              ctx.mu3 * out.sinr_penalty - ctx.mu4 * out.crb_penalty;
  return out;
}

double adaptive_crb_penalty(double mu0, double trace_crb) {
  if (!(trace_crb > 0.0) || !std::isfinite(trace_crb)) throw ContractViolation("mu4: tr(CRB) must be finite and > 0");
  return mu0 / (trace_crb * trace_crb);
}

bool strictly_better(Mode mode, double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return mode == Mode::sensing ? a < b : a > b;
}

namespace {

void evaluate_all(Swarm& swarm, const FitnessFunction& fitness, Execution exec) {
  const int m = static_cast<int>(swarm.positions.size());
  swarm.fitness.resize(m);
  if (exec == Execution::parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < m; ++i) {
      try {
        swarm.fitness[i] = fitness(decode(swarm.positions[i], swarm.like));
      } catch (...) {
#pragma omp critical(rmaisac_swarm_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (int i = 0; i < m; ++i) swarm.fitness[i] = fitness(decode(swarm.positions[i], swarm.like));
  }
}

void project(RVec& x, const ParticleLayout& lay, const std::vector<bool>& free, double side,
             const std::optional<int>& bits) {
  const double h = side / 2.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!free[i]) continue;
    if (lay.is_rotation(i)) {
      x(i) = bits ? quantize_angle(x(i), *bits) : wrap_angle(x(i));
    } else {
      x(i) = std::clamp(x(i), -h, h);
    }
  }
}

void update_global_best(Swarm& swarm) {
  for (std::size_t i = 0; i < swarm.best_positions.size(); ++i)
    if (strictly_better(swarm.mode, swarm.best_fitness[i].value, swarm.global_best_fitness.value)) {
      swarm.global_best = swarm.best_positions[i];
      swarm.global_best_fitness = swarm.best_fitness[i];
    }
}

}  // namespace

Swarm init_swarm(const ArrayState& current, Mode mode, const PsoConfig& config, double region_side,
                 std::vector<bool> free_coords, const FitnessFunction& fitness) {
  config.validate();
  const ParticleLayout lay{static_cast<int>(current.tx_placements.size()),
                           static_cast<int>(current.rx_placements.size())};
  if (static_cast<int>(free_coords.size()) != lay.size())
    throw ContractViolation("init_swarm: free-coordinate mask has the wrong length");

  Swarm s;
  s.mode = mode;
  s.like = current;
  s.region_side = region_side;
  s.free_coords = std::move(free_coords);
  s.rng.seed(config.seed);

  const RVec incumbent = encode(current);
  const double h = region_side / 2.0;
  std::uniform_real_distribution<double> pos(-h, h), rot(0.0, kTwoPi), vpos(-h, h), vrot(-kPi, kPi);
  for (int m = 0; m < config.swarm_size; ++m) {
    RVec x = incumbent;
    if (m > 0) {
      for (int i = 0; i < lay.size(); ++i) {
        const double draw = lay.is_rotation(i) ? rot(s.rng) : pos(s.rng);
        if (s.free_coords[i]) x(i) = draw;
      }
      project(x, lay, s.free_coords, region_side, config.rotation_bits);
    }
    RVec v(lay.size());
    for (int i = 0; i < lay.size(); ++i) {
      const double draw = lay.is_rotation(i) ? vrot(s.rng) : vpos(s.rng);
      v(i) = s.free_coords[i] ? draw : 0.0;
    }
    s.positions.push_back(x);
    s.velocities.push_back(v);
  }

  evaluate_all(s, fitness, config.execution);
  s.best_positions = s.positions;
  s.best_fitness = s.fitness;
  s.global_best = s.positions[0];
  s.global_best_fitness = s.fitness[0];
  update_global_best(s);
  return s;
}

void step(Swarm& s, int tau, const PsoConfig& config, const FitnessFunction& fitness) {
  if (tau < 1 || (config.max_iterations > 0 && tau > config.max_iterations))
    throw ContractViolation("pso step: iteration index out of range");
  const ParticleLayout lay{static_cast<int>(s.like.tx_placements.size()),
                           static_cast<int>(s.like.rx_placements.size())};
  const double omega =
      config.omega_max - (config.omega_max - config.omega_min) * tau / std::max(1, config.max_iterations);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t m = 0; m < s.positions.size(); ++m) {
    const double b1 = unit(s.rng);
    const double b2 = unit(s.rng);
    RVec& v = s.velocities[m];
    RVec& x = s.positions[m];
    v = omega * v + config.a1 * b1 * (s.best_positions[m] - x) + config.a2 * b2 * (s.global_best - x);
    for (int i = 0; i < lay.size(); ++i)
      if (!s.free_coords[i]) v(i) = 0.0;
    x += v;
    project(x, lay, s.free_coords, s.region_side, config.rotation_bits);
  }

  evaluate_all(s, fitness, config.execution);
  for (std::size_t m = 0; m < s.positions.size(); ++m)
    if (strictly_better(s.mode, s.fitness[m].value, s.best_fitness[m].value)) {
      s.best_positions[m] = s.positions[m];
      s.best_fitness[m] = s.fitness[m];
    }
  update_global_best(s);
}

PsoResult run_pso(const ArrayState& initial, Mode mode, const PsoConfig& config, double region_side,
                  const std::vector<bool>& free_coords, const FitnessFunction& fitness) {
  Swarm s = init_swarm(initial, mode, config, region_side, free_coords, fitness);
  PsoResult out;
  out.trace.push_back(s.global_best_fitness.value);
  for (int tau = 1; tau <= config.max_iterations; ++tau) {
    step(s, tau, config, fitness);
    out.trace.push_back(s.global_best_fitness.value);
  }
  out.best = decode(s.global_best, initial);
  out.best_fitness = s.global_best_fitness;
  out.feasible = s.global_best_fitness.penalty_free();
  return out;
}

}  // namespace rmaisac
