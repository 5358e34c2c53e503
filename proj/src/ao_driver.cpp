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

#include "rmaisac/ao_driver.hpp"

#include <chrono>
#include <cmath>
#include <optional>

namespace rmaisac {

BeamformingData beamforming_data(const Scenario& sc, const ArrayState& state, double gamma_min) {
  BeamformingData d;
  d.channels = build_channels(state, sc.users, sc.target, sc.eta, sc.geometry, sc.wavelength);
  d.derivatives = target_channel_derivatives(state, sc.target, sc.geometry, sc.wavelength);
  d.params = SensingParams::from(sc.target, sc.eta);
  d.coherence_length = sc.coherence_length;
  d.target_noise_power = sc.target_noise_power;
  d.user_noise_powers = sc.user_noise_powers;
  d.power_budget = sc.power_budget;
  d.gamma_min = gamma_min;
  return d;
}

void AoConfig::validate() const {
  if (max_outer_iterations < 1) throw ContractViolation("ao: max outer iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ContractViolation("ao: tolerance must be > 0");
  if (!(gamma_min >= 0.0)) throw ContractViolation("ao: SINR floor must be >= 0");
  if (!(crb_budget > 0.0)) throw ContractViolation("ao: CRB budget must be > 0");
  pso.validate();
}

BeamSolution initial_beam(const ChannelSet& channels, double power_budget) {
  const int k_users = channels.num_users();
  const Eigen::Index n = channels.user_channels.rows();
  CMat w = CMat::Zero(n, k_users);
  const double per_user = k_users > 0 ? power_budget / (2.0 * k_users) : 0.0;
  for (int k = 0; k < k_users; ++k) {
    const CVec h = channels.user(k);
    if (h.norm() > 0.0) w.col(k) = std::sqrt(per_user) * h.conjugate() / h.norm();
  }
  const double sensing = k_users > 0 ? power_budget / 2.0 : power_budget;
  return BeamSolution::from_parts(w, (sensing / n) * CMat::Identity(n, n));
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, int iteration) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(iteration + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Metrics of a (geometry, beam) pair.
struct Evaluation {
  BeamformingData data;
  double trace_crb = std::numeric_limits<double>::infinity();
  Vec3 rcrb = Vec3::Constant(std::numeric_limits<double>::infinity());
  double schur_min = 0.0;
  RVec sinr;
  double sum_rate = 0.0;
};

Evaluation evaluate(const Scenario& sc, const ArrayState& state, const BeamSolution& beam, double gamma_min) {
  Evaluation e;
  e.data = beamforming_data(sc, state, gamma_min);
  const FimBlocks j = fim_blocks(e.data.channels, e.data.derivatives, beam.total_covariance, e.data.params,
                                 e.data.coherence_length, e.data.target_noise_power);
  try {
    const Mat3 crb = crb_matrix(j);
    e.trace_crb = crb.trace();
    e.rcrb = crb.diagonal().cwiseMax(0.0).cwiseSqrt();
    e.schur_min = Eigen::SelfAdjointEigenSolver<Mat3>(crb.inverse(), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  } catch (const UnobservableTarget&) {
  }
  e.sinr = sinrs(e.data.channels, beam, e.data.user_noise_powers);
  e.sum_rate = sum_rate(e.data.channels, beam, e.data.user_noise_powers);
  return e;
}

bool geometry_feasible(const ArrayState& state, const GeometryConfig& g) {
  return within_region(state, g.region_side) && spacing_violations(state, g.min_spacing).empty() &&
         reflection_violations(state).empty();
}

// Beam constraints that must keep holding when the geometry changes: SINR
// floors, and in communication mode the CRB-budget block.
bool beam_feasible(const Evaluation& e, const AoConfig& cfg) {
  if (!std::isfinite(e.trace_crb)) return false;
  if (cfg.gamma_min > 0.0 && (cfg.gamma_min - e.sinr.array()).maxCoeff() > cfg.audit_tolerance) return false;
  if (cfg.mode == Mode::comm && std::isfinite(cfg.crb_budget)) {
    if (e.trace_crb > cfg.crb_budget * (1.0 + cfg.audit_tolerance)) return false;
    if (e.schur_min < (3.0 / cfg.crb_budget) * (1.0 - cfg.audit_tolerance)) return false;
  }
  return true;
}

double objective_of(const Evaluation& e, Mode mode) { return mode == Mode::sensing ? e.trace_crb : e.sum_rate; }

bool no_worse(Mode mode, double candidate, double incumbent) {
  return mode == Mode::sensing ? candidate <= incumbent : candidate >= incumbent;
}

FitnessContext fitness_context(const Scenario& sc, const BeamSolution& beam, const AoConfig& cfg) {
  FitnessContext ctx;
  ctx.geometry = sc.geometry;
  ctx.wavelength = sc.wavelength;
  ctx.users = sc.users;
  ctx.target = sc.target;
  ctx.eta = sc.eta;
  ctx.beam = beam;
  ctx.coherence_length = sc.coherence_length;
  ctx.target_noise_power = sc.target_noise_power;
  ctx.user_noise_powers = sc.user_noise_powers;
  ctx.gamma_min = cfg.gamma_min;
  ctx.mu1 = cfg.pso.mu1;
  ctx.mu2 = cfg.pso.mu2;
  ctx.mu3 = cfg.pso.mu3;
  ctx.crb_budget = cfg.crb_budget;
  return ctx;
}

AoResult run_loop(const Scenario& sc, const ArrayState& initial, const AoConfig& cfg, const AoSink& sink) {
  cfg.validate();
  std::vector<bool> free = cfg.free_coords;
  const ParticleLayout lay{sc.geometry.n_tx, sc.geometry.n_rx};
  if (free.empty()) free.assign(lay.size(), true);
  const DegenerateBeamPolicy policy =
      cfg.gamma_min > 0.0 ? DegenerateBeamPolicy::raise : DegenerateBeamPolicy::zero_beam;

  AoResult out;
  ArrayState state = initial;
  std::optional<BeamSolution> beam;
  BeamSolution fp_beam;  // beam that defines rho and nu in communication mode
  if (cfg.mode == Mode::comm) fp_beam = initial_beam(beamforming_data(sc, state, cfg.gamma_min).channels, sc.power_budget);
  double previous = std::numeric_limits<double>::quiet_NaN();

  for (int it = 1; it <= cfg.max_outer_iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    AoIterationRecord rec;
    rec.iteration = it;

    const BeamformingData data = beamforming_data(sc, state, cfg.gamma_min);
    SdpSolveReport report;
    RVec rho, nu;
    if (cfg.mode == Mode::sensing) {
      report = solve_sensing_sdp({data}, cfg.sdp);
    } else {
      rho = update_rho(data.channels, fp_beam, data.user_noise_powers);
      nu = update_nu(data.channels, fp_beam, rho, data.user_noise_powers);
      report = solve_comm_sdp({data, cfg.crb_budget, rho, nu}, cfg.sdp);
    }
    if (report.status != SdpStatus::optimal) {
      if (it == 1)
        throw AoInfeasible(std::string("first beamforming SDP returned ") + to_string(report.status) +
                               " (Gamma_min = " + std::to_string(cfg.gamma_min) +
                               ", C_max = " + std::to_string(cfg.crb_budget) + ")",
                           report.status);
      out.stopped_infeasible = true;
      break;
    }

    // Keep the incumbent beam if the fresh SDP beam is worse on the true objective.
    const BeamSolution candidate = rank_one_recovery(report, data.channels, policy);
    if (beam) {
      const Evaluation inc = evaluate(sc, state, *beam, cfg.gamma_min);
      const Evaluation cand = evaluate(sc, state, candidate, cfg.gamma_min);
      const bool cand_ok = beam_feasible(cand, cfg);
      rec.beam_accepted = cand_ok && no_worse(cfg.mode, objective_of(cand, cfg.mode), objective_of(inc, cfg.mode));
    }
    if (rec.beam_accepted) beam = candidate;
    if (cfg.mode == Mode::comm) fp_beam = *beam;

    const Evaluation before = evaluate(sc, state, *beam, cfg.gamma_min);
    FitnessContext ctx = fitness_context(sc, *beam, cfg);
    FitnessFunction fitness;
    if (cfg.mode == Mode::sensing) {
      fitness = [ctx](const ArrayState& s) { return fitness_sensing(s, ctx); };
    } else {
      ctx.rho = rho;
      ctx.nu = nu;
      ctx.mu4 = std::isfinite(before.trace_crb) ? adaptive_crb_penalty(cfg.pso.mu0, before.trace_crb) : 0.0;
      fitness = [ctx](const ArrayState& s) { return fitness_comm(s, ctx); };
    }
    PsoConfig pso = cfg.pso;
    pso.seed = mix_seed(cfg.pso.seed, it);
    const PsoResult swarm = run_pso(state, cfg.mode, pso, sc.geometry.region_side, free, fitness);
    rec.pso_feasible = swarm.feasible;

    // Accept the swarm geometry only if the recomputed objective is no worse
    // and the fixed beam stays feasible on it.
    rec.geometry_accepted = false;
    if (!(swarm.best == state) && geometry_feasible(swarm.best, sc.geometry)) {
      try {
        const Evaluation after = evaluate(sc, swarm.best, *beam, cfg.gamma_min);
        rec.geometry_accepted =
            beam_feasible(after, cfg) && no_worse(cfg.mode, objective_of(after, cfg.mode), objective_of(before, cfg.mode));
      } catch (const DegenerateGeometry&) {
      }
    }
    if (rec.geometry_accepted) state = swarm.best;

    const Evaluation now = evaluate(sc, state, *beam, cfg.gamma_min);
    rec.objective = objective_of(now, cfg.mode);
    rec.trace_crb = now.trace_crb;
    rec.rcrb = now.rcrb;
    rec.sinr = now.sinr;
    rec.sum_rate = now.sum_rate;
    rec.power = beam->total_covariance.trace().real();
    rec.spacing_pairs = static_cast<int>(spacing_violations(state, sc.geometry.min_spacing).size());
    rec.reflection_elements = static_cast<int>(reflection_violations(state).size());
    if (cfg.gamma_min > 0.0) rec.sinr_penalty = (cfg.gamma_min - now.sinr.array()).cwiseMax(0.0).square().sum();
    if (cfg.mode == Mode::comm && std::isfinite(cfg.crb_budget))
      rec.crb_excess = std::max(0.0, now.trace_crb - cfg.crb_budget);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.trace.push_back(rec);
    if (sink) sink(rec);

    if (std::isfinite(previous) && std::abs(rec.objective - previous) <= cfg.tolerance * std::abs(previous)) {
      out.converged = true;
      break;
    }
    previous = rec.objective;
  }

  if (!beam) throw AoInfeasible("no feasible beamforming iterate", SdpStatus::numerical_failure);
  out.beam = *beam;
  out.state = state;
  out.audit = audit_solution(out.beam, beamforming_data(sc, state, cfg.gamma_min),
                             cfg.mode == Mode::comm ? cfg.crb_budget : std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace

AoResult algorithm1(const Scenario& scenario, const ArrayState& initial, const AoConfig& config, const AoSink& sink) {
  AoConfig cfg = config;
  cfg.mode = Mode::sensing;
  return run_loop(scenario, initial, cfg, sink);
}

AoResult algorithm2(const Scenario& scenario, const ArrayState& initial, const AoConfig& config, const AoSink& sink) {
  AoConfig cfg = config;
  cfg.mode = Mode::comm;
  return run_loop(scenario, initial, cfg, sink);
}

}  // namespace rmaisac
