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

#pragma once

#include "rmaisac/channel.hpp"
#include "rmaisac/comm_metrics.hpp"
#include "rmaisac/geometry.hpp"
#include "rmaisac/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace rmaisac {

enum class Mode { sensing, comm };

const char* to_string(Mode mode);

/// Index map of a particle: transmit (y, z) pairs, transmit rotation,
/// receive (y, z) pairs, receive rotation.
struct ParticleLayout {
  int n_tx = 0;
  int n_rx = 0;

  int size() const { return 2 * n_tx + 2 * n_rx + 6; }
  int tx_position(int n) const { return 2 * n; }
  int tx_rotation() const { return 2 * n_tx; }
  int rx_position(int n) const { return 2 * n_tx + 3 + 2 * n; }
  int rx_rotation() const { return 2 * n_tx + 3 + 2 * n_rx; }
  bool is_rotation(int i) const;
};

RVec encode(const ArrayState& state);
/// Inverse of encode; centres come from `like`, counts must match.
ArrayState decode(const RVec& coords, const ArrayState& like);

struct PsoConfig {
  int swarm_size = 200;
  int max_iterations = 100;
  double a1 = 1.4;
  double a2 = 1.4;
  double omega_min = 0.4;
  double omega_max = 0.9;
  double mu0 = 1000.0;
  double mu1 = 1000.0;
  double mu2 = 1000.0;
  double mu3 = 1000.0;
  std::optional<int> rotation_bits;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;

  void validate() const;
};

/// Objective and penalty terms of one fitness evaluation.
struct FitnessBreakdown {
  double value = std::numeric_limits<double>::quiet_NaN();
  double objective = 0.0;       // tr(CRB) in sensing mode, f3 in comm mode
  int spacing_pairs = 0;        // |S|
  int reflection_elements = 0;  // |J|
  double sinr_penalty = 0.0;    // H
  double crb_penalty = 0.0;     // T, comm mode only
  bool degenerate = false;

  bool penalty_free() const {
    return !degenerate && spacing_pairs == 0 && reflection_elements == 0 && sinr_penalty == 0.0 &&
           crb_penalty == 0.0;
  }
};

/// Everything a fitness evaluation needs besides the geometry.
struct FitnessContext {
  GeometryConfig geometry;
  double wavelength = 1.0;
  std::vector<EntityPosition> users;
  EntityPosition target;
  cdouble eta{1.0, 0.0};
  BeamSolution beam;
  int coherence_length = 1;
  double target_noise_power = 1.0;
  RVec user_noise_powers;
  double gamma_min = 0.0;
  double mu1 = 1000.0;
  double mu2 = 1000.0;
  double mu3 = 1000.0;
  // communication mode
  RVec rho;
  RVec nu;
  double crb_budget = std::numeric_limits<double>::infinity();
  double mu4 = 0.0;
};

/// tr(CRB) + mu1 |S| + mu2 |J| + mu3 H; +inf for degenerate geometry.
FitnessBreakdown fitness_sensing(const ArrayState& state, const FitnessContext& ctx);
/// f3 - mu1 |S| - mu2 |J| - mu3 H - mu4 T; -inf for degenerate geometry.
FitnessBreakdown fitness_comm(const ArrayState& state, const FitnessContext& ctx);

/// mu0 / tr(CRB)^2 at the current beam and geometry.
double adaptive_crb_penalty(double mu0, double trace_crb);

using FitnessFunction = std::function<FitnessBreakdown(const ArrayState&)>;

struct Swarm {
  Mode mode = Mode::sensing;
  ArrayState like;
  std::vector<RVec> positions;
  std::vector<RVec> velocities;
  std::vector<RVec> best_positions;
  std::vector<FitnessBreakdown> fitness;
  std::vector<FitnessBreakdown> best_fitness;
  RVec global_best;
  FitnessBreakdown global_best_fitness;
  std::vector<bool> free_coords;
  double region_side = 1.0;
  std::mt19937_64 rng;
};

/// True when `a` is strictly better than `b` under `mode`; NaN is worst.
bool strictly_better(Mode mode, double a, double b);

/// Particle 0 encodes `current`; the others are uniform on the region and on
/// [0, 2 pi). Frozen coordinates (free_coords[i] == false) keep the value of
/// `current` and zero velocity in every particle.
Swarm init_swarm(const ArrayState& current, Mode mode, const PsoConfig& config, double region_side,
                 std::vector<bool> free_coords, const FitnessFunction& fitness);

/// One synchronous update at iteration tau (1-based).
void step(Swarm& swarm, int tau, const PsoConfig& config, const FitnessFunction& fitness);

struct PsoResult {
  ArrayState best;
  FitnessBreakdown best_fitness;
  std::vector<double> trace;  // global-best value after init and after each step
  bool feasible = false;
};

PsoResult run_pso(const ArrayState& initial, Mode mode, const PsoConfig& config, double region_side,
                  const std::vector<bool>& free_coords, const FitnessFunction& fitness);

}  // namespace rmaisac
