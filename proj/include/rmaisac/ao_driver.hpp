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

#include "rmaisac/conic_beamforming.hpp"
#include "rmaisac/swarm.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rmaisac {

/// One drawn problem instance: array geometry bounds, the users, the target
/// and the link budget.
struct Scenario {
  GeometryConfig geometry;
  double wavelength = 1.0;
  std::vector<EntityPosition> users;
  EntityPosition target;
  cdouble eta{1.0, 0.0};
  int coherence_length = 1000;
  double target_noise_power = 1.0;
  RVec user_noise_powers;
  double power_budget = 1.0;
};

BeamformingData beamforming_data(const Scenario& scenario, const ArrayState& state, double gamma_min);

struct AoConfig {
  Mode mode = Mode::sensing;
  int max_outer_iterations = 20;
  double tolerance = 1e-3;
  PsoConfig pso;
  double gamma_min = 0.0;  // linear
  double crb_budget = std::numeric_limits<double>::infinity();
  /// Particle coordinates the swarm may move; empty means all.
  std::vector<bool> free_coords;
  SdpOptions sdp;
  /// Feasibility tolerance of the acceptance guards and the final audit.
  double audit_tolerance = 1e-6;

  void validate() const;
};

struct AoIterationRecord {
  int iteration = 0;
  double objective = 0.0;  // tr(CRB) in sensing mode, sum-rate in comm mode
  double trace_crb = 0.0;
  Vec3 rcrb = Vec3::Zero();
  RVec sinr;
  double sum_rate = 0.0;
  double power = 0.0;
  int spacing_pairs = 0;
  int reflection_elements = 0;
  double sinr_penalty = 0.0;
  double crb_excess = 0.0;
  double wall_ms = 0.0;
  bool beam_accepted = true;      // SDP beam replaced the incumbent
  bool geometry_accepted = true;  // swarm geometry replaced the incumbent
  bool pso_feasible = true;
};

using AoSink = std::function<void(const AoIterationRecord&)>;

struct AoResult {
  BeamSolution beam;
  ArrayState state;
  std::vector<AoIterationRecord> trace;
  bool converged = false;
  /// A later SDP failed; beam and state are the last feasible iterate.
  bool stopped_infeasible = false;
  FeasibilityReport audit;
};

/// The very first beamforming SDP had no feasible point.
class AoInfeasible : public std::runtime_error {
public:
  AoInfeasible(const std::string& what, SdpStatus status) : std::runtime_error(what), status_(status) {}
  SdpStatus status() const noexcept { return status_; }

private:
  SdpStatus status_;
};

/// Sensing-centric loop: beamforming SDP, rank-one recovery, swarm step.
AoResult algorithm1(const Scenario& scenario, const ArrayState& initial, const AoConfig& config,
                    const AoSink& sink = {});

/// Communication-centric loop: rho/nu update, SDP, recovery, mu4, swarm step.
AoResult algorithm2(const Scenario& scenario, const ArrayState& initial, const AoConfig& config,
                    const AoSink& sink = {});

/// Matched-filter beams with P/(2K) per user plus isotropic sensing power P/2.
BeamSolution initial_beam(const ChannelSet& channels, double power_budget);

}  // namespace rmaisac
