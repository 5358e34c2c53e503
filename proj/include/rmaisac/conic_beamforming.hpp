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
#include "rmaisac/estimation.hpp"
#include "rmaisac/sdp_solver.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace rmaisac {

/// Channel, sensing and budget data shared by both beamforming problems.
struct BeamformingData {
  ChannelSet channels;
  TargetDerivatives derivatives;
  SensingParams params;
  int coherence_length = 1;
  double target_noise_power = 1.0;
  RVec user_noise_powers;
  double power_budget = 1.0;
  double gamma_min = 0.0;  // linear; 0 drops the SINR floors

  void validate() const;
  int num_tx() const { return static_cast<int>(channels.target_tx.size()); }
  int num_users() const { return channels.num_users(); }
};

/// Minimize tr(CRB) over (Omega_k, R_x).
struct SensingSdpSpec {
  BeamformingData data;
};

/// Maximize the quadratic-transform rate surrogate subject to a CRB budget.
/// An infinite budget drops the CRB block.
struct CommSdpSpec {
  BeamformingData data;
  double crb_budget = std::numeric_limits<double>::infinity();
  RVec rho;
  RVec nu;
};

struct SdpSolveReport {
  SdpStatus status = SdpStatus::numerical_failure;
  double objective = 0.0;
  std::vector<CMat> omegas;
  CMat total_covariance;
  std::optional<Mat3> auxiliary;  // U of the sensing problem
  RVec epigraph;                  // t_k of the communication problem
  double solver_tolerance = 0.0;
  int iterations = 0;
};

/// Variable layout shared by both programs: K Hermitian Omega_k, then R_x,
/// then the problem-specific tail (U and V, or t_1..t_K).
struct SdpLayout {
  int n = 0;
  int users = 0;
  int omega(int k) const { return k * n * n; }
  int covariance() const { return users * n * n; }
  int tail() const { return (users + 1) * n * n; }
};

LmiProblem build_sensing_lmi(const SensingSdpSpec& spec);
LmiProblem build_comm_lmi(const CommSdpSpec& spec);

/// Least total transmit power that meets the SINR floors, from the
/// uplink-downlink duality fixed point. Returns +inf once the (monotone)
/// iterates exceed `stop_above` or no power suffices. A beamforming solve
/// that stalls is reported infeasible when this exceeds the budget.
double minimum_sinr_power(const BeamformingData& data,
                          double stop_above = std::numeric_limits<double>::infinity());

/// Without SINR floors the Omega_k carry neither cost nor constraint; they
/// are fixed at zero and only R_x is optimised.
SdpSolveReport solve_sensing_sdp(const SensingSdpSpec& spec, const SdpOptions& options = {});
SdpSolveReport solve_comm_sdp(const CommSdpSpec& spec, const SdpOptions& options = {});

/// Value of the communication objective (the rate surrogate with the fixed
/// rho, nu) at a beam solution.
double comm_objective(const BeamSolution& solution, const CommSdpSpec& spec);

enum class DegenerateBeamPolicy { raise, zero_beam };

/// w_k = Omega_k h_k^* / sqrt(h_k^T Omega_k h_k^*), R_x unchanged and
/// R_0 = R_x - sum_k w_k w_k^H. A user whose received beam power is below
/// 1e-12 of ||h_k||^2 tr(R_x) is degenerate.
BeamSolution rank_one_recovery(const SdpSolveReport& report, const ChannelSet& channels,
                               DegenerateBeamPolicy policy = DegenerateBeamPolicy::raise);

struct FeasibilityReport {
  double power_excess = 0.0;        // max(0, tr R_x - P)
  double psd_violation = 0.0;       // max(0, -lambda_min(R_x - W W^H))
  double consistency_error = 0.0;   // |R_0 - (R_x - W W^H)|, max entry
  RVec sinr_shortfall;              // max(0, Gamma_min - Gamma_k)
  double worst_sinr_shortfall = 0.0;
  double trace_crb = std::numeric_limits<double>::infinity();
  double crb_excess = 0.0;          // max(0, tr CRB - C_max), 0 when unchecked

  /// Power, PSD and SINR within `tolerance`; CRB excess within
  /// tolerance * C_max.
  bool feasible(double tolerance, double crb_budget = std::numeric_limits<double>::infinity()) const;
};

FeasibilityReport audit_solution(const BeamSolution& solution, const BeamformingData& data,
                                 double crb_budget = std::numeric_limits<double>::infinity());

}  // namespace rmaisac
