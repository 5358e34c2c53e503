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
#include "rmaisac/types.hpp"

#include <vector>

namespace rmaisac {

/// Downlink beamformers W (N_t x K, column per user), the dedicated sensing
/// covariance R_0 and the total covariance R_x = W W^H + R_0.
struct BeamSolution {
  CMat beamformers;
  CMat sensing_covariance;
  CMat total_covariance;

  int num_users() const { return static_cast<int>(beamformers.cols()); }
  /// Builds R_x from W and R_0.
  static BeamSolution from_parts(const CMat& beamformers, const CMat& sensing_covariance);
};

struct FpAuxiliaries {
  RVec rho;
  RVec nu;
};

/// |h_k^T w_k|^2 / (sum_{i != k} |h_k^T w_i|^2 + h_k^T R_0 h_k^* + sigma_k^2).
double sinr(const ChannelSet& channels, const BeamSolution& solution, int user, double noise_power);
RVec sinrs(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers);

/// Sum of log2(1 + SINR_k), bits/s/Hz.
double sum_rate(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers);

/// Rate surrogate with explicit rho; at rho = SINR it equals sum_rate. The
/// ratio term uses the total received power h_k^T R_x h_k^* + sigma_k^2.
double surrogate_f1(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
                    const RVec& noise_powers);

RVec update_rho(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers);

/// nu_k = |h_k^T w_k| / (h_k^T R_x h_k^* + sigma_k^2).
RVec update_nu(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
               const RVec& noise_powers);

/// sum_k 2 (1 + rho_k) nu_k |h_k^T w_k| - (1 + rho_k) nu_k^2 (h_k^T R_x h_k^* + sigma_k^2).
double surrogate_f2(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
                    const RVec& nu, const RVec& noise_powers);

/// Sum of log2(1 + rho_k) - rho_k / ln 2 terms that f1 adds to the ratio part.
double surrogate_offset(const RVec& rho);

}  // namespace rmaisac
