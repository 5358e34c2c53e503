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

#include "rmaisac/comm_metrics.hpp"

#include <cmath>
#include <numbers>

namespace rmaisac {

namespace {

void check_noise(const ChannelSet& channels, const RVec& noise_powers) {
  if (noise_powers.size() != channels.num_users())
    throw ContractViolation("comm metrics: one noise power per user is required");
  if ((noise_powers.array() <= 0.0).any()) throw ContractViolation("comm metrics: noise power must be > 0");
}

double received_power(const CVec& h, const CMat& covariance) {
  return (h.transpose() * covariance * h.conjugate()).value().real();
}

}  // namespace

BeamSolution BeamSolution::from_parts(const CMat& beamformers, const CMat& sensing_covariance) {
  BeamSolution s;
  s.beamformers = beamformers;
  s.sensing_covariance = sensing_covariance;
  s.total_covariance = beamformers * beamformers.adjoint() + sensing_covariance;
  return s;
}

double sinr(const ChannelSet& channels, const BeamSolution& solution, int user, double noise_power) {
  if (!(noise_power > 0.0)) throw ContractViolation("sinr: noise power must be > 0");
  const CVec h = channels.user(user);
  const Eigen::RowVectorXcd gains = h.transpose() * solution.beamformers;
  const double signal = std::norm(gains(user));
  const double interference = gains.squaredNorm() - signal;
  return signal / (interference + received_power(h, solution.sensing_covariance) + noise_power);
}

RVec sinrs(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers) {
  check_noise(channels, noise_powers);
  RVec out(channels.num_users());
  for (int k = 0; k < channels.num_users(); ++k) out(k) = sinr(channels, solution, k, noise_powers(k));
  return out;
}

double sum_rate(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers) {
  return sinrs(channels, solution, noise_powers).array().log1p().sum() / std::numbers::ln2;
}

double surrogate_offset(const RVec& rho) {
  return (rho.array().log1p() - rho.array()).sum() / std::numbers::ln2;
}

double surrogate_f1(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
                    const RVec& noise_powers) {
  check_noise(channels, noise_powers);
  double ratio = 0.0;
  for (int k = 0; k < channels.num_users(); ++k) {
    const CVec h = channels.user(k);
    const double signal = std::norm(h.dot(solution.beamformers.col(k).conjugate()));
    ratio += (1.0 + rho(k)) * signal / (received_power(h, solution.total_covariance) + noise_powers(k));
  }
  return surrogate_offset(rho) + ratio / std::numbers::ln2;
}

RVec update_rho(const ChannelSet& channels, const BeamSolution& solution, const RVec& noise_powers) {
  return sinrs(channels, solution, noise_powers);
}

RVec update_nu(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
               const RVec& noise_powers) {
  check_noise(channels, noise_powers);
  (void)rho;
  RVec nu(channels.num_users());
  for (int k = 0; k < channels.num_users(); ++k) {
    const CVec h = channels.user(k);
    const double amplitude = std::abs((h.transpose() * solution.beamformers.col(k)).value());
    nu(k) = amplitude / (received_power(h, solution.total_covariance) + noise_powers(k));
  }
  return nu;
}

double surrogate_f2(const ChannelSet& channels, const BeamSolution& solution, const RVec& rho,
                    const RVec& nu, const RVec& noise_powers) {
  check_noise(channels, noise_powers);
  double total = 0.0;
  for (int k = 0; k < channels.num_users(); ++k) {
    const CVec h = channels.user(k);
    const double amplitude = std::abs((h.transpose() * solution.beamformers.col(k)).value());
    const double power = received_power(h, solution.total_covariance) + noise_powers(k);
    total += 2.0 * (1.0 + rho(k)) * nu(k) * amplitude - (1.0 + rho(k)) * nu(k) * nu(k) * power;
  }
  return total;
}

}  // namespace rmaisac
