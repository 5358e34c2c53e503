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
#include "rmaisac/geometry.hpp"
#include "rmaisac/types.hpp"

#include <array>

namespace rmaisac {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Unknowns of the echo model, in FIM order: d0, theta0, phi0, Re(eta), Im(eta).
struct SensingParams {
  double d0 = 1.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  double eta_re = 1.0;
  double eta_im = 0.0;

  cdouble eta() const { return {eta_re, eta_im}; }
  static SensingParams from(const EntityPosition& target, cdouble eta) {
    return {target.distance, target.elevation, target.azimuth, eta.real(), eta.imag()};
  }
};

/// Partial derivatives of the target channels h_0 (transmit) and g_0
/// (receive) with respect to d0, theta0 and phi0, in that order.
struct TargetDerivatives {
  std::array<CVec, 3> tx;
  std::array<CVec, 3> rx;
};

TargetDerivatives target_channel_derivatives(const ArrayState& state, const EntityPosition& target,
                                             const GeometryConfig& config, double wavelength);

struct FimBlocks {
  Mat3 j11 = Mat3::Zero();
  Mat32 j12 = Mat32::Zero();
  Eigen::Matrix2d j22 = Eigen::Matrix2d::Zero();
  int coherence_length = 1;
  double noise_power = 1.0;

  Mat5 full() const;
  static FimBlocks from_full(const Mat5& j, int coherence_length, double noise_power);
};

/// Fisher information of (d0, theta0, phi0, Re eta, Im eta) for a transmit
/// covariance R_x. Uses the rank-two structure of d(g h^T)/dp so no
/// N_r x N_t product is formed.
FimBlocks fim_blocks(const ChannelSet& channels, const TargetDerivatives& derivs, const CMat& covariance,
                     const SensingParams& params, int coherence_length, double noise_power);

/// Same entries from explicitly formed N_r x N_t derivative matrices. Kept as
/// the reference for the rank-structured path.
FimBlocks fim_blocks_dense(const ChannelSet& channels, const TargetDerivatives& derivs,
                           const CMat& covariance, const SensingParams& params, int coherence_length,
                           double noise_power);

/// The FIM is linear in R_x: J_ab = tr(R_x W_ab) with Hermitian W_ab.
/// The SDP builders consume these weights directly.
struct FimLinearMap {
  std::array<std::array<CMat, 5>, 5> weights;
  int coherence_length = 1;
  double noise_power = 1.0;

  Mat5 evaluate(const CMat& covariance) const;
};

FimLinearMap fim_linear_map(const ChannelSet& channels, const TargetDerivatives& derivs,
                            const SensingParams& params, int coherence_length, double noise_power);

/// (J11 - J12 J22^{-1} J12^T)^{-1}. Throws UnobservableTarget when the Schur
/// complement's smallest eigenvalue falls below 1e-14 of its largest.
Mat3 crb_matrix(const FimBlocks& blocks);
double trace_crb(const FimBlocks& blocks);
/// Square roots of the CRB diagonal: (d0, theta0, phi0).
Vec3 rcrb_per_param(const FimBlocks& blocks);

}  // namespace rmaisac
