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

#include "rmaisac/geometry.hpp"
#include "rmaisac/types.hpp"

#include <vector>

namespace rmaisac {

/// Spherical position of a user or of the sensing target relative to the
/// global origin: distance d > 0, elevation theta in [0, pi], azimuth phi in
/// [-pi/2, pi/2].
struct EntityPosition {
  double distance = 1.0;
  double elevation = kPi / 2.0;
  double azimuth = 0.0;

  Vec3 cartesian() const;
  void validate() const;
  bool operator==(const EntityPosition&) const = default;
};

/// Channels derived from one geometry.
///
/// `user_channels` holds h_1..h_K as columns (N_t x K). The echo matrix is
/// eta * g_0 * h_0^T (N_r x N_t).
struct ChannelSet {
  CMat user_channels;
  CVec target_tx;
  CVec target_rx;
  cdouble echo_gain{1.0, 0.0};
  CMat echo_matrix;

  int num_users() const { return static_cast<int>(user_channels.cols()); }
  CVec user(int k) const { return user_channels.col(k); }
};

/// Free-space path loss 1 / (4 pi |source - point|^2).
double path_loss(const Vec3& source, const Vec3& point);

/// Effective-aperture projection |(source - point)^T u| / |source - point|.
/// The sign factor makes the projection non-negative on both sides of the
/// plane.
double aperture_gain(const Vec3& source, const Vec3& point, const Vec3& normal);

/// Near-field coefficient sqrt(A * L * G) * exp(-j 2 pi Delta / lambda).
cdouble channel_coefficient(const EntityPosition& entity, const Vec3& antenna_global,
                            const Vec3& normal, double element_area, double wavelength);

/// Coefficients for every (entity, element) pair on one plane, column per
/// entity. The parallel path splits the flattened pair range across threads;
/// the serial path is the reference it must match bit for bit.
CMat plane_channels(const std::vector<EntityPosition>& entities, const std::vector<Vec3>& elements,
                    const Vec3& normal, double element_area, double wavelength,
                    Execution exec = Execution::parallel);

ChannelSet build_channels(const ArrayState& state, const std::vector<EntityPosition>& users,
                          const EntityPosition& target, cdouble eta, const GeometryConfig& config,
                          double wavelength, Execution exec = Execution::parallel);

}  // namespace rmaisac
