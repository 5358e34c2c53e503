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

#include "rmaisac/types.hpp"

#include <compare>
#include <vector>

namespace rmaisac {

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double radians);

/// Rotation of one antenna plane about the global x, y and z axes.
struct PlaneRotation {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Same rotation with every angle wrapped into [0, 2*pi).
  PlaneRotation normalized() const;
  bool operator==(const PlaneRotation&) const = default;
};

/// In-plane coordinates of one element; the local x coordinate is always 0.
struct LocalPlacement {
  double y = 0.0;
  double z = 0.0;
  bool operator==(const LocalPlacement&) const = default;
};

struct GeometryConfig {
  int n_tx = 9;
  int n_rx = 9;
  double region_side = 1.0;   // D, metres
  double min_spacing = 0.0;   // d_min, metres
  Vec3 tx_center = Vec3::Zero();
  Vec3 rx_center = Vec3::Zero();
  double element_area = 0.0;  // A, square metres

  /// Throws ContractViolation when a field is out of range.
  void validate() const;
};

/// The geometric optimization variables: element placements and plane
/// rotations for the transmit (TP) and receive (RP) planes.
struct ArrayState {
  std::vector<LocalPlacement> tx_placements;
  std::vector<LocalPlacement> rx_placements;
  PlaneRotation tx_rotation;
  PlaneRotation rx_rotation;
  Vec3 tx_center = Vec3::Zero();
  Vec3 rx_center = Vec3::Zero();

  bool operator==(const ArrayState&) const = default;
};

enum class Plane { tx, rx };

/// F(alpha, beta, gamma). Rows follow the plane-rotation convention used for
/// 6D movable antennas; the result is a proper rotation (orthogonal, det +1).
Mat3 rotation_matrix(const PlaneRotation& rot);

/// F * [0, y, z]^T + center.
Vec3 global_position(const LocalPlacement& local, const PlaneRotation& rot, const Vec3& center);

/// Outward normal F * [1, 0, 0]^T.
Vec3 plane_normal(const PlaneRotation& rot);

std::vector<Vec3> tx_positions(const ArrayState& state);
std::vector<Vec3> rx_positions(const ArrayState& state);

/// One element that violates a reflection constraint.
struct AntennaRef {
  Plane plane;
  int index;
  auto operator<=>(const AntennaRef&) const = default;
};

/// Receive elements in front of the TP and transmit elements in front of the
/// RP. A zero dot product is feasible. Sorted, receive entries first.
std::vector<AntennaRef> reflection_violations(const ArrayState& state);

/// Unordered same-plane pair whose global distance is below d_min.
struct AntennaPair {
  Plane plane;
  int first;
  int second;
  auto operator<=>(const AntennaPair&) const = default;
};

/// All same-plane pairs closer than `min_spacing` (distance == d_min is
/// feasible). Sorted, transmit pairs first. Requires min_spacing > 0.
std::vector<AntennaPair> spacing_violations(const ArrayState& state, double min_spacing);

/// True when every placement lies in [-D/2, D/2]^2.
bool within_region(const ArrayState& state, double region_side);

/// Snaps an angle to the nearest of 2^bits uniform levels on the circle;
/// exact ties go to the lower level. Requires bits >= 1.
double quantize_angle(double radians, int bits);
PlaneRotation quantize_rotation(const PlaneRotation& rot, int bits);

/// Uniform square grid with `pitch` spacing, centred on the plane origin,
/// filled row by row (ceil(sqrt(n)) columns).
std::vector<LocalPlacement> grid_layout(int count, double pitch);

}  // namespace rmaisac
