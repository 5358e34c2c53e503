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

#include "rmaisac/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rmaisac {

double wrap_angle(double radians) {
  double wrapped = std::fmod(radians, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2*pi
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

PlaneRotation PlaneRotation::normalized() const {
  return {wrap_angle(alpha), wrap_angle(beta), wrap_angle(gamma)};
}

void GeometryConfig::validate() const {
  if (n_tx < 1 || n_rx < 1) throw ContractViolation("geometry: element counts must be >= 1");
  if (!(region_side > 0.0)) throw ContractViolation("geometry: region_side must be > 0");
  if (!(min_spacing > 0.0)) throw ContractViolation("geometry: min_spacing must be > 0");
  if (!(element_area > 0.0)) throw ContractViolation("geometry: element_area must be > 0");
}

Mat3 rotation_matrix(const PlaneRotation& rot) {
  const double ca = std::cos(rot.alpha), sa = std::sin(rot.alpha);
  const double cb = std::cos(rot.beta), sb = std::sin(rot.beta);
  const double cg = std::cos(rot.gamma), sg = std::sin(rot.gamma);
  Mat3 f;
  f << ca * cg, ca * sg, -sa,
       sb * sa * cg - cb * sg, sb * sa * sg + cb * cg, ca * sb,
       cb * sa * cg + sb * sg, cb * sa * sg - sb * cg, ca * cb;
  return f;
}

Vec3 global_position(const LocalPlacement& local, const PlaneRotation& rot, const Vec3& center) {
  return rotation_matrix(rot) * Vec3(0.0, local.y, local.z) + center;
}

Vec3 plane_normal(const PlaneRotation& rot) { return rotation_matrix(rot).col(0); }

namespace {

std::vector<Vec3> positions(const std::vector<LocalPlacement>& placements, const PlaneRotation& rot,
                            const Vec3& center) {
  const Mat3 f = rotation_matrix(rot);
  std::vector<Vec3> out;
  out.reserve(placements.size());
  for (const auto& q : placements) out.push_back(f * Vec3(0.0, q.y, q.z) + center);
  return out;
}

void collect_close_pairs(const std::vector<Vec3>& pts, Plane plane, double min_spacing,
                         std::vector<AntennaPair>& out) {
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((pts[i] - pts[j]).norm() < min_spacing) out.push_back({plane, i, j});
}

}  // namespace

std::vector<Vec3> tx_positions(const ArrayState& state) {
  return positions(state.tx_placements, state.tx_rotation, state.tx_center);
}

std::vector<Vec3> rx_positions(const ArrayState& state) {
  return positions(state.rx_placements, state.rx_rotation, state.rx_center);
}

std::vector<AntennaRef> reflection_violations(const ArrayState& state) {
  const Vec3 u_tx = plane_normal(state.tx_rotation);
  const Vec3 u_rx = plane_normal(state.rx_rotation);
  std::vector<AntennaRef> out;
  const auto rx = rx_positions(state);
  for (int n = 0; n < static_cast<int>(rx.size()); ++n)
    if (u_tx.dot(rx[n] - state.tx_center) > 0.0) out.push_back({Plane::rx, n});
  const auto tx = tx_positions(state);
  for (int n = 0; n < static_cast<int>(tx.size()); ++n)
    if (u_rx.dot(tx[n] - state.rx_center) > 0.0) out.push_back({Plane::tx, n});
  return out;
}

std::vector<AntennaPair> spacing_violations(const ArrayState& state, double min_spacing) {
  if (!(min_spacing > 0.0)) throw ContractViolation("spacing_violations: min_spacing must be > 0");
  std::vector<AntennaPair> out;
  collect_close_pairs(tx_positions(state), Plane::tx, min_spacing, out);
  collect_close_pairs(rx_positions(state), Plane::rx, min_spacing, out);
  return out;
}

bool within_region(const ArrayState& state, double region_side) {
  const double h = region_side / 2.0;
  auto inside = [h](const LocalPlacement& q) {
    return q.y >= -h && q.y <= h && q.z >= -h && q.z <= h;
  };
  return std::all_of(state.tx_placements.begin(), state.tx_placements.end(), inside) &&
         std::all_of(state.rx_placements.begin(), state.rx_placements.end(), inside);
}

double quantize_angle(double radians, int bits) {
  if (bits < 1) throw ContractViolation("quantize_angle: bits must be >= 1");
  const double levels = std::ldexp(1.0, bits);
  const double step = kTwoPi / levels;
  const double x = wrap_angle(radians) / step;
  double level = std::floor(x);
  if (x - level > 0.5) level += 1.0;
  if (level >= levels) level = 0.0;
  return level * step;
}

PlaneRotation quantize_rotation(const PlaneRotation& rot, int bits) {
  return {quantize_angle(rot.alpha, bits), quantize_angle(rot.beta, bits),
          quantize_angle(rot.gamma, bits)};
}

std::vector<LocalPlacement> grid_layout(int count, double pitch) {
  std::vector<LocalPlacement> out;
  if (count <= 0) return out;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  const double y0 = -0.5 * (cols - 1) * pitch;
  const double z0 = -0.5 * (rows - 1) * pitch;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    const int r = n / cols, c = n % cols;
    out.push_back({y0 + c * pitch, z0 + r * pitch});
  }
  return out;
}

}  // namespace rmaisac
