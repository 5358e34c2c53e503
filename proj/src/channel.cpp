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

#include "rmaisac/channel.hpp"

#include <cmath>
#include <string>

namespace rmaisac {

Vec3 EntityPosition::cartesian() const {
  const double st = std::sin(elevation);
  return distance * Vec3(st * std::cos(azimuth), st * std::sin(azimuth), std::cos(elevation));
}

void EntityPosition::validate() const {
  if (!(distance > 0.0)) throw ContractViolation("entity distance must be > 0");
  if (elevation < 0.0 || elevation > kPi) throw ContractViolation("entity elevation outside [0, pi]");
  if (azimuth < -kPi / 2.0 || azimuth > kPi / 2.0)
    throw ContractViolation("entity azimuth outside [-pi/2, pi/2]");
}

double path_loss(const Vec3& source, const Vec3& point) {
  const double d2 = (source - point).squaredNorm();
  if (d2 == 0.0) throw DegenerateGeometry("path_loss: coincident points");
  return 1.0 / (4.0 * kPi * d2);
}

double aperture_gain(const Vec3& source, const Vec3& point, const Vec3& normal) {
  if (std::abs(normal.norm() - 1.0) > 1e-9) throw ContractViolation("aperture_gain: normal is not unit");
  const Vec3 s = source - point;
  const double dist = s.norm();
  if (dist == 0.0) throw DegenerateGeometry("aperture_gain: coincident points");
  return std::abs(s.dot(normal)) / dist;
}

namespace {

// Returns false on coincident points instead of throwing so it can run inside
// an OpenMP region.
bool coefficient_kernel(const Vec3& p, const Vec3& antenna, const Vec3& normal, double area,
                        double wavelength, cdouble& out) {
  const Vec3 s = p - antenna;
  const double dist = s.norm();
  if (dist == 0.0) return false;
  const double loss = 1.0 / (4.0 * kPi * dist * dist);
  const double gain = std::abs(s.dot(normal)) / dist;
  const double magnitude = std::sqrt(area * loss * gain);
  out = std::polar(magnitude, -kTwoPi * dist / wavelength);
  return true;
}

}  // namespace

cdouble channel_coefficient(const EntityPosition& entity, const Vec3& antenna_global, const Vec3& normal,
                            double element_area, double wavelength) {
  cdouble h;
  if (!coefficient_kernel(entity.cartesian(), antenna_global, normal, element_area, wavelength, h))
    throw DegenerateGeometry("channel_coefficient: entity coincides with antenna");
  return h;
}

CMat plane_channels(const std::vector<EntityPosition>& entities, const std::vector<Vec3>& elements,
                    const Vec3& normal, double element_area, double wavelength, Execution exec) {
  const int n_elem = static_cast<int>(elements.size());
  const int n_ent = static_cast<int>(entities.size());
  std::vector<Vec3> points;
  points.reserve(n_ent);
  for (const auto& e : entities) points.push_back(e.cartesian());

  CMat out(n_elem, n_ent);
  std::vector<char> bad(static_cast<std::size_t>(n_elem) * n_ent, 0);
  const long total = static_cast<long>(n_elem) * n_ent;

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
      const int k = static_cast<int>(idx / n_elem), n = static_cast<int>(idx % n_elem);
      cdouble h;
      if (coefficient_kernel(points[k], elements[n], normal, element_area, wavelength, h)) out(n, k) = h;
      else bad[idx] = 1;
    }
  } else {
    for (long idx = 0; idx < total; ++idx) {
      const int k = static_cast<int>(idx / n_elem), n = static_cast<int>(idx % n_elem);
      cdouble h;
      if (coefficient_kernel(points[k], elements[n], normal, element_area, wavelength, h)) out(n, k) = h;
      else bad[idx] = 1;
    }
  }

  std::vector<int> offending;
  for (long idx = 0; idx < total; ++idx)
    if (bad[idx]) offending.push_back(static_cast<int>(idx % n_elem));
  if (!offending.empty())
    throw DegenerateGeometry("plane_channels: " + std::to_string(offending.size()) +
                                 " element(s) coincide with an entity",
                             offending);
  return out;
}

ChannelSet build_channels(const ArrayState& state, const std::vector<EntityPosition>& users,
                          const EntityPosition& target, cdouble eta, const GeometryConfig& config,
                          double wavelength, Execution exec) {
  if (static_cast<int>(state.tx_placements.size()) != config.n_tx ||
      static_cast<int>(state.rx_placements.size()) != config.n_rx)
    throw ContractViolation("build_channels: placement counts do not match the geometry config");

  std::vector<EntityPosition> tx_entities;
  tx_entities.reserve(users.size() + 1);
  tx_entities.push_back(target);
  tx_entities.insert(tx_entities.end(), users.begin(), users.end());

  const CMat tx = plane_channels(tx_entities, tx_positions(state), plane_normal(state.tx_rotation),
                                 config.element_area, wavelength, exec);
  const CMat rx = plane_channels({target}, rx_positions(state), plane_normal(state.rx_rotation),
                                 config.element_area, wavelength, exec);

  ChannelSet out;
  out.target_tx = tx.col(0);
  out.user_channels = tx.rightCols(static_cast<Eigen::Index>(users.size()));
  out.target_rx = rx.col(0);
  out.echo_gain = eta;
  out.echo_matrix = eta * out.target_rx * out.target_tx.transpose();
  return out;
}

}  // namespace rmaisac
