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
#include "rmaisac/geometry.hpp"

#include <random>

namespace rmaisac::fixtures {

inline double wavelength() { return kSpeedOfLight / 24e9; }

inline GeometryConfig geometry_config(int n_tx, int n_rx) {
  const double lambda = wavelength();
  GeometryConfig g;
  g.n_tx = n_tx;
  g.n_rx = n_rx;
  g.region_side = 80.0 * lambda;
  g.min_spacing = 0.5 * lambda;
  g.tx_center = Vec3(0.0, 0.0, 5.0 + g.region_side / 2.0);
  g.rx_center = Vec3(0.0, 0.0, 5.0 - g.region_side / 2.0);
  g.element_area = lambda * lambda / (4.0 * kPi);
  return g;
}

inline std::vector<LocalPlacement> random_placements(int count, double side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-side / 2.0, side / 2.0);
  std::vector<LocalPlacement> out;
  for (int i = 0; i < count; ++i) out.push_back({u(rng), u(rng)});
  return out;
}

inline ArrayState random_state(const GeometryConfig& g, std::mt19937_64& rng) {
  ArrayState s;
  s.tx_placements = random_placements(g.n_tx, g.region_side, rng);
  s.rx_placements = random_placements(g.n_rx, g.region_side, rng);
  s.tx_center = g.tx_center;
  s.rx_center = g.rx_center;
  return s;
}

inline EntityPosition default_target() { return {10.0, kPi / 3.0, kPi / 4.0}; }

inline std::vector<EntityPosition> random_users(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(15.0, 25.0), phi(-kPi / 2.0, kPi / 2.0);
  std::vector<EntityPosition> out;
  for (int k = 0; k < count; ++k) out.push_back({d(rng), kPi / 2.0, phi(rng)});
  return out;
}

/// Beamforming data at the default physical scale (24 GHz, -110 dBm noise,
/// T = 1000, eta = 1).
inline BeamformingData make_data(const GeometryConfig& g, const ArrayState& s,
                                 const std::vector<EntityPosition>& users, double power, double gamma_min) {
  const EntityPosition target = default_target();
  BeamformingData data;
  data.channels = build_channels(s, users, target, {1.0, 0.0}, g, wavelength());
  data.derivatives = target_channel_derivatives(s, target, g, wavelength());
  data.params = SensingParams::from(target, {1.0, 0.0});
  data.coherence_length = 1000;
  data.target_noise_power = dbm_to_watts(-110.0);
  data.user_noise_powers = RVec::Constant(static_cast<Eigen::Index>(users.size()), dbm_to_watts(-110.0));
  data.power_budget = power;
  data.gamma_min = gamma_min;
  return data;
}

inline BeamformingData random_data(int n_tx, int n_rx, int users, double power, double gamma_min,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const GeometryConfig g = geometry_config(n_tx, n_rx);
  const ArrayState s = random_state(g, rng);
  return make_data(g, s, random_users(users, rng), power, gamma_min);
}

}  // namespace rmaisac::fixtures
