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
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rmaisac;

namespace {

BeamSolution random_beam(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat w(n, k), a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) w(i, j) = cdouble(g(rng), g(rng));
    for (int j = 0; j < n; ++j) a(i, j) = cdouble(g(rng), g(rng));
  }
  return BeamSolution::from_parts(w, 0.1 * a * a.adjoint());
}

ChannelSet random_channels(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ChannelSet ch;
  ch.user_channels.resize(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) ch.user_channels(i, j) = cdouble(g(rng), g(rng));
  return ch;
}

}  // namespace

TEST(CommMetrics, SinrOfHandWorkedExample) {
  ChannelSet ch;
  ch.user_channels.resize(2, 2);
  ch.user_channels << cdouble(1, 0), cdouble(0, 1), cdouble(0, 0), cdouble(1, 0);
  CMat w(2, 2);
  w << cdouble(2, 0), cdouble(0, 0), cdouble(0, 0), cdouble(1, 0);
  const BeamSolution b = BeamSolution::from_parts(w, 0.5 * CMat::Identity(2, 2));
  // user 0: h = [1, 0]; signal |2|^2 = 4, interference 0, sensing 0.5, noise 1
  EXPECT_NEAR(sinr(ch, b, 0, 1.0), 4.0 / 1.5, 1e-14);
  // user 1: h = [i, 1]; signal |1|^2 = 1, interference |2i|^2 = 4, sensing 0.5 * 2, noise 1
  EXPECT_NEAR(sinr(ch, b, 1, 1.0), 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(sum_rate(ch, b, RVec::Ones(2)), std::log2(1.0 + 4.0 / 1.5) + std::log2(1.0 + 1.0 / 6.0), 1e-13);
}

TEST(CommMetrics, TotalCovarianceIsSumOfParts) {
  std::mt19937_64 rng(1);
  const BeamSolution b = random_beam(4, 3, rng);
  EXPECT_LT((b.total_covariance - b.beamformers * b.beamformers.adjoint() - b.sensing_covariance).norm(), 1e-12);
}

TEST(CommMetrics, SurrogateF1IsTightAtSinrAndBoundsTheRate) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelSet ch = random_channels(4, 3, rng);
    const BeamSolution b = random_beam(4, 3, rng);
    const RVec noise = RVec::Constant(3, 0.3);
    const double rate = sum_rate(ch, b, noise);
    const RVec rho = update_rho(ch, b, noise);
    EXPECT_NEAR(surrogate_f1(ch, b, rho, noise), rate, 1e-10 * std::max(1.0, rate));
    RVec other(3);
    for (int k = 0; k < 3; ++k) other[k] = u(rng);
    EXPECT_LE(surrogate_f1(ch, b, other, noise), rate + 1e-10);
  }
}

TEST(CommMetrics, SurrogateF2IsTightAtOptimalNu) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelSet ch = random_channels(3, 2, rng);
    const BeamSolution b = random_beam(3, 2, rng);
    const RVec noise = RVec::Constant(2, 0.5);
    const RVec rho = update_rho(ch, b, noise);
    const RVec nu = update_nu(ch, b, rho, noise);
    // f2 plus the rho offset equals f1 scaled to nats
    const double f1_nats = (surrogate_f1(ch, b, rho, noise) - surrogate_offset(rho)) * std::log(2.0);
    EXPECT_NEAR(surrogate_f2(ch, b, rho, nu, noise), f1_nats, 1e-10 * std::max(1.0, std::abs(f1_nats)));
    RVec other = nu;
    for (int k = 0; k < 2; ++k) other[k] *= 1.0 + 0.3 * g(rng);
    EXPECT_LE(surrogate_f2(ch, b, rho, other, noise), f1_nats + 1e-10);
  }
}
