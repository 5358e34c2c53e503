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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmaisac {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Loop execution for the data-parallel kernels. `serial` is the reference
/// path the tests compare the OpenMP path against.
enum class Execution { serial, parallel };

/// Two coincident points, or a quantity that needs a non-zero distance.
class DegenerateGeometry : public std::runtime_error {
public:
  DegenerateGeometry(const std::string& what, std::vector<int> indices = {})
      : std::runtime_error(what), indices_(std::move(indices)) {}
  const std::vector<int>& indices() const noexcept { return indices_; }

private:
  std::vector<int> indices_;
};

/// Schur complement of the Fisher information is numerically singular.
class UnobservableTarget : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Rank-one beam recovery hit a user with no beam power toward its own channel.
class RecoveryError : public std::runtime_error {
public:
  RecoveryError(const std::string& what, int user) : std::runtime_error(what), user_(user) {}
  int user() const noexcept { return user_; }

private:
  int user_;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace rmaisac
