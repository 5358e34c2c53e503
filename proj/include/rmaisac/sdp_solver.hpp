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

#include <iosfwd>
#include <map>
#include <tuple>
#include <vector>

namespace rmaisac {

/// minimize c^T y  subject to  F_0 + sum_i y_i F_i  PSD, block by block.
///
/// Every F_i is symmetric. Coefficients are given for one triangle and
/// mirrored; repeated additions to the same slot accumulate.
class LmiProblem {
public:
  explicit LmiProblem(int num_vars);

  int num_vars() const { return num_vars_; }
  int num_blocks() const { return static_cast<int>(block_dims_.size()); }
  int block_dim(int block) const { return block_dims_.at(block); }
  const std::vector<int>& block_dims() const { return block_dims_; }

  int add_block(int dim);
  void add_constant(int block, int row, int col, double value);
  void add_coefficient(int var, int block, int row, int col, double value);
  void set_cost(int var, double value);
  const RVec& cost() const { return cost_; }

  /// Typical magnitude of y_var. Only used to condition the solve.
  void set_variable_scale(int var, double scale);
  const RVec& variable_scales() const { return scales_; }

  /// Sparse dump, one line per nonzero of the upper triangle:
  ///   "<block>.<row>.<col> <var> <value>" with var = -1 for F_0,
  /// followed by "cost <var> <value>" lines. Blocks are listed first as
  /// "block <id> <dim>".
  void write_sparse(std::ostream& out) const;

  /// F_0 + sum_i y_i F_i for one block.
  RMat evaluate_block(int block, const RVec& y) const;
  /// Smallest eigenvalue of each block at y.
  RVec block_min_eigenvalues(const RVec& y) const;

  using Key = std::tuple<int, int, int>;  // block, row, col with row <= col
  const std::map<Key, double>& constants() const { return constant_; }
  const std::vector<std::map<Key, double>>& coefficients() const { return coeffs_; }

private:
  Key key(int block, int row, int col) const;

  int num_vars_;
  std::vector<int> block_dims_;
  std::map<Key, double> constant_;
  std::vector<std::map<Key, double>> coeffs_;
  RVec cost_;
  RVec scales_;
};

enum class SdpStatus { optimal, infeasible, numerical_failure };

const char* to_string(SdpStatus status);

struct SdpOptions {
  double tolerance = 1e-8;
  /// Gap and LMI residual at which a stalled solve is still reported optimal.
  double stall_tolerance = 1e-5;
  /// Equality residual of the multiplier X tolerated in that case. X only
  /// certifies optimality; the returned y is feasible through the LMI residual.
  double certificate_tolerance = 1e-3;
  int max_iterations = 120;
  Execution execution = Execution::parallel;
  /// Per-iteration progress on stderr.
  bool verbose = false;
};

struct SdpResult {
  SdpStatus status = SdpStatus::numerical_failure;
  RVec y;
  double objective = 0.0;
  int iterations = 0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
};

/// Infeasible-start primal-dual interior point method (HKM direction with a
/// Mehrotra predictor-corrector). The problem is rescaled by the variable
/// scales and a diagonal congruence per block before solving.
SdpResult solve_lmi(const LmiProblem& problem, const SdpOptions& options = {});

/// Hermitian N x N matrices are parameterized by N^2 reals: the diagonal,
/// then (Re, Im) of each upper entry (i < j) in row-major order.
int hermitian_param_count(int n);
CMat hermitian_from_params(const RVec& params, int n);
RVec hermitian_to_params(const CMat& h);

/// Coefficients a with Re tr(H W) = a^T params(H), for Hermitian H.
RVec hermitian_trace_coefficients(const CMat& w);

/// Adds sign * [[Re H, -Im H], [Im H, Re H]] at (offset, offset) of `block`,
/// where H is the Hermitian matrix held in variables first_var..first_var+N^2-1.
void add_hermitian_embedding(LmiProblem& problem, int first_var, int n, int block, int offset,
                             double sign);

/// Real 2N x 2N embedding of a Hermitian matrix. PSD iff the matrix is PSD.
RMat real_embedding(const CMat& h);

}  // namespace rmaisac
