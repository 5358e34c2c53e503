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

#include "rmaisac/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <ostream>

namespace rmaisac {

LmiProblem::LmiProblem(int num_vars)
    : num_vars_(num_vars), coeffs_(num_vars), cost_(RVec::Zero(num_vars)), scales_(RVec::Ones(num_vars)) {
  if (num_vars < 1) throw ContractViolation("LmiProblem: need at least one variable");
}

int LmiProblem::add_block(int dim) {
  if (dim < 1) throw ContractViolation("LmiProblem: block dimension must be >= 1");
  block_dims_.push_back(dim);
  return num_blocks() - 1;
}

LmiProblem::Key LmiProblem::key(int block, int row, int col) const {
  if (block < 0 || block >= num_blocks()) throw ContractViolation("LmiProblem: block index out of range");
  const int d = block_dims_[block];
  if (row < 0 || col < 0 || row >= d || col >= d) throw ContractViolation("LmiProblem: entry out of range");
  return {block, std::min(row, col), std::max(row, col)};
}

void LmiProblem::add_constant(int block, int row, int col, double value) {
  if (value != 0.0) constant_[key(block, row, col)] += value;
}

void LmiProblem::add_coefficient(int var, int block, int row, int col, double value) {
  if (var < 0 || var >= num_vars_) throw ContractViolation("LmiProblem: variable index out of range");
  if (value != 0.0) coeffs_[var][key(block, row, col)] += value;
}

void LmiProblem::set_cost(int var, double value) { cost_(var) = value; }

void LmiProblem::set_variable_scale(int var, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractViolation("LmiProblem: scale must be finite and > 0");
  scales_(var) = scale;
}

void LmiProblem::write_sparse(std::ostream& out) const {
  out.precision(17);
  for (int b = 0; b < num_blocks(); ++b) out << "block " << b << ' ' << block_dims_[b] << '\n';
  for (const auto& [k, v] : constant_)
    out << std::get<0>(k) << '.' << std::get<1>(k) << '.' << std::get<2>(k) << " -1 " << v << '\n';
  for (int i = 0; i < num_vars_; ++i)
    for (const auto& [k, v] : coeffs_[i])
      out << std::get<0>(k) << '.' << std::get<1>(k) << '.' << std::get<2>(k) << ' ' << i << ' ' << v << '\n';
  for (int i = 0; i < num_vars_; ++i)
    if (cost_(i) != 0.0) out << "cost " << i << ' ' << cost_(i) << '\n';
}

RMat LmiProblem::evaluate_block(int block, const RVec& y) const {
  const int d = block_dim(block);
  RMat f = RMat::Zero(d, d);
  auto put = [&](const Key& k, double v) {
    if (std::get<0>(k) != block) return;
    const int r = std::get<1>(k), c = std::get<2>(k);
    f(r, c) += v;
    if (r != c) f(c, r) += v;
  };
  for (const auto& [k, v] : constant_) put(k, v);
  for (int i = 0; i < num_vars_; ++i)
    for (const auto& [k, v] : coeffs_[i]) put(k, v * y(i));
  return f;
}

RVec LmiProblem::block_min_eigenvalues(const RVec& y) const {
  RVec out(num_blocks());
  for (int b = 0; b < num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<RMat> eig(evaluate_block(b, y), Eigen::EigenvaluesOnly);
    out(b) = eig.eigenvalues().minCoeff();
  }
  return out;
}

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

struct Entry {
  int row;
  int col;
  double value;
};

struct BlockData {
  int dim = 0;
  RMat constant;
  std::vector<int> vars;
  std::vector<std::vector<Entry>> entries;  // both triangles, per entry of `vars`
};

using BlockMats = std::vector<RMat>;

// Scaled standard-form data: min <C, X> s.t. <A_i, X> = b_i, X PSD, with
// C = F_0 and A_i = F_i. The LMI variable is y = -dual multiplier.
struct ScaledData {
  std::vector<BlockData> blocks;
  RVec b;
  double cost_scale = 1.0;
  int order = 0;
};

ScaledData scale_problem(const LmiProblem& p) {
  const int nb = p.num_blocks();
  const RVec& s = p.variable_scales();
  std::vector<RVec> diag_weight(nb);
  for (int b = 0; b < nb; ++b) diag_weight[b] = RVec::Zero(p.block_dim(b));
  for (const auto& [k, v] : p.constants())
    if (std::get<1>(k) == std::get<2>(k)) diag_weight[std::get<0>(k)](std::get<1>(k)) += std::abs(v);
  for (int i = 0; i < p.num_vars(); ++i)
    for (const auto& [k, v] : p.coefficients()[i])
      if (std::get<1>(k) == std::get<2>(k)) diag_weight[std::get<0>(k)](std::get<1>(k)) += s(i) * std::abs(v);

  std::vector<RVec> d(nb);
  for (int b = 0; b < nb; ++b) {
    d[b] = RVec::Ones(p.block_dim(b));
    for (int r = 0; r < p.block_dim(b); ++r)
      if (diag_weight[b](r) > 0.0) d[b](r) = 1.0 / std::sqrt(diag_weight[b](r));
  }

  ScaledData out;
  out.blocks.resize(nb);
  std::vector<std::vector<int>> slot(nb, std::vector<int>(p.num_vars(), -1));
  for (int b = 0; b < nb; ++b) {
    out.blocks[b].dim = p.block_dim(b);
    out.blocks[b].constant = RMat::Zero(p.block_dim(b), p.block_dim(b));
    out.order += p.block_dim(b);
  }
  for (const auto& [k, v] : p.constants()) {
    const auto [b, r, c] = k;
    const double w = v * d[b](r) * d[b](c);
    out.blocks[b].constant(r, c) += w;
    if (r != c) out.blocks[b].constant(c, r) += w;
  }
  for (int i = 0; i < p.num_vars(); ++i) {
    for (const auto& [k, v] : p.coefficients()[i]) {
      const auto [b, r, c] = k;
      auto& blk = out.blocks[b];
      if (slot[b][i] < 0) {
        slot[b][i] = static_cast<int>(blk.vars.size());
        blk.vars.push_back(i);
        blk.entries.emplace_back();
      }
      const double w = v * s(i) * d[b](r) * d[b](c);
      auto& list = blk.entries[slot[b][i]];
      list.push_back({r, c, w});
      if (r != c) list.push_back({c, r, w});
    }
  }
  RVec c = p.cost().cwiseProduct(s);
  out.cost_scale = c.cwiseAbs().maxCoeff();
  if (!(out.cost_scale > 0.0)) out.cost_scale = 1.0;
  out.b = c / out.cost_scale;
  return out;
}

double inner(const BlockMats& a, const BlockMats& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k].cwiseProduct(b[k]).sum();
  return acc;
}

double frobenius(const BlockMats& a) { return std::sqrt(inner(a, a)); }

// A(S)_i = sum over blocks of <A_i, S>.
RVec apply_a(const ScaledData& data, const BlockMats& s, int m) {
  RVec out = RVec::Zero(m);
  for (std::size_t b = 0; b < data.blocks.size(); ++b) {
    const auto& blk = data.blocks[b];
    for (std::size_t j = 0; j < blk.vars.size(); ++j) {
      double acc = 0.0;
      for (const auto& e : blk.entries[j]) acc += e.value * s[b](e.col, e.row);
      out(blk.vars[j]) += acc;
    }
  }
  return out;
}

// sum_i y_i A_i.
BlockMats apply_at(const ScaledData& data, const RVec& y) {
  BlockMats out(data.blocks.size());
  for (std::size_t b = 0; b < data.blocks.size(); ++b) {
    const auto& blk = data.blocks[b];
    out[b] = RMat::Zero(blk.dim, blk.dim);
    for (std::size_t j = 0; j < blk.vars.size(); ++j) {
      const double yj = y(blk.vars[j]);
      for (const auto& e : blk.entries[j]) out[b](e.row, e.col) += yj * e.value;
    }
  }
  return out;
}

// M_ij = tr(A_i X A_j Z^{-1}).
RMat schur_matrix(const ScaledData& data, const BlockMats& x, const BlockMats& zinv, int m, Execution exec) {
  RMat mat = RMat::Zero(m, m);
  for (std::size_t b = 0; b < data.blocks.size(); ++b) {
    const auto& blk = data.blocks[b];
    const int nv = static_cast<int>(blk.vars.size());
    if (nv == 0) continue;
    const RMat& xb = x[b];
    const RMat& zb = zinv[b];
    auto column = [&](int j) {
      RMat g = RMat::Zero(blk.dim, blk.dim);
      for (const auto& e : blk.entries[j]) g.noalias() += e.value * xb.col(e.row) * zb.row(e.col);
      const int vj = blk.vars[j];
      for (int i = 0; i < nv; ++i) {
        double acc = 0.0;
        for (const auto& e : blk.entries[i]) acc += e.value * g(e.col, e.row);
        mat(blk.vars[i], vj) += acc;
      }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
      for (int j = 0; j < nv; ++j) column(j);
    } else {
      for (int j = 0; j < nv; ++j) column(j);
    }
  }
  return 0.5 * (mat + mat.transpose());
}

BlockMats symmetric_inverse(const BlockMats& z, bool& ok) {
  BlockMats out(z.size());
  ok = true;
  for (std::size_t b = 0; b < z.size(); ++b) {
    Eigen::LLT<RMat> llt(z[b]);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return out;
    }
    RMat inv = llt.solve(RMat::Identity(z[b].rows(), z[b].cols()));
    out[b] = 0.5 * (inv + inv.transpose());
  }
  return out;
}

// Largest alpha with S + alpha * dS PSD (infinity when unbounded).
double max_step(const BlockMats& s, const BlockMats& ds) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < s.size(); ++b) {
    Eigen::LLT<RMat> llt(s[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    const RMat& l = llt.matrixL().toDenseMatrix();
    RMat t = l.triangularView<Eigen::Lower>().solve(ds[b]);
    t = l.triangularView<Eigen::Lower>().solve(t.transpose().eval());
    t = 0.5 * (t + t.transpose()).eval();
    const double lmin = Eigen::SelfAdjointEigenSolver<RMat>(t, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

BlockMats axpy(const BlockMats& a, double alpha, const BlockMats& b) {
  BlockMats out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + alpha * b[k];
  return out;
}

// Equilibrated Cholesky of the Schur matrix with a pivoted LDL^T fallback and
// iterative refinement of every solve.
class SchurSystem {
public:
  bool factor(const RMat& mat) {
    mat_ = mat;
    const RVec diag = mat.diagonal().cwiseAbs();
    const double floor = 1e-300 + 1e-30 * diag.maxCoeff();
    scale_ = diag.cwiseMax(floor).cwiseSqrt().cwiseInverse();
    const RMat eq = scale_.asDiagonal() * mat * scale_.asDiagonal();
    llt_.compute(eq);
    use_llt_ = llt_.info() == Eigen::Success;
    if (use_llt_) return true;
    ldlt_.compute(eq);
    if (ldlt_.info() == Eigen::Success) return true;
    // Near the boundary M can lose definiteness to rounding; a small ridge
    // restores it and iterative refinement against the unshifted M recovers
    // the accuracy.
    use_llt_ = true;
    for (double ridge = 1e-14; ridge <= 1e-6; ridge *= 100.0) {
      llt_.compute(eq + ridge * RMat::Identity(eq.rows(), eq.cols()));
      if (llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  RVec solve(const RVec& rhs) const {
    RVec x = raw(rhs);
    for (int k = 0; k < 3; ++k) x += raw(rhs - mat_ * x);
    return x;
  }

private:
  RVec raw(const RVec& rhs) const {
    const RVec b = scale_.cwiseProduct(rhs);
    const RVec z = use_llt_ ? RVec(llt_.solve(b)) : RVec(ldlt_.solve(b));
    return scale_.cwiseProduct(z);
  }

  RMat mat_;
  RVec scale_;
  Eigen::LLT<RMat> llt_;
  Eigen::LDLT<RMat> ldlt_;
  bool use_llt_ = true;
};

}  // namespace

SdpResult solve_lmi(const LmiProblem& problem, const SdpOptions& options) {
  const ScaledData data = scale_problem(problem);
  const int m = problem.num_vars();
  const int nb = static_cast<int>(data.blocks.size());
  const double n = static_cast<double>(data.order);

  BlockMats c(nb);
  for (int b = 0; b < nb; ++b) c[b] = data.blocks[b].constant;
  const double c_norm = frobenius(c);
  const double b_norm = data.b.norm();

  RVec a_norm2 = RVec::Zero(m);
  for (const auto& blk : data.blocks)
    for (std::size_t j = 0; j < blk.vars.size(); ++j)
      for (const auto& e : blk.entries[j]) a_norm2(blk.vars[j]) += e.value * e.value;
  double xi = std::max(10.0, std::sqrt(n));
  double eta = std::max({10.0, std::sqrt(n), c_norm});
  for (int i = 0; i < m; ++i) {
    const double an = std::sqrt(a_norm2(i));
    xi = std::max(xi, n * (1.0 + std::abs(data.b(i))) / (1.0 + an));
    eta = std::max(eta, an);
  }

  BlockMats x(nb), z(nb);
  for (int b = 0; b < nb; ++b) {
    x[b] = xi * RMat::Identity(data.blocks[b].dim, data.blocks[b].dim);
    z[b] = eta * RMat::Identity(data.blocks[b].dim, data.blocks[b].dim);
  }
  RVec y = RVec::Zero(m);  // standard-form multiplier; the LMI variable is -y

  SdpResult result;
  auto finish = [&](SdpStatus status, int iter) {
    result.status = status;
    result.iterations = iter;
    result.y = (-y).cwiseProduct(problem.variable_scales());
    result.objective = problem.cost().dot(result.y);
    return result;
  };

  // Best iterate by max(gap, dinf, scaled pinf); returned when progress stalls.
  double best_merit = std::numeric_limits<double>::infinity();
  RVec best_y = y;
  SdpResult best = result;
  int since_best = 0;
  int stalls = 0;
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const RVec ax = apply_a(data, x, m);
    const RVec rp = data.b - ax;
    BlockMats aty = apply_at(data, y);
    BlockMats rd(nb);
    for (int b = 0; b < nb; ++b) rd[b] = c[b] - z[b] - aty[b];
    const double pobj = inner(c, x);
    const double dobj = data.b.dot(y);
    const double xz = inner(x, z);
    result.relative_gap = std::max(std::abs(pobj - dobj), xz) / (1.0 + std::abs(pobj) + std::abs(dobj));
    result.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    result.dual_infeasibility = frobenius(rd) / (1.0 + c_norm);

    if (options.verbose)
      std::cerr << "sdp " << iter << " pobj " << pobj << " dobj " << dobj << " gap " << result.relative_gap
                << " pinf " << result.primal_infeasibility << " dinf " << result.dual_infeasibility << '\n';
    if (result.relative_gap < options.tolerance && result.primal_infeasibility < options.tolerance &&
        result.dual_infeasibility < options.tolerance)
      return finish(SdpStatus::optimal, iter);
    const double merit =
        std::max({result.relative_gap, result.dual_infeasibility,
                  result.primal_infeasibility * options.stall_tolerance / options.certificate_tolerance});
    if (merit < best_merit) {
      best_merit = merit;
      best_y = y;
      best = result;
      since_best = 0;
    } else {
      ++since_best;
    }
    // X with A(X) ~ 0 and <C, X> < 0 certifies that no y makes F(y) PSD.
    if (pobj < 0.0 && ax.norm() / -pobj < 1e-8 && frobenius(x) > 1e6 * xi)
      return finish(SdpStatus::infeasible, iter);
    if (iter == options.max_iterations || stalls >= 3 || (since_best >= 8 && best_merit < options.stall_tolerance))
      break;

    bool ok = false;
    const BlockMats zinv = symmetric_inverse(z, ok);
    if (!ok) {
      if (options.verbose) std::cerr << "    slack inverse failed\n";
      break;
    }
    const RMat mat = schur_matrix(data, x, zinv, m, options.execution);
    SchurSystem schur;
    if (!schur.factor(mat)) {
      if (options.verbose) std::cerr << "    schur factorization failed\n";
      break;
    }
    const double mu = xz / n;

    // X R_d Z^{-1}, fixed for both predictor and corrector.
    BlockMats xrz(nb);
    for (int b = 0; b < nb; ++b) xrz[b] = x[b] * rd[b] * zinv[b];

    auto direction = [&](double sigma, const BlockMats* corr, RVec& dy, BlockMats& dx, BlockMats& dz) {
      BlockMats base(nb);
      for (int b = 0; b < nb; ++b) {
        base[b] = sigma * mu * zinv[b] - x[b] - xrz[b];
        if (corr) base[b] -= (*corr)[b];
      }
      const RVec rhs = rp - apply_a(data, base, m);
      dy = schur.solve(rhs);
      const BlockMats atdy = apply_at(data, dy);
      dz.resize(nb);
      dx.resize(nb);
      for (int b = 0; b < nb; ++b) {
        dz[b] = rd[b] - atdy[b];
        RMat t = sigma * mu * zinv[b] - x[b] - x[b] * dz[b] * zinv[b];
        if (corr) t -= (*corr)[b];
        dx[b] = 0.5 * (t + t.transpose());
      }
    };

    RVec dy;
    BlockMats dx, dz;
    direction(0.0, nullptr, dy, dx, dz);
    const double ap = std::min(1.0, max_step(x, dx));
    const double ad = std::min(1.0, max_step(z, dz));
    const double xz_aff = inner(axpy(x, ap, dx), axpy(z, ad, dz));
    double sigma = std::pow(std::max(0.0, xz_aff) / xz, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    BlockMats corr(nb);
    for (int b = 0; b < nb; ++b) corr[b] = dx[b] * dz[b] * zinv[b];
    direction(sigma, &corr, dy, dx, dz);

    const double sp = max_step(x, dx);
    const double sd = max_step(z, dz);
    const double gamma = 0.9 + 0.09 * std::min({1.0, sp, sd});
    const double alpha_p = std::min(1.0, gamma * sp);
    const double alpha_d = std::min(1.0, gamma * sd);
    if (options.verbose)
      std::cerr << "    sigma " << sigma << " alpha_p " << alpha_p << " alpha_d " << alpha_d << '\n';
    stalls = (alpha_p < 1e-8 && alpha_d < 1e-8) ? stalls + 1 : 0;
    for (int b = 0; b < nb; ++b) {
      x[b] += alpha_p * dx[b];
      z[b] += alpha_d * dz[b];
      x[b] = 0.5 * (x[b] + x[b].transpose()).eval();
      z[b] = 0.5 * (z[b] + z[b].transpose()).eval();
    }
    y += alpha_d * dy;
    result.iterations = iter + 1;
  }

  const int iterations = result.iterations;
  y = best_y;
  result = best;
  return finish(best_merit < options.stall_tolerance ? SdpStatus::optimal : SdpStatus::numerical_failure,
                iterations);
}

int hermitian_param_count(int n) { return n * n; }

CMat hermitian_from_params(const RVec& params, int n) {
  if (params.size() != n * n) throw ContractViolation("hermitian_from_params: wrong parameter count");
  CMat h(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i) h(i, i) = params(p++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = cdouble(params(p), params(p + 1));
      h(j, i) = std::conj(h(i, j));
      p += 2;
    }
  return h;
}

RVec hermitian_to_params(const CMat& h) {
  const int n = static_cast<int>(h.rows());
  RVec params(n * n);
  int p = 0;
  for (int i = 0; i < n; ++i) params(p++) = h(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cdouble v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      params(p++) = v.real();
      params(p++) = v.imag();
    }
  return params;
}

RVec hermitian_trace_coefficients(const CMat& w) {
  const int n = static_cast<int>(w.rows());
  RVec a(n * n);
  int p = 0;
  for (int i = 0; i < n; ++i) a(p++) = w(i, i).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // H_ij W_ji + H_ji W_ij with H_ji = conj(H_ij).
      const cdouble s = w(j, i) + std::conj(w(i, j));
      a(p++) = s.real();
      a(p++) = -s.imag();
    }
  return a;
}

void add_hermitian_embedding(LmiProblem& problem, int first_var, int n, int block, int offset, double sign) {
  int p = first_var;
  for (int i = 0; i < n; ++i) {
    problem.add_coefficient(p, block, offset + i, offset + i, sign);
    problem.add_coefficient(p, block, offset + n + i, offset + n + i, sign);
    ++p;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      problem.add_coefficient(p, block, offset + i, offset + j, sign);
      problem.add_coefficient(p, block, offset + n + i, offset + n + j, sign);
      ++p;
      // [[A, -B], [B, A]] with B_ij = 1, B_ji = -1.
      problem.add_coefficient(p, block, offset + n + i, offset + j, sign);
      problem.add_coefficient(p, block, offset + i, offset + n + j, -sign);
      ++p;
    }
}

RMat real_embedding(const CMat& h) {
  const Eigen::Index n = h.rows();
  RMat e(2 * n, 2 * n);
  e << h.real(), -h.imag(), h.imag(), h.real();
  return e;
}

}  // namespace rmaisac
