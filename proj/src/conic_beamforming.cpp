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

#include "rmaisac/conic_beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmaisac {

void BeamformingData::validate() const {
  if (!(power_budget > 0.0)) throw ContractViolation("beamforming: power budget must be > 0");
  if (!(gamma_min >= 0.0)) throw ContractViolation("beamforming: SINR floor must be >= 0");
  if (user_noise_powers.size() != num_users())
    throw ContractViolation("beamforming: one noise power per user is required");
  if ((user_noise_powers.array() <= 0.0).any() || !(target_noise_power > 0.0))
    throw ContractViolation("beamforming: noise powers must be > 0");
  if (coherence_length < 1) throw ContractViolation("beamforming: coherence length must be >= 1");
  if (!channels.user_channels.allFinite() || !channels.target_tx.allFinite() || !channels.target_rx.allFinite())
    throw ContractViolation("beamforming: channel data is not finite");
}

namespace {

constexpr int kSym3 = 6;

int sym3_index(int a, int b) {
  if (a > b) std::swap(a, b);
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[a][b];
}

SdpLayout layout_of(const BeamformingData& data) { return {data.num_tx(), data.num_users()}; }

void add_hermitian_functional(LmiProblem& p, int first_var, const RVec& coeffs, int block, int row, int col,
                              double factor) {
  for (int i = 0; i < coeffs.size(); ++i)
    if (coeffs(i) != 0.0) p.add_coefficient(first_var + i, block, row, col, factor * coeffs(i));
}

RVec received_power_coefficients(const CVec& h) {
  return hermitian_trace_coefficients(h.conjugate() * h.transpose());
}

// Omega_k PSD, R_x - sum Omega_k PSD, tr R_x <= P and the SINR floors.
void add_common_constraints(LmiProblem& p, const BeamformingData& data, const SdpLayout& lay) {
  const int n = lay.n;
  const double var_scale = data.power_budget / n;
  for (int v = 0; v < lay.tail(); ++v) p.set_variable_scale(v, var_scale);

  for (int k = 0; k < lay.users; ++k) {
    const int b = p.add_block(2 * n);
    add_hermitian_embedding(p, lay.omega(k), n, b, 0, 1.0);
  }
  const int split = p.add_block(2 * n);
  add_hermitian_embedding(p, lay.covariance(), n, split, 0, 1.0);
  for (int k = 0; k < lay.users; ++k) add_hermitian_embedding(p, lay.omega(k), n, split, 0, -1.0);

  const int power = p.add_block(1);
  p.add_constant(power, 0, 0, data.power_budget);
  for (int i = 0; i < n; ++i) p.add_coefficient(lay.covariance() + i, power, 0, 0, -1.0);

  if (data.gamma_min > 0.0) {
    const double gain = (1.0 + data.gamma_min) / data.gamma_min;
    for (int k = 0; k < lay.users; ++k) {
      const RVec a = received_power_coefficients(data.channels.user(k));
      const int b = p.add_block(1);
      add_hermitian_functional(p, lay.omega(k), a, b, 0, 0, gain);
      add_hermitian_functional(p, lay.covariance(), a, b, 0, 0, -1.0);
      p.add_constant(b, 0, 0, -data.user_noise_powers(k));
    }
  }
}

FimLinearMap fim_map(const BeamformingData& data) {
  return fim_linear_map(data.channels, data.derivatives, data.params, data.coherence_length,
                        data.target_noise_power);
}

// 5x5 block T^T (J(R_x) - E S E^T) T with S = U (variables) or shift * I,
// E = [I_3; 0]. T = L^{-T} for the Cholesky factor L of J at the isotropic
// covariance, which keeps the block well conditioned despite the strong
// range / echo-phase coupling in J.
int add_fim_block(LmiProblem& p, const FimLinearMap& map, const BeamformingData& data, const SdpLayout& lay,
                  int u_first, double shift) {
  const int n = lay.n;
  const Mat5 j_ref = map.evaluate((data.power_budget / n) * CMat::Identity(n, n));
  Mat5 t;
  Eigen::LLT<Mat5> llt(j_ref);
  if (llt.info() == Eigen::Success) {
    t = llt.matrixL().solve(Mat5::Identity()).transpose();
  } else {
    t = j_ref.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal();
  }

  const int b = p.add_block(5);
  for (int r = 0; r < 5; ++r)
    for (int c = r; c < 5; ++c) {
      CMat w = CMat::Zero(n, n);
      for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k)
          if (t(i, r) != 0.0 && t(k, c) != 0.0) w += (t(i, r) * t(k, c)) * map.weights[i][k];
      add_hermitian_functional(p, lay.covariance(), hermitian_trace_coefficients(w), b, r, c, 1.0);
      for (int a = 0; a < 3; ++a) {
        if (shift != 0.0) p.add_constant(b, r, c, -shift * t(a, r) * t(a, c));
        if (u_first < 0) continue;
        for (int e = a; e < 3; ++e) {
          const double v = a == e ? t(a, r) * t(a, c) : t(a, r) * t(e, c) + t(e, r) * t(a, c);
          p.add_coefficient(u_first + sym3_index(a, e), b, r, c, -v);
        }
      }
    }
  return b;
}

// Schur complement and CRB at the isotropic covariance, for variable scales.
void reference_scales(const BeamformingData& data, const FimLinearMap& map, Mat3& schur, Vec3& schur_diag,
                      Vec3& crb_diag) {
  const int n = data.num_tx();
  const Mat5 j = map.evaluate((data.power_budget / n) * CMat::Identity(n, n));
  const FimBlocks blocks = FimBlocks::from_full(j, data.coherence_length, data.target_noise_power);
  schur = blocks.j11 - blocks.j12 * blocks.j22.ldlt().solve(blocks.j12.transpose());
  schur = 0.5 * (schur + schur.transpose()).eval();
  schur_diag = schur.diagonal().cwiseAbs();
  try {
    crb_diag = crb_matrix(blocks).diagonal().cwiseAbs();
  } catch (const UnobservableTarget&) {
    crb_diag = schur_diag.cwiseInverse();
  }
  for (int a = 0; a < 3; ++a) {
    if (!(schur_diag(a) > 0.0) || !std::isfinite(schur_diag(a))) schur_diag(a) = 1.0;
    if (!(crb_diag(a) > 0.0) || !std::isfinite(crb_diag(a))) crb_diag(a) = 1.0 / schur_diag(a);
  }
}

Mat3 sym3_from(const RVec& y, int first) {
  Mat3 m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(a, b) = y(first + sym3_index(a, b));
  return m;
}

CMat psd_part(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (h + h.adjoint()));
  const RVec lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
}

// Solver-level SINR shortfalls are closed exactly: each Omega_k is scaled
// by the least s_k >= 1 meeting its floor against the other users and R_0,
// and the added power is taken from R_0 (which only lowers interference).
// Applied when max s_k - 1 <= 1e-6 and R_0 can absorb the power.
void restore_sinr_floors(std::vector<CMat>& omegas, CMat& r0, const BeamformingData& data) {
  const int users = data.num_users();
  if (data.gamma_min == 0.0 || users == 0) return;
  const double target = data.gamma_min * (1.0 + 1e-12);
  RMat a(users, users);
  RVec b(users);
  for (int k = 0; k < users; ++k) {
    const CVec h = data.channels.user(k);
    for (int j = 0; j < users; ++j) a(k, j) = (h.transpose() * omegas[j] * h.conjugate()).value().real();
    b(k) = (h.transpose() * r0 * h.conjugate()).value().real() + data.user_noise_powers(k);
    if (!(a(k, k) > 0.0)) return;
  }
  RVec s = RVec::Ones(users);
  for (int it = 0; it < 100; ++it)
    for (int k = 0; k < users; ++k) {
      double interference = b(k);
      for (int j = 0; j < users; ++j)
        if (j != k) interference += s(j) * a(k, j);
      s(k) = std::max(1.0, target * interference / a(k, k));
    }
  if (s.maxCoeff() == 1.0 || s.maxCoeff() > 1.0 + 1e-6) return;
  double added = 0.0;
  for (int k = 0; k < users; ++k) added += (s(k) - 1.0) * omegas[k].trace().real();
  const double sensing = r0.trace().real();
  if (added > sensing) return;
  for (int k = 0; k < users; ++k) omegas[k] *= s(k);
  r0 *= 1.0 - added / sensing;
}

// Removes solver-level negative eigenvalues: each Omega_k is projected onto
// the PSD cone and R_x is raised just enough that R_x - sum Omega_k is PSD.
void fill_matrices(SdpSolveReport& report, const RVec& y, const SdpLayout& lay, const BeamformingData& data) {
  const int n = lay.n;
  report.omegas.clear();
  CMat sum = CMat::Zero(n, n);
  for (int k = 0; k < lay.users; ++k) {
    report.omegas.push_back(psd_part(hermitian_from_params(y.segment(lay.omega(k), n * n), n)));
    sum += report.omegas.back();
  }
  CMat r0 = psd_part(hermitian_from_params(y.segment(lay.covariance(), n * n), n) - sum);
  restore_sinr_floors(report.omegas, r0, data);
  for (const CMat& o : report.omegas) r0 += o;
  report.total_covariance = 0.5 * (r0 + r0.adjoint());
}

void fill_status(SdpSolveReport& report, const SdpResult& result) {
  report.status = result.status;
  report.iterations = result.iterations;
  report.solver_tolerance =
      std::max({result.relative_gap, result.primal_infeasibility, result.dual_infeasibility});
}

}  // namespace

LmiProblem build_sensing_lmi(const SensingSdpSpec& spec) {
  const BeamformingData& data = spec.data;
  data.validate();
  const SdpLayout lay = layout_of(data);
  const int u = lay.tail(), v = lay.tail() + kSym3;
  LmiProblem p(lay.tail() + 2 * kSym3);
  add_common_constraints(p, data, lay);

  const FimLinearMap map = fim_map(data);
  Mat3 schur_ref;
  Vec3 schur_diag, crb_diag;
  reference_scales(data, map, schur_ref, schur_diag, crb_diag);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      p.set_variable_scale(u + sym3_index(a, b), std::sqrt(schur_diag(a) * schur_diag(b)));
      p.set_variable_scale(v + sym3_index(a, b), std::sqrt(crb_diag(a) * crb_diag(b)));
    }

  add_fim_block(p, map, data, lay, u, 0.0);
  // [[V, I], [I, U]] PSD  <=>  V >= U^{-1}, congruence diag(L, L^{-T}) for the
  // Cholesky factor L of the reference Schur complement.
  Mat3 l = schur_diag.cwiseSqrt().asDiagonal();
  Eigen::LLT<Mat3> llt(schur_ref);
  if (llt.info() == Eigen::Success) l = llt.matrixL();
  const Mat3 left = l;
  const Mat3 right = l.transpose().inverse();
  const Mat3 cross = left.transpose() * right;
  const int epi = p.add_block(6);
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) {
      for (int a = 0; a < 3; ++a)
        for (int e = a; e < 3; ++e) {
          const double cv = a == e ? left(a, r) * left(a, c) : left(a, r) * left(e, c) + left(e, r) * left(a, c);
          const double cu =
              a == e ? right(a, r) * right(a, c) : right(a, r) * right(e, c) + right(e, r) * right(a, c);
          p.add_coefficient(v + sym3_index(a, e), epi, r, c, cv);
          p.add_coefficient(u + sym3_index(a, e), epi, 3 + r, 3 + c, cu);
        }
    }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.add_constant(epi, r, 3 + c, cross(r, c));
  for (int a = 0; a < 3; ++a) p.set_cost(v + sym3_index(a, a), 1.0);
  return p;
}

LmiProblem build_comm_lmi(const CommSdpSpec& spec) {
  const BeamformingData& data = spec.data;
  data.validate();
  if (!(spec.crb_budget > 0.0)) throw ContractViolation("comm sdp: CRB budget must be > 0");
  if (spec.rho.size() != data.num_users() || spec.nu.size() != data.num_users())
    throw ContractViolation("comm sdp: rho and nu need one entry per user");
  if (!spec.rho.allFinite() || !spec.nu.allFinite() || (spec.rho.array() < 0.0).any() ||
      (spec.nu.array() < 0.0).any())
    throw ContractViolation("comm sdp: rho and nu must be finite and non-negative");

  const SdpLayout lay = layout_of(data);
  const int t = lay.tail();
  LmiProblem p(lay.tail() + lay.users);
  add_common_constraints(p, data, lay);

  for (int k = 0; k < lay.users; ++k) {
    const CVec h = data.channels.user(k);
    const double scale = std::sqrt(data.power_budget) * h.norm();
    if (scale > 0.0) p.set_variable_scale(t + k, scale);
    // [[h^T Omega_k h^*, t_k], [t_k, 1]] PSD  <=>  t_k^2 <= h^T Omega_k h^*
    const int b = p.add_block(2);
    const RVec a = received_power_coefficients(h);
    add_hermitian_functional(p, lay.omega(k), a, b, 0, 0, 1.0);
    p.add_coefficient(t + k, b, 0, 1, 1.0);
    p.add_constant(b, 1, 1, 1.0);

    const double w = 1.0 + spec.rho(k);
    p.set_cost(t + k, -2.0 * w * spec.nu(k));
    const double penalty = w * spec.nu(k) * spec.nu(k);
    for (int i = 0; i < a.size(); ++i)
      if (a(i) != 0.0) p.set_cost(lay.covariance() + i, p.cost()(lay.covariance() + i) + penalty * a(i));
  }

  if (std::isfinite(spec.crb_budget)) add_fim_block(p, fim_map(data), data, lay, -1, 3.0 / spec.crb_budget);
  return p;
}

double minimum_sinr_power(const BeamformingData& data, double stop_above) {
  data.validate();
  const int n = data.num_tx(), users = data.num_users();
  if (users == 0 || data.gamma_min == 0.0) return 0.0;
  // Dual uplink powers solve lambda_k (1 + 1/Gamma) c_k^H A^{-1} c_k = 1 with
  // A = I + sum_j lambda_j c_j c_j^H and c_k = h_k^*; the least power is
  // sum_k lambda_k sigma_k^2. Fixed-point iterates from zero increase
  // monotonically towards the solution, then Newton finishes it.
  const CMat c = data.channels.user_channels.conjugate();
  const double target = data.gamma_min / (1.0 + data.gamma_min);
  const double inf = std::numeric_limits<double>::infinity();
  auto inverse_products = [&](const RVec& lambda) {
    CMat a = CMat::Identity(n, n);
    for (int j = 0; j < users; ++j) a += lambda(j) * c.col(j) * c.col(j).adjoint();
    return CMat(c.adjoint() * Eigen::LDLT<CMat>(a).solve(c));
  };
  RVec lambda = RVec::Zero(users);
  for (int it = 0; it < 200; ++it) {
    const CMat g = inverse_products(lambda);
    for (int k = 0; k < users; ++k) {
      if (!(g(k, k).real() > 0.0)) return inf;
      lambda(k) = target / g(k, k).real();
    }
    if (!(lambda.dot(data.user_noise_powers) <= stop_above)) return inf;
  }
  for (int it = 0; it < 100; ++it) {
    const CMat g = inverse_products(lambda);
    RVec residual(users);
    RMat jac(users, users);
    for (int k = 0; k < users; ++k) {
      residual(k) = lambda(k) * g(k, k).real() - target;
      for (int j = 0; j < users; ++j) jac(k, j) = (k == j ? g(k, k).real() : 0.0) - lambda(k) * std::norm(g(k, j));
    }
    if (residual.cwiseAbs().maxCoeff() <= 1e-13) return lambda.dot(data.user_noise_powers);
    const RVec step = jac.fullPivLu().solve(residual);
    double t = 1.0;
    while (t > 1e-12 && ((lambda - t * step).array() <= 0.0).any()) t *= 0.5;
    lambda -= t * step;
    if (!lambda.allFinite()) return inf;
  }
  return lambda.dot(data.user_noise_powers);
}

namespace {

// A stalled solve whose SINR floors need more than the power budget is
// reported as infeasible.
void classify_failure(SdpSolveReport& report, const BeamformingData& data) {
  if (report.status != SdpStatus::numerical_failure || data.gamma_min == 0.0 || data.num_users() == 0) return;
  if (minimum_sinr_power(data, data.power_budget * (1.0 + 1e-6)) > data.power_budget * (1.0 + 1e-6))
    report.status = SdpStatus::infeasible;
}

}  // namespace

SdpSolveReport solve_sensing_sdp(const SensingSdpSpec& spec, const SdpOptions& options) {
  if (spec.data.gamma_min == 0.0 && spec.data.num_users() > 0) {
    spec.data.validate();
    SensingSdpSpec reduced = spec;
    reduced.data.channels.user_channels.resize(spec.data.num_tx(), 0);
    reduced.data.user_noise_powers.resize(0);
    SdpSolveReport report = solve_sensing_sdp(reduced, options);
    if (report.status == SdpStatus::optimal)
      report.omegas.assign(spec.data.num_users(), CMat::Zero(spec.data.num_tx(), spec.data.num_tx()));
    return report;
  }
  const LmiProblem p = build_sensing_lmi(spec);
  const SdpResult result = solve_lmi(p, options);
  SdpSolveReport report;
  fill_status(report, result);
  classify_failure(report, spec.data);
  if (result.status != SdpStatus::optimal) return report;
  const SdpLayout lay = layout_of(spec.data);
  fill_matrices(report, result.y, lay, spec.data);
  report.auxiliary = sym3_from(result.y, lay.tail());
  // Objective at the returned R_x, where the best U is the Schur complement;
  // tr V only bounds it to solver tolerance.
  try {
    const BeamformingData& d = spec.data;
    report.objective = trace_crb(fim_blocks(d.channels, d.derivatives, report.total_covariance, d.params,
                                            d.coherence_length, d.target_noise_power));
  } catch (const UnobservableTarget&) {
    report.objective = result.objective;
  }
  return report;
}

SdpSolveReport solve_comm_sdp(const CommSdpSpec& spec, const SdpOptions& options) {
  const LmiProblem p = build_comm_lmi(spec);
  const SdpResult result = solve_lmi(p, options);
  SdpSolveReport report;
  fill_status(report, result);
  classify_failure(report, spec.data);
  if (result.status != SdpStatus::optimal) return report;
  const SdpLayout lay = layout_of(spec.data);
  fill_matrices(report, result.y, lay, spec.data);
  report.epigraph = result.y.segment(lay.tail(), lay.users);
  double constant = 0.0;
  for (int k = 0; k < lay.users; ++k)
    constant += (1.0 + spec.rho(k)) * spec.nu(k) * spec.nu(k) * spec.data.user_noise_powers(k);
  report.objective = -result.objective - constant;
  return report;
}

double comm_objective(const BeamSolution& solution, const CommSdpSpec& spec) {
  return surrogate_f2(spec.data.channels, solution, spec.rho, spec.nu, spec.data.user_noise_powers);
}

BeamSolution rank_one_recovery(const SdpSolveReport& report, const ChannelSet& channels,
                               DegenerateBeamPolicy policy) {
  if (report.status != SdpStatus::optimal) throw ContractViolation("rank_one_recovery: report is not optimal");
  const int k_users = channels.num_users();
  if (static_cast<int>(report.omegas.size()) != k_users)
    throw ContractViolation("rank_one_recovery: one Omega per user is required");
  const CMat& r = report.total_covariance;
  const Eigen::Index n = r.rows();
  const double power = std::max(r.trace().real(), 0.0);

  CMat w = CMat::Zero(n, k_users);
  for (int k = 0; k < k_users; ++k) {
    const CVec h = channels.user(k);
    const CVec oh = report.omegas[k] * h.conjugate();
    const double gain = (h.transpose() * oh).value().real();
    if (!(gain > 1e-12 * h.squaredNorm() * power)) {
      if (policy == DegenerateBeamPolicy::raise)
        throw RecoveryError("rank_one_recovery: user " + std::to_string(k) + " has no beam power", k);
      continue;
    }
    w.col(k) = oh / std::sqrt(gain);
  }
  BeamSolution out;
  out.beamformers = w;
  out.total_covariance = r;
  out.sensing_covariance = r - w * w.adjoint();
  out.sensing_covariance = 0.5 * (out.sensing_covariance + out.sensing_covariance.adjoint()).eval();
  return out;
}

bool FeasibilityReport::feasible(double tolerance, double crb_budget) const {
  if (power_excess > tolerance || psd_violation > tolerance || worst_sinr_shortfall > tolerance) return false;
  if (std::isfinite(crb_budget) && crb_excess > tolerance * crb_budget) return false;
  return true;
}

FeasibilityReport audit_solution(const BeamSolution& solution, const BeamformingData& data, double crb_budget) {
  FeasibilityReport rep;
  const CMat& r = solution.total_covariance;
  rep.power_excess = std::max(0.0, r.trace().real() - data.power_budget);
  const CMat residual = r - solution.beamformers * solution.beamformers.adjoint();
  const double lmin =
      Eigen::SelfAdjointEigenSolver<CMat>(0.5 * (residual + residual.adjoint()), Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  rep.psd_violation = std::max(0.0, -lmin);
  rep.consistency_error = (solution.sensing_covariance - residual).cwiseAbs().maxCoeff();

  const RVec gamma = sinrs(data.channels, solution, data.user_noise_powers);
  rep.sinr_shortfall = (data.gamma_min - gamma.array()).cwiseMax(0.0).matrix();
  rep.worst_sinr_shortfall = rep.sinr_shortfall.size() ? rep.sinr_shortfall.maxCoeff() : 0.0;

  try {
    rep.trace_crb = trace_crb(fim_blocks(data.channels, data.derivatives, r, data.params, data.coherence_length,
                                         data.target_noise_power));
  } catch (const UnobservableTarget&) {
    rep.trace_crb = std::numeric_limits<double>::infinity();
  }
  if (std::isfinite(crb_budget)) rep.crb_excess = std::max(0.0, rep.trace_crb - crb_budget);
  return rep;
}

}  // namespace rmaisac
