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

#include "rmaisac/estimation.hpp"

#include <cmath>

namespace rmaisac {

namespace {

// d p / d(d0, theta0, phi0) as columns.
Mat3 position_jacobian(const EntityPosition& t) {
  const double st = std::sin(t.elevation), ct = std::cos(t.elevation);
  const double sp = std::sin(t.azimuth), cp = std::cos(t.azimuth);
  const double d = t.distance;
  Mat3 jac;
  jac.col(0) << st * cp, st * sp, ct;
  jac.col(1) << d * ct * cp, d * ct * sp, -d * st;
  jac.col(2) << -d * st * sp, d * st * cp, 0.0;
  return jac;
}

// h = sqrt(A / 4pi) |s.u|^(1/2) |s|^(-3/2) exp(-j k |s|), s = p - a, so
// dh/dp = h * (u / (2 s.u) - 3 s / (2 |s|^2) - j k s / |s|).
void plane_derivatives(const Vec3& p, const Mat3& jac, const std::vector<Vec3>& elements,
                       const Vec3& normal, double area, double wavelength, std::array<CVec, 3>& out) {
  const int n = static_cast<int>(elements.size());
  for (auto& v : out) v.resize(n);
  const double k = kTwoPi / wavelength;
  for (int i = 0; i < n; ++i) {
    const Vec3 s = p - elements[i];
    const double dist = s.norm();
    const double proj = s.dot(normal);
    if (dist == 0.0 || proj == 0.0)
      throw DegenerateGeometry("target_channel_derivatives: element " + std::to_string(i) +
                                   " has no gradient toward the target",
                               {i});
    const double magnitude = std::sqrt(area / (4.0 * kPi) * std::abs(proj)) / std::pow(dist, 1.5);
    const cdouble h = std::polar(magnitude, -k * dist);
    const Vec3 log_mag_grad = normal / (2.0 * proj) - 1.5 * s / (dist * dist);
    const Vec3 phase_grad = k * s / dist;
    for (int q = 0; q < 3; ++q) {
      const double re = log_mag_grad.dot(jac.col(q));
      const double im = -phase_grad.dot(jac.col(q));
      out[q](i) = h * cdouble(re, im);
    }
  }
}

void check_inputs(const CMat& covariance, Eigen::Index n_tx, int coherence_length, double noise_power) {
  if (covariance.rows() != n_tx || covariance.cols() != n_tx)
    throw ContractViolation("fim: covariance must be N_t x N_t");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw ContractViolation("fim: covariance is not Hermitian");
  if (coherence_length < 1) throw ContractViolation("fim: coherence_length must be >= 1");
  if (!(noise_power > 0.0)) throw ContractViolation("fim: noise_power must be > 0");
}

// d(g h^T)/dp = g_p h^T + g h_p^T, stored as two rank-one (left, right) terms.
struct RankTwo {
  std::array<CVec, 2> left;
  std::array<CVec, 2> right;
};

std::array<RankTwo, 3> derivative_factors(const ChannelSet& ch, const TargetDerivatives& d) {
  std::array<RankTwo, 3> out;
  for (int p = 0; p < 3; ++p) {
    out[p].left = {d.rx[p], ch.target_rx};
    out[p].right = {ch.target_tx, d.tx[p]};
  }
  return out;
}

CMat dense_derivative(const RankTwo& f) {
  return f.left[0] * f.right[0].transpose() + f.left[1] * f.right[1].transpose();
}

}  // namespace

TargetDerivatives target_channel_derivatives(const ArrayState& state, const EntityPosition& target,
                                             const GeometryConfig& config, double wavelength) {
  const Vec3 p = target.cartesian();
  const Mat3 jac = position_jacobian(target);
  TargetDerivatives out;
  plane_derivatives(p, jac, tx_positions(state), plane_normal(state.tx_rotation), config.element_area,
                    wavelength, out.tx);
  plane_derivatives(p, jac, rx_positions(state), plane_normal(state.rx_rotation), config.element_area,
                    wavelength, out.rx);
  return out;
}

Mat5 FimBlocks::full() const {
  Mat5 j;
  j.topLeftCorner<3, 3>() = j11;
  j.topRightCorner<3, 2>() = j12;
  j.bottomLeftCorner<2, 3>() = j12.transpose();
  j.bottomRightCorner<2, 2>() = j22;
  return j;
}

FimBlocks FimBlocks::from_full(const Mat5& j, int coherence_length, double noise_power) {
  FimBlocks b;
  b.j11 = j.topLeftCorner<3, 3>();
  b.j12 = j.topRightCorner<3, 2>();
  b.j22 = j.bottomRightCorner<2, 2>();
  b.coherence_length = coherence_length;
  b.noise_power = noise_power;
  return b;
}

FimBlocks fim_blocks(const ChannelSet& ch, const TargetDerivatives& d, const CMat& covariance,
                     const SensingParams& params, int coherence_length, double noise_power) {
  check_inputs(covariance, ch.target_tx.size(), coherence_length, noise_power);
  const cdouble eta = params.eta();
  const double base = 2.0 * coherence_length / noise_power;
  const double c = base * std::norm(eta);
  const auto factors = derivative_factors(ch, d);

  // R y^* for every right factor; tr(x_a y_a^T R y_b^* x_b^H) = (x_b^H x_a)(y_a^T R y_b^*).
  std::array<std::array<CVec, 2>, 3> r_conj;
  for (int p = 0; p < 3; ++p)
    for (int b = 0; b < 2; ++b) r_conj[p][b] = covariance * factors[p].right[b].conjugate();
  const CVec r_h = covariance * ch.target_tx.conjugate();

  Mat5 j = Mat5::Zero();
  for (int p = 0; p < 3; ++p) {
    for (int q = p; q < 3; ++q) {
      cdouble acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          acc += factors[p].left[b].dot(factors[q].left[a]) *
                 (factors[q].right[a].transpose() * r_conj[p][b]).value();
      j(p, q) = j(q, p) = c * acc.real();
    }
    cdouble cross = 0.0;
    for (int b = 0; b < 2; ++b)
      cross += factors[p].left[b].dot(ch.target_rx) *
               (ch.target_tx.transpose() * r_conj[p][b]).value();
    const cdouble w = std::conj(eta) * cross;
    j(p, 3) = j(3, p) = base * w.real();
    j(p, 4) = j(4, p) = base * (cdouble(0.0, 1.0) * w).real();
  }
  const double eta_eta = base * ch.target_rx.squaredNorm() * (ch.target_tx.transpose() * r_h).value().real();
  j(3, 3) = j(4, 4) = eta_eta;
  return FimBlocks::from_full(j, coherence_length, noise_power);
}

FimBlocks fim_blocks_dense(const ChannelSet& ch, const TargetDerivatives& d, const CMat& covariance,
                           const SensingParams& params, int coherence_length, double noise_power) {
  check_inputs(covariance, ch.target_tx.size(), coherence_length, noise_power);
  const cdouble eta = params.eta();
  const double base = 2.0 * coherence_length / noise_power;
  const auto factors = derivative_factors(ch, d);
  std::array<CMat, 3> deriv;
  for (int p = 0; p < 3; ++p) deriv[p] = dense_derivative(factors[p]);
  const CMat gh = ch.target_rx * ch.target_tx.transpose();

  Mat5 j = Mat5::Zero();
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q)
      j(p, q) = base * std::norm(eta) * (deriv[q] * covariance * deriv[p].adjoint()).trace().real();
    const cdouble t = (gh * covariance * deriv[p].adjoint()).trace();
    j(p, 3) = j(3, p) = base * (std::conj(eta) * t).real();
    j(p, 4) = j(4, p) = base * (cdouble(0.0, 1.0) * std::conj(eta) * t).real();
  }
  j(3, 3) = j(4, 4) = base * (gh * covariance * gh.adjoint()).trace().real();
  return FimBlocks::from_full(j, coherence_length, noise_power);
}

Mat5 FimLinearMap::evaluate(const CMat& covariance) const {
  Mat5 j;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      j(a, b) = (covariance.cwiseProduct(weights[a][b].transpose())).sum().real();
  return j;
}

FimLinearMap fim_linear_map(const ChannelSet& ch, const TargetDerivatives& d, const SensingParams& params,
                            int coherence_length, double noise_power) {
  if (coherence_length < 1) throw ContractViolation("fim: coherence_length must be >= 1");
  if (!(noise_power > 0.0)) throw ContractViolation("fim: noise_power must be > 0");
  const cdouble eta = params.eta();
  const double base = 2.0 * coherence_length / noise_power;
  const double c = base * std::norm(eta);
  const auto factors = derivative_factors(ch, d);
  const Eigen::Index nt = ch.target_tx.size();
  auto hermitian = [](const CMat& w) -> CMat { return 0.5 * (w + w.adjoint()); };

  FimLinearMap map;
  map.coherence_length = coherence_length;
  map.noise_power = noise_power;
  for (auto& row : map.weights)
    for (auto& w : row) w = CMat::Zero(nt, nt);

  for (int p = 0; p < 3; ++p) {
    for (int q = p; q < 3; ++q) {
      CMat w = CMat::Zero(nt, nt);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          w += factors[p].left[b].dot(factors[q].left[a]) * factors[p].right[b].conjugate() *
               factors[q].right[a].transpose();
      map.weights[p][q] = map.weights[q][p] = hermitian(c * w);
    }
    CMat cross = CMat::Zero(nt, nt);
    for (int b = 0; b < 2; ++b)
      cross += factors[p].left[b].dot(ch.target_rx) * factors[p].right[b].conjugate() *
               ch.target_tx.transpose();
    cross *= base * std::conj(eta);
    map.weights[p][3] = map.weights[3][p] = hermitian(cross);
    map.weights[p][4] = map.weights[4][p] = hermitian(cdouble(0.0, 1.0) * cross);
  }
  const CMat ee = base * ch.target_rx.squaredNorm() * ch.target_tx.conjugate() * ch.target_tx.transpose();
  map.weights[3][3] = map.weights[4][4] = hermitian(ee);
  return map;
}

Mat3 crb_matrix(const FimBlocks& blocks) {
  if (!(blocks.j22(0, 0) > 0.0) || !(blocks.j22(1, 1) > 0.0))
    throw UnobservableTarget("crb: eta block of the FIM is not positive");
  const Eigen::LDLT<Eigen::Matrix2d> j22(blocks.j22);
  Mat3 schur = blocks.j11 - blocks.j12 * j22.solve(blocks.j12.transpose());
  schur = 0.5 * (schur + schur.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(schur, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin < 1e-14 * lmax || !std::isfinite(lmax))
    throw UnobservableTarget("crb: Schur complement of the FIM is singular");
  Mat3 crb = schur.ldlt().solve(Mat3::Identity());
  return 0.5 * (crb + crb.transpose());
}

double trace_crb(const FimBlocks& blocks) { return crb_matrix(blocks).trace(); }

Vec3 rcrb_per_param(const FimBlocks& blocks) {
  return crb_matrix(blocks).diagonal().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace rmaisac
