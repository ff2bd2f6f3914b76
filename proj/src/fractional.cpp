// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License.  You may obtain a copy
// of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  See the
// License for the specific language governing permissions and limitations
// under the License.
#include "fbe/fractional.hpp"

#include <array>
#include <cmath>

#include "fbe/errors.hpp"

namespace fbe {

double japanese(double xi, double s) { return std::pow(1.0 + xi * xi, 0.5 * s); }

FractionalNorm::FractionalNorm(std::shared_ptr<const Geometry> geo, double s)
    : geo_(std::move(geo)), s_(s) {
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::UnsupportedOrder, "fractional order must lie in [0, 1]");
  require_planar(*geo_, "fractional derivatives");
  const Chart& c = geo_->atlas.interior_chart;
  half_ = c.box_hi[0] - c.box_lo[0];  // box length, i.e. half-width after x2 padding
  m_ = 2 * static_cast<int>(std::ceil(half_ / geo_->polar().dr()));
}

namespace {

ScalarField ring_multiplier(const PolarOps& P, const ScalarField& f, double s) {
  std::vector<std::complex<double>> m(P.nt() / 2 + 1);
  for (int k = 0; k <= P.nt() / 2; ++k) m[k] = japanese(k, s);
  return P.theta_multiplier(f, m);
}

}  // namespace

ScalarField FractionalNorm::frac_deriv(const ScalarField& f, int mu) const {
  const ChartAtlas& a = geo_->atlas;
  if (mu < 0 || mu >= a.n_charts()) fail(ErrorKind::Configuration, "chart index out of range");
  if (mu == 0) return interior(f);
  const ScalarField g = a.chi[mu].cwiseProduct(f);
  return a.chi_fat[mu].cwiseProduct(ring_multiplier(geo_->polar(), g, s_));
}

ScalarField FractionalNorm::interior(const ScalarField& f) const {
  const Geometry& geo = *geo_;
  const PolarOps& P = geo.polar();
  const ChartAtlas& a = geo.atlas;
  const ScalarField g = a.chi[0].cwiseProduct(f);
  const int M = m_;
  const double L = 2.0 * half_, h = L / M;
  // Sample chi_0 f on the padded Cartesian grid (zero outside its support).
  std::vector<int> inside;
  Eigen::MatrixXd pts(0, 2);
  std::vector<std::array<double, 2>> tmp;
  for (int q = 0; q < M; ++q)
    for (int p = 0; p < M; ++p) {
      const double x = -half_ + p * h, y = -half_ + q * h;
      if (std::hypot(x, y) < 0.5) {
        inside.push_back(q * M + p);
        tmp.push_back({x, y});
      }
    }
  pts.resize(static_cast<long>(tmp.size()), 2);
  for (size_t k = 0; k < tmp.size(); ++k) pts.row(k) << tmp[k][0], tmp[k][1];
  const Eigen::VectorXd vals = P.interpolate(g, pts);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);  // A(p, q)
  for (size_t k = 0; k < inside.size(); ++k) A(inside[k] % M, inside[k] / M) = vals[k];
  Eigen::MatrixXcd C = fft2(A, false);
  for (int q = 0; q < M; ++q)
    for (int p = 0; p < M; ++p) {
      const int kp = p <= M / 2 ? p : p - M, kq = q <= M / 2 ? q : q - M;
      const double xi1 = 2.0 * M_PI * kp / L, xi2 = 2.0 * M_PI * kq / L;
      // Only <xi>^s - 1 goes through the resampling round trip, so the
      // identity part (and s = 0) is exact on the nodes.
      C(p, q) *= (japanese(std::hypot(xi1, xi2), s_) - 1.0) / (static_cast<double>(M) * M);
    }
  const Eigen::MatrixXd B = fft2(C, true).real();
  // Back to the nodes by periodic six-point Lagrange interpolation.
  ScalarField out = ScalarField::Zero(geo.n());
  constexpr int K = 6;
  for (int n = 0; n < geo.n(); ++n) {
    const double cf = a.chi_fat[0][n];
    if (cf == 0.0) continue;
    double wx[K], wy[K];
    int ix0, iy0;
    for (int axis = 0; axis < 2; ++axis) {
      const double sx = (geo.grid.y(n, axis) + half_) / h;
      const int i0 = static_cast<int>(std::floor(sx)) - K / 2 + 1;
      double* w = axis == 0 ? wx : wy;
      for (int aa = 0; aa < K; ++aa) {
        double v = 1.0;
        for (int b = 0; b < K; ++b)
          if (b != aa) v *= (sx - (i0 + b)) / static_cast<double>(aa - b);
        w[aa] = v;
      }
      (axis == 0 ? ix0 : iy0) = i0;
    }
    double acc = 0.0;
    for (int qy = 0; qy < K; ++qy)
      for (int qx = 0; qx < K; ++qx) {
        const int p = ((ix0 + qx) % M + M) % M, q = ((iy0 + qy) % M + M) % M;
        acc += wx[qx] * wy[qy] * B(p, q);
      }
    out[n] = cf * (g[n] + acc);
  }
  return out;
}

Eigen::VectorXd FractionalNorm::boundary(const Eigen::VectorXd& fb) const {
  const PolarOps& P = geo_->polar();
  ScalarField full = ScalarField::Zero(geo_->n());
  const auto& bn = geo_->grid.boundary;
  for (size_t k = 0; k < bn.size(); ++k) full[bn[k]] = fb[k];
  const ScalarField m = ring_multiplier(P, full, s_);
  Eigen::VectorXd out(bn.size());
  for (size_t k = 0; k < bn.size(); ++k) out[k] = m[bn[k]];
  return out;
}

double frac_inner(const FractionalNorm& fr, const ScalarField& f, const ScalarField& g) {
  const Geometry& geo = fr.geometry();
  double s = 0.0;
  for (int mu = 0; mu < geo.atlas.n_charts(); ++mu)
    s += geo.grid.w.dot(fr.frac_deriv(f, mu).cwiseProduct(fr.frac_deriv(g, mu)));
  return s;
}

double boundary_hs_norm(const FractionalNorm& fr, const Eigen::VectorXd& fb) {
  const Eigen::VectorXd d = fr.boundary(fb);
  return std::sqrt(fr.geometry().grid.wb.dot(d.cwiseAbs2()));
}

double leibniz_residual(const FractionalNorm& fr, const ScalarField& f, const ScalarField& g) {
  const Geometry& geo = fr.geometry();
  double s = 0.0;
  const ScalarField fg = f.cwiseProduct(g);
  for (int mu = 0; mu < geo.atlas.n_charts(); ++mu) {
    const ScalarField r = fr.frac_deriv(fg, mu) - f.cwiseProduct(fr.frac_deriv(g, mu));
    s += geo.grid.w.dot(r.cwiseAbs2());
  }
  return std::sqrt(s);
}

double leibniz_residual_boundary(const FractionalNorm& fr, const Eigen::VectorXd& fb,
                                 const Eigen::VectorXd& gb) {
  const Eigen::VectorXd r = fr.boundary(fb.cwiseProduct(gb)) - fb.cwiseProduct(fr.boundary(gb));
  return std::sqrt(fr.geometry().grid.wb.dot(r.cwiseAbs2()));
}

}  // namespace fbe
