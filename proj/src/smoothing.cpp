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
#include "fbe/smoothing.hpp"

#include <cmath>

#include "fbe/errors.hpp"

namespace fbe {

double smoothing_kernel(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return 35.0 / 32.0 * u * u * u;
}

double smoothing_kernel_hat(double xi) {
  // Composite Simpson on [-1, 1]; the integrand is a polynomial times a cosine.
  constexpr int n = 4000;
  const double h = 2.0 / n;
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = -1.0 + k * h;
    const double c = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += c * smoothing_kernel(t) * std::cos(xi * t);
  }
  return s * h / 3.0;
}

SmoothingOperator::SmoothingOperator(std::shared_ptr<const Geometry> geo, double eps)
    : geo_(std::move(geo)), eps_(eps) {
  if (eps < 0.0) fail(ErrorKind::Configuration, "smoothing length must be nonnegative");
  if (eps > 0.0) {
    const double h = geo_->grid.spacing[0];
    if (eps < 2.0 * h - 1e-14)
      fail(ErrorKind::UnderResolvedKernel,
           "eps = " + std::to_string(eps) + " is below twice the tangential spacing " + std::to_string(h));
  }
  build_weights();
}

void SmoothingOperator::set_kernel_scale_for_testing(double s) {
  scale_ = s;
  build_weights();
}

void SmoothingOperator::build_weights() {
  w_.clear();
  mult_.clear();
  if (eps_ == 0.0) return;
  const double h = geo_->grid.spacing[0];
  const int K = static_cast<int>(std::floor(eps_ / h));
  double sum = 0.0;
  for (int m = -K; m <= K; ++m) {
    w_.push_back(smoothing_kernel(m * h / eps_));
    sum += w_.back();
  }
  for (double& v : w_) v *= scale_ / sum;
  if (geo_->d() == 2) {
    const int nt = geo_->polar().nt();
    mult_.resize(nt / 2 + 1);
    for (int k = 0; k <= nt / 2; ++k) {
      double s = 0.0;
      for (int m = -K; m <= K; ++m) s += w_[m + K] * std::cos(k * m * h);
      mult_[k] = s;
    }
  }
}

double SmoothingOperator::multiplier(int k) const {
  if (eps_ == 0.0) return 1.0;
  if (geo_->d() != 2) fail(ErrorKind::UnsupportedDimension, "angular multiplier is defined for d=2");
  return mult_.at(static_cast<size_t>(std::abs(k))).real();
}

ScalarField SmoothingOperator::apply(const ScalarField& f) const {
  if (eps_ == 0.0) return f;
  if (geo_->d() == 3) return apply_ball(f);
  // d = 2: m = sqrt(r) and chi_1 = eta depend on r only, so the boundary
  // chart term is eta^2 times the angular convolution.
  const ScalarField sf = geo_->polar().theta_multiplier(f, mult_);
  const Eigen::ArrayXd e2 = geo_->atlas.chi[1].array().square();
  return (e2 * sf.array() + (1.0 - e2) * f.array()).matrix();
}

VecField SmoothingOperator::apply(const VecField& f) const {
  VecField out(f.rows(), f.cols());
  for (int c = 0; c < f.cols(); ++c) out.col(c) = apply(ScalarField(f.col(c)));
  return out;
}

namespace {

// Four-point Lagrange weights on a uniform axis with nodes x0 + k h,
// k = 0..len-1; returns the first node index of the stencil.
int lagrange4(double x, double x0, double h, int len, double w[4]) {
  const double s = (x - x0) / h;
  int i0 = static_cast<int>(std::floor(s)) - 1;
  i0 = std::max(0, std::min(len - 4, i0));
  for (int a = 0; a < 4; ++a) {
    double v = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) v *= (s - (i0 + b)) / static_cast<double>(a - b);
    w[a] = v;
  }
  return i0;
}

}  // namespace

ScalarField SmoothingOperator::apply_ball(const ScalarField& f) const {
  const Geometry& geo = *geo_;
  const Grid& g = geo.grid;
  const ChartAtlas& a = geo.atlas;
  const int K = static_cast<int>(w_.size() / 2);
  ScalarField out = a.chi[0].array().square().matrix().cwiseProduct(f);
  for (int mu = 1; mu < a.n_charts(); ++mu) {
    const Chart& c = a.chart(mu);
    const int na = c.shape[0], nb = c.shape[1], nrad = c.shape[2];
    std::vector<double> u(c.nodes.size()), tmp(c.nodes.size());
    for (size_t slot = 0; slot < c.nodes.size(); ++slot) {
      const int n = c.nodes[slot];
      u[slot] = c.m[slot] * a.chi[mu][n] * f[n];
    }
    auto conv = [&](const std::vector<double>& in, std::vector<double>& o, int stride, int len) {
      for (size_t slot = 0; slot < in.size(); ++slot) {
        const int p = static_cast<int>((slot / stride) % len);
        double s = 0.0;
        for (int m = -K; m <= K; ++m) {
          const int q = p + m;
          if (q < 0 || q >= len) continue;
          s += w_[m + K] * in[slot + static_cast<long>(m) * stride];
        }
        o[slot] = s;
      }
    };
    conv(u, tmp, 1, na);
    conv(tmp, u, na, nb);
    const double h = g.spacing[0];
    const double a0 = c.param(0, 0), b0 = c.param(0, 1), r0 = c.param(0, 2);
    const double hr = g.spacing[2];
    for (int n = 0; n < g.n; ++n) {
      if (a.chi[mu][n] == 0.0) continue;
      Eigen::VectorXd z;
      if (!chart_inverse(geo, mu, g.y.row(n).transpose(), z)) continue;
      double wa[4], wb[4], wr[4];
      const int ia = lagrange4(z[0], a0, h, na, wa);
      const int ib = lagrange4(z[1], b0, h, nb, wb);
      const int ir = lagrange4(z[2], r0, hr, nrad, wr);
      double s = 0.0;
      for (int kr = 0; kr < 4; ++kr)
        for (int kb = 0; kb < 4; ++kb)
          for (int ka = 0; ka < 4; ++ka) {
            const size_t slot = (static_cast<size_t>(ir + kr) * nb + (ib + kb)) * na + (ia + ka);
            s += wr[kr] * wb[kb] * wa[ka] * u[slot];
          }
      const double m = z[2] / std::pow(1.0 + z[0] * z[0] + z[1] * z[1], 0.75);
      out[n] += a.chi[mu][n] * s / m;
    }
  }
  return out;
}

CommutatorReport commutator_residuals(const SmoothingOperator& op, const ScalarField& f,
                                      const ScalarField& g, const VecField& S,
                                      const FlowJacobian& jac) {
  const Geometry& geo = op.geometry();
  CommutatorReport rep;
  const ScalarField Sf = apply_tangential(S, f, geo);
  rep.tangential = l2_norm(geo, ScalarField(op.apply(Sf) - apply_tangential(S, op.apply(f), geo)));
  const ScalarField Sg = apply_tangential(S, g, geo);
  rep.multiplication =
      l2_norm(geo, ScalarField(op.apply(ScalarField(f.cwiseProduct(Sg))) - f.cwiseProduct(op.apply(Sg))));
  const VecField a = tilde_grad(geo, op.apply(Sf), jac);
  const VecField b = op.apply(tilde_grad(geo, Sf, jac));
  for (int i = 0; i < geo.d(); ++i) rep.gradient += l2_norm(geo, ScalarField(a.col(i) - b.col(i)));
  if (geo.d() == 2) {
    const PolarOps& P = geo.polar();
    rep.radial = l2_norm(geo, ScalarField(op.apply(P.d_r(f)) - P.d_r(op.apply(f))));
  }
  return rep;
}

}  // namespace fbe
