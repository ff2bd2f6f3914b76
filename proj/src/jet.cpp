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
#include "fbe/jet.hpp"

#include <cmath>
#include <memory>

#include "fbe/elliptic.hpp"
#include "fbe/errors.hpp"

namespace fbe {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Normalised Taylor coefficients (c_k = f^{(k)}(0)/k!) of the fields of the
// smoothed system.  Matrices are per-node d x d blocks stored row-major.
struct Series {
  const Geometry& geo;
  int d;
  std::vector<Eigen::MatrixXd> Jinv;  // n x d^2, (a, i) -> a*d + i

  explicit Series(const Geometry& g) : geo(g), d(g.d()) {}

  // Appends Jinv_k given the flow-map coefficients xi_0..xi_k.
  void extend(const std::vector<VecField>& xi) {
    const int k = static_cast<int>(Jinv.size());
    const int n = geo.n();
    std::vector<Eigen::MatrixXd> J;  // J_m(n, i*d + a) = d xi_m^i / dy^a
    for (int m = 0; m <= k; ++m) {
      Eigen::MatrixXd Jm(n, d * d);
      for (int i = 0; i < d; ++i) {
        const VecField g = grad_y(geo, xi[m].col(i));
        for (int a = 0; a < d; ++a) Jm.col(i * d + a) = g.col(a);
      }
      J.push_back(Jm);
    }
    Eigen::MatrixXd out(n, d * d);
    for (int node = 0; node < n; ++node) {
      auto blockJ = [&](int m) {
        Eigen::MatrixXd B(d, d);
        for (int q = 0; q < d * d; ++q) B(q / d, q % d) = J[m](node, q);
        return B;
      };
      const Eigen::MatrixXd J0inv = blockJ(0).inverse();
      if (k == 0) {
        for (int q = 0; q < d * d; ++q) out(node, q) = J0inv(q / d, q % d);
        continue;
      }
      // Jinv_k = -J0^{-1} sum_{m>=1} J_m Jinv_{k-m}
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
      for (int m = 1; m <= k; ++m) {
        Eigen::MatrixXd Ji(d, d);
        for (int q = 0; q < d * d; ++q) Ji(q / d, q % d) = Jinv[k - m](node, q);
        acc += blockJ(m) * Ji;
      }
      const Eigen::MatrixXd r = -J0inv * acc;
      for (int q = 0; q < d * d; ++q) out(node, q) = r(q / d, q % d);
    }
    Jinv.push_back(out);
  }

  // [d~ f]_k from the coefficients f_0..f_k.
  VecField grad(const std::vector<ScalarField>& f, int k) const {
    VecField out = VecField::Zero(geo.n(), d);
    for (int m = 0; m <= k; ++m) {
      const VecField g = grad_y(geo, f[k - m]);
      for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a) out.col(i).array() += Jinv[m].col(a * d + i).array() * g.col(a).array();
    }
    return out;
  }

  // [d~_i W^j]_k as n x d^2 (i*d + j).
  Eigen::MatrixXd deriv(const std::vector<VecField>& W, int k) const {
    Eigen::MatrixXd out(geo.n(), d * d);
    for (int j = 0; j < d; ++j) {
      std::vector<ScalarField> c(k + 1);
      for (int m = 0; m <= k; ++m) c[m] = W[m].col(j);
      const VecField g = grad(c, k);
      for (int i = 0; i < d; ++i) out.col(i * d + j) = g.col(i);
    }
    return out;
  }
};

}  // namespace

VecField DataJet::V_at(double t) const {
  VecField out = VecField::Zero(V[0].rows(), V[0].cols());
  for (size_t k = 0; k < V.size(); ++k) out += V[k] * (std::pow(t, static_cast<double>(k)) / factorial(static_cast<int>(k)));
  return out;
}

ScalarField DataJet::h_at(double t) const {
  ScalarField out = ScalarField::Zero(h[0].size());
  for (size_t k = 0; k < h.size(); ++k) out += h[k] * (std::pow(t, static_cast<double>(k)) / factorial(static_cast<int>(k)));
  return out;
}

ScalarField DataJet::ht_at(double t) const {
  ScalarField out = ScalarField::Zero(h[0].size());
  for (size_t k = 1; k < h.size(); ++k)
    out += h[k] * (std::pow(t, static_cast<double>(k - 1)) / factorial(static_cast<int>(k - 1)));
  return out;
}

VecField DataJet::xt_at(double t) const {
  VecField out = VecField::Zero(xt[0].rows(), xt[0].cols());
  for (size_t k = 0; k < xt.size(); ++k) out += xt[k] * (std::pow(t, static_cast<double>(k)) / factorial(static_cast<int>(k)));
  return out;
}

DataJet power_series_coeffs(const SmoothingOperator& S, const ScalarField& h0, const VecField& V0,
                            const VecField& x0, int order, double e1,
                            const std::optional<ScalarField>& h1) {
  if (order < 0 || order > kMaxJetOrder)
    fail(ErrorKind::UnsupportedOrder, "jet order " + std::to_string(order) + " exceeds the cap " +
                                          std::to_string(kMaxJetOrder));
  if (!(e1 > 0.0)) fail(ErrorKind::Configuration, "e1 must be positive");
  const Geometry& geo = S.geometry();
  const int d = geo.d(), n = geo.n();
  const int K = std::max(order, 1);
  Series ser(geo);
  std::unique_ptr<PolarPoisson> poisson;
  if (d == 2 && (x0 - geo.grid.y).cwiseAbs().maxCoeff() == 0.0)
    poisson = std::make_unique<PolarPoisson>(S.geometry_ptr());
  std::vector<ScalarField> a{h0};   // h
  std::vector<VecField> b{V0};      // V
  std::vector<VecField> bt{S.apply_squared(V0)};  // V~
  std::vector<VecField> xi{x0};     // x~
  ser.extend(xi);
  // Continuity: e1 a_1 = -[div~ V]_0
  if (h1) {
    a.push_back(*h1);
  } else {
    const Eigen::MatrixXd D = ser.deriv(b, 0);
    ScalarField div = ScalarField::Zero(n);
    for (int i = 0; i < d; ++i) div += D.col(i * d + i);
    a.push_back(-div / e1);
  }
  for (int k = 0; k < K; ++k) {
    xi.push_back(bt[k] / (k + 1.0));
    ser.extend(xi);  // Jinv_{k+1}
    const VecField gh = ser.grad(a, k);
    b.push_back(-gh / (k + 1.0));
    bt.push_back(S.apply_squared(b.back()));
    if (k + 2 > K) continue;
    // [Delta~ h]_k = sum_i [d~_i (d~_i h)]_k
    std::vector<VecField> G;
    for (int m = 0; m <= k; ++m) G.push_back(ser.grad(a, m));
    const Eigen::MatrixXd DG = ser.deriv(G, k);
    ScalarField lap = ScalarField::Zero(n);
    for (int i = 0; i < d; ++i) lap += DG.col(i * d + i);
    if (poisson) {
      // Composing the first-derivative stencil with itself loses the
      // highest radial wavenumbers; the leading identity-coordinate term is
      // taken from the compact second-derivative stencil instead.
      const VecField g = grad_y(geo, a[k]);
      ScalarField lap_c = ScalarField::Zero(n);
      for (int i = 0; i < d; ++i) lap_c += grad_y(geo, g.col(i)).col(i);
      lap += poisson->laplacian(a[k]) - lap_c;
    }
    // [F]_k = sum_{p+q=k} [d~_i V~^j]_p [d~_j V^i]_q
    ScalarField F = ScalarField::Zero(n);
    for (int p = 0; p <= k; ++p) {
      const Eigen::MatrixXd Dt = ser.deriv(bt, p);
      const Eigen::MatrixXd Dv = ser.deriv(b, k - p);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) F.array() += Dt.col(i * d + j).array() * Dv.col(j * d + i).array();
    }
    a.push_back((lap + F) / (e1 * (k + 2.0) * (k + 1.0)));
  }
  DataJet jet;
  jet.order = order;
  jet.eps = S.eps();
  jet.e1 = e1;
  jet.x0 = x0;
  for (int k = 0; k <= order; ++k) {
    jet.h.push_back(a[k] * factorial(k));
    jet.V.push_back(b[k] * factorial(k));
    jet.xt.push_back(xi[k] * factorial(k));
  }
  return jet;
}

}  // namespace fbe
