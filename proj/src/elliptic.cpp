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
#include "fbe/elliptic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "fbe/errors.hpp"

namespace fbe {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// kappa~ Jinv Jinv^T at a node, as a 2x2 matrix in y-indices.
Eigen::Matrix2d node_metric(const FlowJacobian& jac, int n) {
  Eigen::Matrix2d Ji;
  Ji << jac.Jinv(n, 0), jac.Jinv(n, 1), jac.Jinv(n, 2), jac.Jinv(n, 3);
  return jac.kappa[n] * Ji * Ji.transpose();
}

// r * P M P^T with P = d(r, theta)/dy at (r, theta).
Eigen::Matrix2d polar_metric(const Eigen::Matrix2d& M, double r, double th) {
  const double c = std::cos(th), s = std::sin(th);
  Eigen::Matrix2d P;
  P << c, s, -s / r, c / r;
  return r * P * M * P.transpose();
}

// Adds coef * (a.h)(b.h) to the quadratic form.
void add_product(Triplets& t, const std::vector<std::pair<int, double>>& a,
                 const std::vector<std::pair<int, double>>& b, double coef) {
  for (const auto& [i, ai] : a)
    for (const auto& [j, bj] : b) {
      t.emplace_back(i, j, 0.5 * coef * ai * bj);
      t.emplace_back(j, i, 0.5 * coef * ai * bj);
    }
}

}  // namespace

DirichletOperator::DirichletOperator(std::shared_ptr<const Geometry> geo, const FlowJacobian& jac)
    : geo_(std::move(geo)) {
  require_planar(*geo_, "the Dirichlet solver");
  const PolarOps& P = geo_->polar();
  const int nt = P.nt(), nr = P.nr(), n = P.size();
  const double dr = P.dr(), dth = P.dtheta();
  kappa_ = jac.kappa;
  if (kappa_.minCoeff() <= 0.0) fail(ErrorKind::DegenerateFlow, "kappa~ must be positive");
  std::vector<Eigen::Matrix2d> M(n);
  for (int k = 0; k < n; ++k) M[k] = node_metric(jac, k);
  Triplets t;
  t.reserve(static_cast<size_t>(n) * 40);
  auto idx = [&](int i, int j) { return P.index(((i % nt) + nt) % nt, j); };
  for (int j = 0; j < nr; ++j) {
    const double cell = (j == nr - 1) ? 0.5 : 1.0;
    for (int i = 0; i < nt; ++i) {
      // theta-face between (i, j) and (i+1, j)
      {
        const int a = idx(i, j), b = idx(i + 1, j);
        const Eigen::Matrix2d B = polar_metric(0.5 * (M[a] + M[b]), P.r(j), P.theta(i) + 0.5 * dth);
        const double coef = B(1, 1) * dr * dth * cell / (dth * dth);
        add_product(t, {{a, -1.0}, {b, 1.0}}, {{a, -1.0}, {b, 1.0}}, coef);
      }
      if (j == nr - 1) continue;
      // r-face between (i, j) and (i, j+1)
      const double rf = (j + 1) * dr;
      {
        const int a = idx(i, j), b = idx(i, j + 1);
        const Eigen::Matrix2d B = polar_metric(0.5 * (M[a] + M[b]), rf, P.theta(i));
        const double coef = B(0, 0) * dr * dth / (dr * dr);
        add_product(t, {{a, -1.0}, {b, 1.0}}, {{a, -1.0}, {b, 1.0}}, coef);
      }
      // corner (i+1/2, j+1/2): mixed term
      {
        const int a = idx(i, j), b = idx(i + 1, j), c = idx(i, j + 1), e = idx(i + 1, j + 1);
        const Eigen::Matrix2d Mc = 0.25 * (M[a] + M[b] + M[c] + M[e]);
        const Eigen::Matrix2d B = polar_metric(Mc, rf, P.theta(i) + 0.5 * dth);
        if (B(0, 1) == 0.0) continue;
        const double coef = 2.0 * B(0, 1) * dr * dth / (dr * dth);
        add_product(t, {{a, -0.5}, {c, 0.5}, {b, -0.5}, {e, 0.5}},
                    {{a, -0.5}, {b, 0.5}, {c, -0.5}, {e, 0.5}}, coef);
      }
    }
  }
  K_.resize(n, n);
  K_.setFromTriplets(t.begin(), t.end());
  K_.prune(0.0);
  ni_ = nt * (nr - 1);
  Kii_ = K_.topLeftCorner(ni_, ni_);
}

ScalarField DirichletOperator::laplacian(const ScalarField& h) const {
  const ScalarField Kh = K_ * h;
  ScalarField out = ScalarField::Zero(h.size());
  const Eigen::VectorXd& w = geo_->grid.w;
  for (int k = 0; k < ni_; ++k) out[k] = -Kh[k] / (w[k] * kappa_[k]);
  return out;
}

double DirichletOperator::energy(const ScalarField& h) const { return h.dot(K_ * h); }

double dirichlet_residual(const DirichletOperator& op, const ScalarField& h, const ScalarField& rhs) {
  const ScalarField r = op.laplacian(h) - rhs;
  const Eigen::VectorXd& w = op.geometry().grid.w;
  double s = 0.0;
  // Interior nodes only; the boundary rows are eliminated.
  for (int k = 0; k < op.n_interior(); ++k) s += w[k] * op.kappa()[k] * r[k] * r[k];
  return std::sqrt(s);
}

ScalarField DirichletOperator::solve(const ScalarField& rhs, double tol, int max_iter) const {
  if (!(tol > 0.0)) fail(ErrorKind::Configuration, "solver tolerance must be positive");
  const Eigen::VectorXd& w = geo_->grid.w;
  Eigen::VectorXd b(ni_);
  for (int k = 0; k < ni_; ++k) b[k] = -w[k] * kappa_[k] * rhs[k];
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setMaxIterations(max_iter);
  cg.compute(Kii_);
  ScalarField h = ScalarField::Zero(rhs.size());
  double rel = 1e-10;
  double res = 0.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    cg.setTolerance(rel);
    Eigen::VectorXd x = cg.solveWithGuess(b, h.head(ni_));
    h.head(ni_) = x;
    res = dirichlet_residual(*this, h, rhs);
    if (res <= tol) return h;
    if (cg.info() != Eigen::Success && cg.iterations() >= max_iter) break;
    rel *= 1e-2;
    if (rel < 1e-16) break;
  }
  std::ostringstream os;
  os << "Dirichlet solve stopped with residual " << res << " above tolerance " << tol;
  fail(ErrorKind::SolverFailure, os.str());
}

ScalarField solve_dirichlet(std::shared_ptr<const Geometry> geo, const FlowJacobian& jac,
                            const ScalarField& rhs, double tol) {
  DirichletOperator op(std::move(geo), jac);
  return op.solve(rhs, tol);
}

PolarPoisson::PolarPoisson(std::shared_ptr<const Geometry> geo) : geo_(std::move(geo)) {
  require_planar(*geo_, "the polar Poisson solver");
  const PolarOps& P = geo_->polar();
  const int nr = P.nr(), nt = P.nt();
  const Eigen::MatrixXd& D1 = P.line_d1();
  const Eigen::MatrixXd& D2 = P.line_d2();
  for (int m = 0; m <= nt / 2; ++m) {
    const double parity = (m % 2) ? -1.0 : 1.0;
    Eigen::MatrixXd L(nr, nr);
    for (int j = 0; j < nr; ++j) {
      const double r = P.r(j);
      for (int q = 0; q < nr; ++q) {
        const double d1 = D1(nr + j, nr + q) + parity * D1(nr + j, nr - 1 - q);
        const double d2 = D2(nr + j, nr + q) + parity * D2(nr + j, nr - 1 - q);
        L(j, q) = d2 + d1 / r;
      }
      L(j, j) -= static_cast<double>(m) * m / (r * r);
    }
    lap_.push_back(L);
    lu_.emplace_back(L.topLeftCorner(nr - 1, nr - 1));
  }
}

ScalarField PolarPoisson::laplacian(const ScalarField& f) const {
  const PolarOps& P = geo_->polar();
  Eigen::MatrixXcd c = P.ring_fft(f);
  for (int m = 0; m < c.rows(); ++m) {
    const Eigen::VectorXcd row = c.row(m).transpose();
    c.row(m) = (lap_[m].cast<std::complex<double>>() * row).transpose();
  }
  return P.ring_ifft(c);
}

ScalarField PolarPoisson::solve(const ScalarField& rhs) const {
  const PolarOps& P = geo_->polar();
  const int nr = P.nr();
  Eigen::MatrixXcd c = P.ring_fft(rhs);
  for (int m = 0; m < c.rows(); ++m) {
    const Eigen::VectorXcd b = c.row(m).head(nr - 1).transpose();
    const Eigen::VectorXd re = lu_[m].solve(Eigen::VectorXd(b.real()));
    const Eigen::VectorXd im = lu_[m].solve(Eigen::VectorXd(b.imag()));
    for (int j = 0; j < nr - 1; ++j) c(m, j) = {re[j], im[j]};
    c(m, nr - 1) = 0.0;
  }
  return P.ring_ifft(c);
}

ScalarField pointwise_divcurl_certificate(const Geometry& geo, const VecField& alpha,
                                          const FlowJacobian& jac, const TangentialBasis& basis) {
  const int d = geo.d(), n = geo.n();
  const Eigen::MatrixXd D = tilde_deriv(geo, alpha, jac);
  const ScalarField div = tilde_div(geo, alpha, jac);
  const Eigen::MatrixXd curl = tilde_curl(geo, alpha, jac);
  ScalarField den = div.cwiseAbs() + curl.rowwise().norm();
  for (const VecField& S : basis.fields) {
    Eigen::MatrixXd Sa(n, d);
    for (int j = 0; j < d; ++j) Sa.col(j) = apply_tangential(S, alpha.col(j), geo);
    den += Sa.rowwise().norm();
  }
  ScalarField out(n);
  for (int k = 0; k < n; ++k) out[k] = D.row(k).norm() / std::max(den[k], 1e-14);
  return out;
}

DivCurlL2Record l2_divcurl_certificate(const VecField& alpha, const FlowJacobian& jac,
                                       const FractionalNorm& half) {
  const Geometry& geo = half.geometry();
  const int d = geo.d();
  const Eigen::VectorXd wk = geo.grid.w.cwiseProduct(jac.kappa);
  DivCurlL2Record rec;
  const Eigen::MatrixXd D = tilde_deriv(geo, alpha, jac);
  rec.interior_l2 = wk.dot(alpha.rowwise().squaredNorm());
  rec.lhs = rec.interior_l2 + wk.dot(D.rowwise().squaredNorm());
  rec.div2 = wk.dot(tilde_div(geo, alpha, jac).cwiseAbs2());
  rec.curl2 = wk.dot(tilde_curl(geo, alpha, jac).rowwise().squaredNorm());
  const auto& bn = geo.grid.boundary;
  const int nb = static_cast<int>(bn.size());
  Eigen::VectorXd nd = Eigen::VectorXd::Zero(nb);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd ai(nb);
    for (int k = 0; k < nb; ++k) ai[k] = alpha(bn[k], i);
    rec.boundary_l2 += geo.grid.wb.dot(ai.cwiseAbs2());
    nd += geo.grid.normal.col(i).cwiseProduct(half.boundary(ai));
  }
  rec.boundary_half = geo.grid.wb.dot(nd.cwiseAbs2());
  return rec;
}

}  // namespace fbe
