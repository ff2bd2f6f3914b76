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
#include <doctest.h>

#include <cmath>

#include "fbe/elliptic.hpp"
#include "fbe/fractional.hpp"
#include "fbe/study.hpp"

using namespace fbe;

namespace {

VecField sine_map(const Geometry& g) {
  VecField x = g.grid.y;
  for (int n = 0; n < g.n(); ++n) {
    x(n, 0) += 0.05 * std::sin(g.grid.y(n, 1));
    x(n, 1) += 0.05 * std::sin(g.grid.y(n, 0));
  }
  return x;
}

ScalarField solve_unit_rhs(std::shared_ptr<const Geometry> geo) {
  const FlowJacobian jac = flow_jacobian(*geo, sine_map(*geo));
  return solve_dirichlet(geo, jac, ScalarField::Ones(geo->n()), 1e-9);
}

// Max difference on the coarse nodes with r < 0.9, the fine solution
// interpolated.
double grid_gap(const Geometry& coarse, const ScalarField& hc, const Geometry& fine, const ScalarField& hf) {
  std::vector<int> nodes;
  for (int n = 0; n < coarse.n(); ++n)
    if (coarse.grid.r[n] < 0.9) nodes.push_back(n);
  Eigen::MatrixXd pts(static_cast<long>(nodes.size()), 2);
  for (size_t k = 0; k < nodes.size(); ++k) pts.row(static_cast<long>(k)) = coarse.grid.y.row(nodes[k]);
  const Eigen::VectorXd fi = fine.polar().interpolate(hf, pts);
  double gap = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k) gap = std::max(gap, std::abs(hc[nodes[k]] - fi[static_cast<long>(k)]));
  return gap;
}

VecField rotation(const Geometry& g) {
  VecField a(g.n(), 2);
  a.col(0) = -g.grid.y.col(1);
  a.col(1) = g.grid.y.col(0);
  return a;
}

}  // namespace

TEST_CASE("Dirichlet paraboloid is reproduced to roundoff") {
  // The finite-volume stencil is exact on 1 - r^2, a stronger statement than
  // second-order convergence.
  for (int nt : {32, 64, 128}) CHECK(dirichlet_error(nt, nt / 2, "paraboloid") < 1e-10);
}

TEST_CASE("Dirichlet manufactured and perturbed cases") {
  for (const char* which : {"manufactured", "perturbed"}) {
    const double a = dirichlet_error(32, 16, which), b = dirichlet_error(64, 32, which);
    CHECK(std::log2(a / b) >= 1.9);
  }
  CHECK_THROWS_AS(dirichlet_error(32, 16, "unknown"), Error);
}

TEST_CASE("Dirichlet zero data and residual") {
  auto geo = build_atlas(2, 64, 32);
  const FlowJacobian id = identity_jacobian(*geo);
  DirichletOperator op(geo, id);
  const ScalarField h = op.solve(ScalarField::Zero(geo->n()), 1e-9);
  CHECK(h.cwiseAbs().maxCoeff() < 1e-9);
  const ScalarField rhs = ScalarField::Constant(geo->n(), -4.0);
  const ScalarField u = op.solve(rhs, 1e-9);
  CHECK(dirichlet_residual(op, u, rhs) <= 1e-10);
  for (int b : geo->grid.boundary) CHECK(u[b] == 0.0);
}

TEST_CASE("Dirichlet self-convergence in perturbed coordinates") {
  auto g1 = build_atlas(2, 32, 16), g2 = build_atlas(2, 64, 32), g3 = build_atlas(2, 128, 64);
  const ScalarField h1 = solve_unit_rhs(g1), h2 = solve_unit_rhs(g2), h3 = solve_unit_rhs(g3);
  // Richardson estimate of the coarse error, order 2.
  const double estimate = grid_gap(*g1, h1, *g2, h2) * 4.0 / 3.0;
  const double actual = grid_gap(*g1, h1, *g3, h3);
  CHECK(actual <= 3.0 * estimate);
  CHECK(actual > 0.0);
}

TEST_CASE("pointwise div-curl certificate structure") {
  auto geo = build_atlas(2, 64, 32);
  const FlowJacobian id = identity_jacobian(*geo);
  const auto tb = tangential_fields(*geo);
  const ScalarField q = (1.0 - geo->grid.r.array().square()).matrix();
  const ScalarField r1 = pointwise_divcurl_certificate(*geo, tilde_grad(*geo, q, id), id, tb);
  CHECK(r1.allFinite());
  CHECK(r1.maxCoeff() < 10.0);
  const VecField rot = rotation(*geo);
  CHECK(tilde_curl(*geo, rot, id).col(0).minCoeff() == doctest::Approx(2.0));
  const ScalarField r2 = pointwise_divcurl_certificate(*geo, rot, id, tb);
  CHECK(r2.allFinite());
  CHECK(r2.maxCoeff() < 10.0);
}

TEST_CASE("L2 div-curl record") {
  auto geo = build_atlas(2, 64, 32);
  const FlowJacobian id = identity_jacobian(*geo);
  FractionalNorm half(geo, 0.5);
  const DivCurlL2Record z = l2_divcurl_certificate(VecField::Zero(geo->n(), 2), id, half);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs() == 0.0);
  VecField c(geo->n(), 2);
  c.col(0).setConstant(1.0);
  c.col(1).setConstant(-2.0);
  const DivCurlL2Record k = l2_divcurl_certificate(c, id, half);
  CHECK(k.div2 < 1e-20);
  CHECK(k.curl2 < 1e-20);
  CHECK(k.interior_l2 == doctest::Approx(5.0 * M_PI).epsilon(1e-9));
  CHECK(k.lhs <= k.rhs());
}

TEST_CASE("div-curl constants are finite and hold out of sample") {
  const DivCurlConstants a = divcurl_constants(64, 32, 200, 11);
  CHECK(std::isfinite(a.pointwise));
  CHECK(std::isfinite(a.l2));
  CHECK(a.pointwise_violations == 0);
  CHECK(a.l2_violations == 0);
}
