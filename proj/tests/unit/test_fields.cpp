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

#include "fbe/fields.hpp"

using namespace fbe;

namespace {

double kappa_error(int nt) {
  auto geo = build_atlas(2, nt, nt / 2);
  const auto& y = geo->grid.y;
  VecField x = y;
  for (int n = 0; n < geo->n(); ++n) {
    x(n, 0) += 0.05 * std::sin(y(n, 1));
    x(n, 1) += 0.05 * std::sin(y(n, 0));
  }
  const FlowJacobian jac = flow_jacobian(*geo, x);
  double err = 0.0;
  for (int n = 0; n < geo->n(); ++n)
    err = std::max(err, std::abs(jac.kappa[n] - (1.0 - 0.0025 * std::cos(y(n, 0)) * std::cos(y(n, 1)))));
  return err;
}

}  // namespace

TEST_CASE("flow Jacobian of simple maps") {
  auto geo = build_atlas(2, 64, 32);
  const FlowJacobian id = identity_jacobian(*geo);
  CHECK((id.kappa.array() - 1.0).abs().maxCoeff() < 1e-12);
  const FlowJacobian dil = flow_jacobian(*geo, VecField(2.0 * geo->grid.y));
  CHECK((dil.kappa.array() - 4.0).abs().maxCoeff() < 1e-11);
  const Eigen::MatrixXd inv = dil.inv_at(100);
  CHECK((inv - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(flow_jacobian(*geo, VecField(-geo->grid.y.rowwise().reverse())), Error);
}

TEST_CASE("flow Jacobian converges on a perturbed map") {
  const double e1 = kappa_error(32), e2 = kappa_error(64), e3 = kappa_error(128);
  CHECK(e3 < e2);
  const double order = std::log2(e1 / e2);
  CHECK((order >= 1.9 || e2 < 1e-12));
  CHECK(e3 < 1e-6);
}

TEST_CASE("tilde gradient") {
  auto geo = build_atlas(2, 64, 32);
  const auto& y = geo->grid.y;
  const FlowJacobian id = identity_jacobian(*geo);
  const FlowJacobian dil = flow_jacobian(*geo, VecField(2.0 * y));
  const ScalarField y1 = y.col(0), r2 = y.rowwise().squaredNorm(), prod = y.col(0).cwiseProduct(y.col(1));
  VecField g = tilde_grad(*geo, y1, id);
  CHECK((g.col(0).array() - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(g.col(1).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((tilde_grad(*geo, r2, id) - 2.0 * y).cwiseAbs().maxCoeff() < 1e-9);
  g = tilde_grad(*geo, prod, dil);
  CHECK((g.col(0) - 0.5 * y.col(1)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((g.col(1) - 0.5 * y.col(0)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("tilde divergence and curl") {
  auto geo = build_atlas(2, 64, 32);
  const auto& y = geo->grid.y;
  const FlowJacobian id = identity_jacobian(*geo);
  CHECK((tilde_div(*geo, y, id).array() - 2.0).abs().maxCoeff() < 1e-9);
  CHECK(tilde_curl(*geo, y, id).cwiseAbs().maxCoeff() < 1e-9);
  VecField rot(geo->n(), 2);
  rot.col(0) = -y.col(1);
  rot.col(1) = y.col(0);
  CHECK(tilde_div(*geo, rot, id).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((tilde_curl(*geo, rot, id).array() - 2.0).abs().maxCoeff() < 1e-9);
  const ScalarField q = (1.0 - y.rowwise().squaredNorm().array()).matrix();
  CHECK(tilde_curl(*geo, tilde_grad(*geo, q, id), id).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("material derivative of a series") {
  auto geo = build_atlas(2, 32, 16);
  const ScalarField g = geo->grid.y.col(0) + geo->grid.r.cwiseAbs2();
  const double dt = 0.01;
  std::vector<ScalarField> c(6, g), lin, sn;
  for (int k = 0; k < 6; ++k) {
    lin.push_back(k * dt * g);
    sn.push_back(std::sin(k * dt) * g);
  }
  for (const auto& v : material_series_derivative(c, dt)) CHECK(v.cwiseAbs().maxCoeff() < 1e-12);
  for (const auto& v : material_series_derivative(lin, dt)) CHECK((v - g).cwiseAbs().maxCoeff() < 1e-12);
  const auto d = material_series_derivative(sn, dt);
  for (int k = 1; k < 5; ++k)
    CHECK((d[k] - std::cos(k * dt) * g).cwiseAbs().maxCoeff() <= 1e-4 * g.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(material_series_derivative(std::vector<ScalarField>{g}, dt), Error);
}

TEST_CASE("words") {
  auto geo = build_atlas(2, 32, 16);
  const auto tb = tangential_fields(*geo);
  CHECK(word_name({}, tb) == "0");
  CHECK(word_name({0, kDt}, tb) == "eta*Omega_12.Dt");
  CHECK(word_time_order({kDt, 0, kDt}) == 2);
  const std::vector<ScalarField> s(3, ScalarField::Constant(geo->n(), 1.0));
  for (const auto& v : apply_word(*geo, tb, s, 0.1, {0, kDt})) CHECK(v.cwiseAbs().maxCoeff() < 1e-12);
}
