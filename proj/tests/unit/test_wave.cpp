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

#include "fbe/diagnostics.hpp"
#include "fbe/study.hpp"
#include "fbe/wave.hpp"

using namespace fbe;

namespace {

// Smallest Dirichlet eigenvalue by inverse power iteration on the assembled
// operator; returns the eigenvector in \p v.
double inverse_power(const DirichletOperator& op, const Geometry& g, ScalarField& v) {
  v = (1.0 - g.grid.r.array().square()).matrix();
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    const ScalarField u = -op.solve(v, 1e-10);
    lambda = l2_norm(g, v) / l2_norm(g, u);
    v = u / l2_norm(g, u);
  }
  return lambda;
}

}  // namespace

TEST_CASE("zero data stays zero") {
  auto geo = build_atlas(2, 32, 16);
  DirichletOperator op(geo, identity_jacobian(*geo));
  WaveState ws{ScalarField::Zero(geo->n()), ScalarField::Zero(geo->n()), 0.0};
  for (int k = 0; k < 50; ++k) ws = step_wave(ws, ScalarField::Zero(geo->n()), op, 0.01, 1.0);
  CHECK(ws.h.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ws.ht.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fundamental mode oscillates at the discrete frequency") {
  auto geo = build_atlas(2, 32, 16);
  DirichletOperator op(geo, identity_jacobian(*geo));
  ScalarField v;
  const double lambda = inverse_power(op, *geo, v);
  CHECK(lambda == doctest::Approx(5.7832).epsilon(0.02));  // j_{0,1}^2
  const double e1 = 0.25, period = 2.0 * M_PI * std::sqrt(e1 / lambda);
  const double dt = std::min(period / 400.0, 0.8 * wave_cfl_limit(*geo, identity_jacobian(*geo), e1));
  const int probe = 0;
  WaveState ws{v, ScalarField::Zero(geo->n()), 0.0};
  std::vector<double> crossings;
  double prev = ws.h[probe];
  const int steps = static_cast<int>(1.6 * period / dt);
  for (int k = 1; k <= steps; ++k) {
    ws = step_wave(ws, ScalarField::Zero(geo->n()), op, dt, e1);
    const double cur = ws.h[probe];
    if ((prev > 0) != (cur > 0)) crossings.push_back((k - 1) * dt + dt * prev / (prev - cur));
    prev = cur;
  }
  REQUIRE(crossings.size() >= 3);
  const double measured = crossings[2] - crossings[0];
  CHECK(std::abs(measured / period - 1.0) < 0.01);
}

TEST_CASE("manufactured solution converges at second order in time") {
  auto geo = build_atlas(2, 32, 16);
  const double dt = 0.8 * wave_cfl_limit(*geo, identity_jacobian(*geo), 1.0);
  const double T = 200 * dt;
  const double a = wave_manufactured_error(geo, 1.0, dt, T), b = wave_manufactured_error(geo, 1.0, dt / 2, T),
               c = wave_manufactured_error(geo, 1.0, dt / 4, T);
  CHECK_THROWS_AS(wave_manufactured_error(geo, 1.0, 2.0 * dt, T), Error);
  CHECK(std::log2(a / b) >= 1.9);
  CHECK(std::log2(b / c) >= 1.9);
}

TEST_CASE("CFL limit is enforced by the coupled step") {
  auto geo = build_atlas(2, 32, 16);
  const FlowJacobian id = identity_jacobian(*geo);
  const double lim = wave_cfl_limit(*geo, id, 1.0);
  CHECK(lim > 0.0);
  CHECK(wave_cfl_limit(*geo, id, 0.25) == doctest::Approx(0.5 * lim));
}

TEST_CASE("Galerkin projection") {
  auto geo = build_atlas(2, 32, 16);
  DirichletOperator op(geo, identity_jacobian(*geo));
  const GalerkinBasis basis = galerkin_basis(geo, 200.0);
  REQUIRE(basis.psi.cols() > 3);
  // Mass orthonormality.
  const Eigen::MatrixXd M = basis.psi.transpose() * geo->grid.w.asDiagonal() * basis.psi;
  CHECK((M - Eigen::MatrixXd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff() < 1e-10);

  // In-span data: conserved energy and agreement with the leapfrog solver.
  const ScalarField h0 = basis.psi.col(0) + 0.5 * basis.psi.col(3);
  WaveState ws{h0, ScalarField::Zero(geo->n()), 0.0};
  GalerkinState gs = galerkin_init(basis, *geo, ws);
  auto energy = [&](const GalerkinState& s) {
    const WaveState w = galerkin_state(basis, s);
    return geo->grid.w.dot(w.ht.cwiseAbs2()) + op.energy(w.h);
  };
  const double E0 = energy(gs), dt = 0.002;
  double drift = 0.0;
  const ScalarField F = ScalarField::Zero(geo->n());
  for (int k = 0; k < 500; ++k) {
    gs = step_wave_galerkin(gs, F, op, basis, dt, 1.0);
    ws = step_wave(ws, F, op, dt, 1.0);
    drift = std::max(drift, std::abs(energy(gs) - E0) / E0);
  }
  CHECK(drift <= 1e-3);
  CHECK_FALSE(gs.bandwidth_warning);
  CHECK(l2_norm(*geo, ScalarField(galerkin_state(basis, gs).h - ws.h)) < 1e-8);

  // Data orthogonal to the span is annihilated.
  const ScalarField g = geo->grid.y.col(0).cwiseProduct(geo->grid.y.col(1)).cwiseProduct(
      (1.0 - geo->grid.r.array().square()).matrix());
  const ScalarField perp = g - basis.psi * basis.project(*geo, g);
  GalerkinState z = galerkin_init(basis, *geo, WaveState{perp, ScalarField::Zero(geo->n()), 0.0});
  for (int k = 0; k < 20; ++k) z = step_wave_galerkin(z, F, op, basis, dt, 1.0);
  CHECK(galerkin_state(basis, z).h.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wave energies") {
  auto geo = build_atlas(2, 32, 16);
  const auto tb = tangential_fields(*geo);
  const FlowJacobian id = identity_jacobian(*geo);
  DirichletOperator op(geo, id);
  const double dt = 0.002;
  std::vector<ScalarField> zero(4, ScalarField::Zero(geo->n()));
  std::vector<FlowJacobian> jz(4, id);
  for (double v : wave_energy(geo, tb, zero, jz, dt, 1.0, {})) CHECK(v == 0.0);
  for (double v : wave_energy(geo, tb, zero, jz, dt, 1.0, {0})) CHECK(v == 0.0);

  ScalarField mode;
  inverse_power(op, *geo, mode);
  WaveState ws{mode, ScalarField::Zero(geo->n()), 0.0};
  std::vector<ScalarField> hs{ws.h};
  for (int k = 0; k < 400; ++k) {
    ws = step_wave(ws, ScalarField::Zero(geo->n()), op, dt, 1.0);
    hs.push_back(ws.h);
  }
  const std::vector<FlowJacobian> jac(hs.size(), id);
  const std::vector<double> W = wave_energy(geo, tb, hs, jac, dt, 1.0, {});
  const auto [lo, hi] = std::minmax_element(W.begin() + 1, W.end() - 1);
  CHECK((*hi - *lo) / *hi <= 1e-3);
  std::vector<double> t;
  for (size_t k = 0; k < W.size(); ++k) t.push_back(k * dt);
  const double C = fit_growth(t, W);
  CHECK(std::isfinite(C));
  CHECK(C < 0.05);
}
