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

#include "fbe/compat.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/euler.hpp"

using namespace fbe;

namespace {

VecField rotation(const Geometry& g) {
  VecField a(g.n(), 2);
  a.col(0) = -g.grid.y.col(1);
  a.col(1) = g.grid.y.col(0);
  return a;
}

// Frozen identity flow carrying the given velocity and enthalpy.
TrajectorySeries frozen(std::shared_ptr<const Geometry> geo, const VecField& V, const ScalarField& h, int m,
                        double eps = 0.0) {
  TrajectorySeries s;
  s.geo = geo;
  s.eps = eps;
  s.e1 = 0.25;
  s.dt = 1e-3;
  for (int k = 0; k < m; ++k) {
    LagrangianState st;
    st.t = k * s.dt;
    st.x = geo->grid.y;
    st.xt = geo->grid.y;
    st.V = V;
    st.Vt = V;
    st.wave = WaveState{h, ScalarField::Zero(geo->n()), st.t};
    s.slices.push_back(st);
  }
  return s;
}

}  // namespace

TEST_CASE("physical energy") {
  auto geo = build_atlas(2, 64, 32);
  const ScalarField zero = ScalarField::Zero(geo->n());
  CHECK(physical_energy(*geo, geo->grid.y, VecField::Zero(geo->n(), 2), zero, 0.25) == 0.0);
  CHECK(physical_energy(*geo, geo->grid.y, rotation(*geo), zero, 0.25) == doctest::Approx(M_PI / 2).epsilon(2e-3));
  const ScalarField q = (1.0 - geo->grid.r.array().square()).matrix();
  CHECK(physical_energy(*geo, geo->grid.y, VecField::Zero(geo->n(), 2), q, 0.25) > 0.0);
}

TEST_CASE("energy is nearly conserved along an unsmoothed run") {
  auto geo = build_atlas(2, 64, 32);
  IterationConfig cfg;
  cfg.e1 = 0.25;
  cfg.T = 0.05;
  cfg.eps_horizon = false;
  const TrajectorySeries s = run_unsmoothed(geo, pulsation_data(*geo, 0.5, 1.0), cfg);
  const auto& a = s.slices.front();
  const auto& b = s.slices.back();
  const double E0 = physical_energy(*geo, a.x, a.V, a.wave.h, 0.25);
  const double E1 = physical_energy(*geo, b.x, b.V, b.wave.h, 0.25);
  CHECK(std::abs(E1 - E0) / E0 < 1e-4);
}

TEST_CASE("Taylor margin") {
  auto geo = build_atlas(2, 64, 32);
  const FlowJacobian id = identity_jacobian(*geo);
  const ScalarField q = (1.0 - geo->grid.r.array().square()).matrix();
  CHECK(taylor_margin(*geo, q, id) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(taylor_margin(*geo, ScalarField(-q), id) == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("growth fit") {
  std::vector<double> t, E;
  for (int k = 0; k <= 10; ++k) {
    t.push_back(0.01 * k);
    E.push_back(3.0 * std::exp(2.0 * t.back()));
  }
  CHECK(fit_growth(t, E) == doctest::Approx(2.0).epsilon(1e-9));
  std::vector<double> flat(11, 1.0);
  CHECK(fit_growth(t, flat) == doctest::Approx(0.0));
}

TEST_CASE("diagnostic words") {
  const auto w = diagnostic_words(2);
  REQUIRE(w.size() == 4);
  CHECK(w[0].empty());
  CHECK(diagnostic_words(1).size() == 3);
}

TEST_CASE("good unknowns") {
  auto geo = build_atlas(2, 128, 16);
  const auto tb = tangential_fields(*geo);
  VecField V(geo->n(), 2);
  V.col(0) = geo->grid.y.col(0).cwiseAbs2();
  V.col(1) = geo->grid.y.col(0).cwiseProduct(geo->grid.y.col(1));
  const ScalarField q = (1.0 - geo->grid.r.array().square()).matrix();
  const TrajectorySeries s = frozen(geo, V, q, 3);
  SmoothingOperator S0(geo, 0.0);
  const GoodUnknowns g0 = good_unknowns(s, S0, tb, {});
  CHECK((g0.V[1] - V).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g0.h[1] - q).cwiseAbs().maxCoeff() == 0.0);
  // Frozen identity flow: T V - (d V) . T y vanishes identically.
  const GoodUnknowns g1 = good_unknowns(s, S0, tb, {0});
  CHECK(g1.V[1].cwiseAbs().maxCoeff() < 1e-10);
  CHECK(g1.h[1].cwiseAbs().maxCoeff() < 1e-10);
  // Against the direct expansion T V - (d V) T y.
  const VecField Ty = tb.fields[0];
  VecField direct(geo->n(), 2);
  for (int j = 0; j < 2; ++j) {
    const VecField g = grad_y(*geo, V.col(j));
    direct.col(j) = apply_tangential(tb.fields[0], V.col(j), *geo) - (g.array() * Ty.array()).rowwise().sum().matrix();
  }
  CHECK((g1.V[1] - direct).cwiseAbs().maxCoeff() < 1e-10);
  // Constant enthalpy has vanishing good unknowns of order >= 1.
  const TrajectorySeries c = frozen(geo, V, ScalarField::Constant(geo->n(), 0.7), 3);
  SmoothingOperator S(geo, 0.1);
  for (const Word& I : {Word{0}, Word{kDt}, Word{0, kDt}})
    for (const auto& h : good_unknowns(c, S, tb, I).h) CHECK(h.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("higher energies") {
  auto geo = build_atlas(2, 128, 16);
  const auto tb = tangential_fields(*geo);
  SmoothingOperator S(geo, 0.1);
  const TrajectorySeries z = frozen(geo, VecField::Zero(geo->n(), 2), ScalarField::Zero(geo->n()), 3, 0.1);
  // At rest the energies reduce to the coordinate terms: int |x|^2 = pi/2
  // and the boundary length 2 pi for the empty word, zero for D_t.
  const HigherEnergy e0 = higher_energy(z, S, tb, {});
  CHECK(e0.E[1] == doctest::Approx(M_PI / 2).epsilon(5e-3));
  CHECK(e0.B[1] == doctest::Approx(2 * M_PI).epsilon(1e-3));
  for (double v : higher_energy(z, S, tb, {kDt}).E) CHECK(std::abs(v) < 1e-12);
  const ScalarField q = (1.0 - geo->grid.r.array().square()).matrix();
  const TrajectorySeries r = frozen(geo, rotation(*geo), q, 3, 0.1);
  for (const Word& I : diagnostic_words(2)) {
    const HigherEnergy e = higher_energy(r, S, tb, I);
    for (size_t k = 0; k < e.E.size(); ++k) {
      CHECK(e.E[k] >= 0.0);
      CHECK(e.BN[k] <= e.B[k] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("curl and divergence records") {
  auto geo = build_atlas(2, 64, 32);
  const auto tb = tangential_fields(*geo);
  IterationConfig cfg;
  cfg.e1 = 0.25;
  cfg.T = 0.01;
  cfg.eps_horizon = false;
  const TrajectorySeries s = run_unsmoothed(geo, pulsation_data(*geo, 0.5, 1.0), cfg);
  const CurlRecord c = curl_divergence_residuals(s, tb, {});
  CHECK(std::isfinite(c.c_hat));
  CHECK(c.c_hat > 0.0);
  const std::vector<double> R = continuity_residual(s);
  REQUIRE(R.size() == c.D.size());
  for (size_t k = 0; k < R.size(); ++k) CHECK(c.D[k] == doctest::Approx(R[k]).epsilon(1e-12));

  // Irrotational data: the curl stays below the measured noise floor.
  InitialData d = zero_data(*geo);
  d.V0 = 0.3 * geo->grid.y;
  d.h0 = 0.5 * (1.0 - geo->grid.r.array().square()).matrix();
  const TrajectorySeries e = run_unsmoothed(geo, d, cfg);
  const CurlRecord ce = curl_divergence_residuals(e, tb, {});
  for (size_t k = 0; k < ce.K.size(); ++k) CHECK(ce.K[k] <= ce.floor[k] * 1.01 + 1e-12);
}

TEST_CASE("energy trace of zero data") {
  auto geo = build_atlas(2, 128, 16);
  SmoothingOperator S(geo, 0.0);
  IterationConfig cfg;
  cfg.e1 = 0.25;
  cfg.T = 0.005;
  cfg.eps_horizon = false;
  const TrajectorySeries s = run_unsmoothed(geo, zero_data(*geo), cfg);
  const EnergyTrace tr = energy_trace(s, S, 2);
  REQUIRE(tr.columns.front() == "t");
  CHECK(tr.columns.back() == "taylor_margin");
  for (const auto& row : tr.rows)
    for (size_t c = 1; c < row.size(); ++c) {
      const std::string& name = tr.columns[c];
      if ((name[0] == 'E' || name[0] == 'B') && name != "E_total" && name.find("Dt") == std::string::npos) continue;
      CHECK(std::abs(row[c]) < 1e-12);
    }
  CHECK(tr.taylor_degenerate);
}
