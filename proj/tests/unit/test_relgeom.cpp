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

#include "fbe/errors.hpp"
#include "fbe/relgeom.hpp"

using namespace fbe;

namespace {

Vec4 vec(double a, double b, double c, double d) { return Vec4(a, b, c, d); }

}  // namespace

TEST_CASE("Riemannian metric H") {
  const LorentzMetric m = minkowski();
  CHECK(m.lorentzian());
  const Vec4 tau = m.tau();
  CHECK((tau - vec(1, 0, 0, 0)).norm() < 1e-15);
  const Mat4 H = riemannian_H(m.g, tau);
  CHECK((H - Mat4::Identity()).norm() < 1e-15);
  CHECK(h_norm_covector(H, vec(1, 0, 0, 0)) == doctest::Approx(1.0));
  CHECK(h_norm_vector(H, vec(0, 1, 0, 0)) == doctest::Approx(1.0));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const LorentzMetric r = random_metric(seed, 0.01);
    const Mat4 Hr = riemannian_H(r.g, r.tau());
    CHECK(Eigen::SelfAdjointEigenSolver<Mat4>(Hr).eigenvalues().minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(riemannian_H(m.g, vec(0, 1, 0, 0)), Error);
}

TEST_CASE("energy-momentum positivity") {
  const LorentzMetric m = minkowski();
  const EmPositivity a = em_positivity(vec(0, 1, 0, 0), vec(1, 0, 0, 0), vec(1, 0, 0, 0), m);
  CHECK(a.Q == doctest::Approx(1.0));
  CHECK(a.bound == doctest::Approx(1.0));
  const EmPositivity b = em_positivity(vec(1, 0, 0, 0), vec(1, 0, 0, 0), vec(1, 0, 0, 0), m);
  CHECK(b.Q == doctest::Approx(1.0));
  CHECK_THROWS_AS(em_positivity(vec(0, 1, 0, 0), vec(0, 1, 0, 0), vec(1, 0, 0, 0), m), Error);
  CHECK_THROWS_AS(em_positivity(vec(0, 1, 0, 0), vec(-1, 0, 0, 0), vec(1, 0, 0, 0), m), Error);
}

TEST_CASE("surface metric G") {
  const Mat4 g = minkowski().g;
  const SurfaceMetric s = surface_metric_G(g, vec(1, 0, 0, 0), vec(1, 0, 0, 0));
  Mat4 spatial = Mat4::Identity();
  spatial(0, 0) = 0.0;
  CHECK((s.G - spatial).norm() < 1e-14);
  for (double a : {0.3, 1.0, 2.0}) {
    const SurfaceMetric b = surface_metric_G(g, vec(std::cosh(a), std::sinh(a), 0, 0), vec(1, 0, 0, 0));
    const double sech2 = 1.0 / (std::cosh(a) * std::cosh(a));
    CHECK(b.G(1, 1) == doctest::Approx(sech2).epsilon(1e-12));
    CHECK(b.coefficient == doctest::Approx(sech2).epsilon(1e-12));
    CHECK(b.G(2, 2) == doctest::Approx(1.0));
  }
}

TEST_CASE("wave symbol decomposition") {
  const Mat4 g = minkowski().g;
  const SymbolPieces a = wave_symbol_decomposition(g, vec(1, 0, 0, 0), vec(0, 1, 0, 0), vec(1, 0, 0, 0));
  CHECK(a.xi_s == 0.0);
  CHECK((a.xi_bar - vec(0, 1, 0, 0)).norm() < 1e-15);
  CHECK(a.tangential == doctest::Approx(1.0));
  const SymbolPieces b = wave_symbol_decomposition(g, vec(1, 0, 0, 0), vec(1, 0, 0, 0), vec(1, 0, 0, 0));
  CHECK(b.xi_bar.norm() < 1e-15);
  CHECK(b.xi_s == 1.0);
  CHECK(b.total == doctest::Approx(b.normal + b.mixed + b.tangential));
  CHECK_THROWS_AS(wave_symbol_decomposition(g, vec(2, 0, 0, 0), vec(1, 0, 0, 0), vec(1, 0, 0, 0)), Error);
}

TEST_CASE("Monte-Carlo suites") {
  CHECK(mc_riemannian_H(1000, 1).violations == 0);
  CHECK(mc_em_positivity(1000, 2).violations == 0);
  CHECK(mc_surface_metric(1000, 3).violations == 0);
  CHECK(mc_wave_symbol(1000, 4).violations == 0);
}

TEST_CASE("stiff equation of state") {
  const double C = 1.5;
  const EquationOfState eos = EquationOfState::stiff(C);
  for (double n : {0.1, 1.0, 7.0}) {
    const EosValues v = eos_maps(eos, n);
    CHECK(v.p == doctest::Approx(C * n * n));
    CHECK(v.rho == doctest::Approx(C * n * n));
    CHECK(v.sigma == doctest::Approx(2 * C * n));
    CHECK(v.e == doctest::Approx(std::log(n / std::sqrt(v.sigma))));
    CHECK(v.e == doctest::Approx(0.5 * std::log(v.sigma) - std::log(2 * C)));
    CHECK(v.de == doctest::Approx(1.0 / (2.0 * v.sigma)));
    CHECK(v.eta2 == doctest::Approx(1.0));
  }
}

TEST_CASE("polytropic family") {
  const double C = 2.0, a2 = 1.0 / 3.0;
  const EquationOfState eos = EquationOfState::polytrope(C, a2);
  for (int k = 0; k < 100; ++k) {
    const double n = 0.02 * std::pow(2500.0, k / 99.0);
    const EosValues v = eos_maps(eos, n);
    CHECK(v.sigma == doctest::Approx((1 + a2) * C * std::pow(n, a2)));
    CHECK(v.eta2 == doctest::Approx(a2));
    CHECK(thermo_residual(eos, n) <= 1e-8);
    CHECK(std::abs(eos.n_of_sigma(v.sigma) - n) <= 1e-8 * n);
  }
  CHECK_THROWS_AS(EquationOfState::polytrope(1.0, 1.5), Error);
  CHECK_THROWS_AS(eos_maps(eos, 1e3), Error);
}
