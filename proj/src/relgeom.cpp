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
#include "fbe/relgeom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fbe/errors.hpp"

namespace fbe {

std::array<Mat4, 4> LorentzMetric::christoffel() const {
  const Mat4 gi = inverse();
  std::array<Mat4, 4> G{};
  for (int mu = 0; mu < 4; ++mu) {
    G[mu].setZero();
    for (int nu = 0; nu < 4; ++nu)
      for (int al = 0; al < 4; ++al) {
        double s = 0.0;
        for (int la = 0; la < 4; ++la)
          s += gi(mu, la) * (dg[nu](la, al) + dg[al](la, nu) - dg[la](nu, al));
        G[mu](nu, al) = 0.5 * s;
      }
  }
  return G;
}

Vec4 LorentzMetric::tau() const {
  const double gtt = inverse()(0, 0);  // g(grad t, grad t)
  if (!(gtt < 0.0)) fail(ErrorKind::MetricConsistency, "the time function is not timelike");
  Vec4 t = Vec4::Zero();
  t[0] = 1.0 / std::sqrt(-gtt);
  return t;
}

Vec4 LorentzMetric::time_axis() const { return -inverse() * tau(); }

bool LorentzMetric::lorentzian() const {
  Eigen::SelfAdjointEigenSolver<Mat4> es(g);
  const auto& ev = es.eigenvalues();
  return ev[0] < 0.0 && ev[1] > 0.0;
}

LorentzMetric minkowski() {
  LorentzMetric m;
  m.g = Mat4::Identity();
  m.g(0, 0) = -1.0;
  for (auto& d : m.dg) d.setZero();
  return m;
}

double inner(const Mat4& g, const Vec4& X, const Vec4& Y) { return X.dot(g * Y); }

bool timelike(const Mat4& g, const Vec4& X) { return inner(g, X, X) < 0.0; }

bool future_directed(const LorentzMetric& m, const Vec4& X) { return inner(m.g, X, m.time_axis()) < 0.0; }

Mat4 riemannian_H(const Mat4& g, const Vec4& tau) {
  const Mat4 H = g + 2.0 * tau * tau.transpose();
  Eigen::SelfAdjointEigenSolver<Mat4> es(H);
  if (!(es.eigenvalues()[0] > 0.0)) {
    std::ostringstream os;
    os << "H is not positive definite (min eigenvalue " << es.eigenvalues()[0] << ")";
    fail(ErrorKind::MetricConsistency, os.str());
  }
  return H;
}

double h_norm_covector(const Mat4& H, const Vec4& beta) { return std::sqrt(beta.dot(H.ldlt().solve(beta))); }

double h_norm_vector(const Mat4& H, const Vec4& X) { return std::sqrt(X.dot(H * X)); }

EmPositivity em_positivity(const Vec4& Z, const Vec4& X, const Vec4& N, const LorentzMetric& m) {
  const Mat4& g = m.g;
  if (!timelike(g, X) || !future_directed(m, X))
    fail(ErrorKind::Precondition, "X must be timelike and future directed");
  if (!timelike(g, N) || !future_directed(m, N))
    fail(ErrorKind::Precondition, "N must be timelike and future directed");
  const Vec4 n = N / std::sqrt(-inner(g, N, N));
  EmPositivity out;
  out.Q = 2.0 * inner(g, Z, X) * inner(g, Z, n) - inner(g, X, n) * inner(g, Z, Z);
  const double XN = -inner(g, X, n);
  const double ZN = -inner(g, Z, n);
  const Vec4 PX = X - XN * n;
  const Vec4 PZ = Z - ZN * n;
  out.bound = (XN - std::sqrt(std::max(0.0, inner(g, PX, PX)))) * (ZN * ZN + inner(g, PZ, PZ));
  return out;
}

SurfaceMetric surface_metric_G(const Mat4& g, const Vec4& V, const Vec4& n) {
  if (!timelike(g, V)) fail(ErrorKind::Precondition, "V must be timelike");
  const double nV = inner(g, n, V);
  if (nV == 0.0) fail(ErrorKind::Precondition, "g(n, V) vanishes");
  const Vec4 nflat = g * n;
  SurfaceMetric s;
  s.gbar = g + nflat * nflat.transpose();
  // Vbar = V + g(n, V) n is the part of V tangent to the slice.
  const Vec4 Vbar = V + nV * n;
  const Vec4 Vb = g * Vbar;
  s.G = s.gbar - Vb * Vb.transpose() / (nV * nV);
  s.coefficient = -inner(g, V, V) / (nV * nV);
  return s;
}

SymbolPieces wave_symbol_decomposition(const Mat4& g, const Vec4& V, const Vec4& xi, const Vec4& n_s) {
  const double Vn = V.dot(n_s);
  if (std::abs(Vn - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "V^a n_a = " << Vn << ", expected 1";
    fail(ErrorKind::Normalization, os.str());
  }
  const Mat4 gi = g.inverse();
  // gamma_a^b = delta_a^b - n_a V^b
  const Mat4 gamma = Mat4::Identity() - n_s * V.transpose();
  SymbolPieces p;
  p.xi_s = V.dot(xi);
  p.xi_bar = gamma * xi;
  p.normal = n_s.dot(gi * n_s) * p.xi_s * p.xi_s;
  p.mixed = 2.0 * p.xi_s * n_s.dot(gi * p.xi_bar);
  p.tangential = p.xi_bar.dot(gi * p.xi_bar);
  p.total = xi.dot(gi * xi);
  p.G1 = gamma.transpose() * gi * gamma;
  return p;
}

EquationOfState::EquationOfState(std::string name, double C, double a2, double n_min, double n_max)
    : name_(std::move(name)), C_(C), a2_(a2), n_min_(n_min), n_max_(n_max) {
  if (!(C > 0.0)) fail(ErrorKind::Domain, "equation of state needs C > 0");
  if (!(a2 > 0.0)) fail(ErrorKind::Domain, "equation of state needs a positive sound speed");
  if (a2 > 1.0) fail(ErrorKind::Domain, "sound speed exceeds the speed of light (eta^2 > 1)");
  if (!(n_min > 0.0 && n_max > n_min)) fail(ErrorKind::Domain, "bad density range");
}

double EquationOfState::energy_density(double n) const { return C_ * std::pow(n, 1.0 + a2_); }
double EquationOfState::pressure(double n) const { return a2_ * energy_density(n); }
double EquationOfState::denergy(double n) const { return C_ * (1.0 + a2_) * std::pow(n, a2_); }
double EquationOfState::dpressure(double n) const { return a2_ * denergy(n); }

double EquationOfState::n_of_sigma(double s) const {
  double lo = std::log(n_min_), hi = std::log(n_max_);
  if (!(s >= sigma(n_min_) && s <= sigma(n_max_))) {
    std::ostringstream os;
    os << "enthalpy " << s << " outside the sampled range";
    fail(ErrorKind::Domain, os.str());
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double n = std::exp(u);
    const double f = sigma(n) - s;
    if (f > 0.0) hi = u; else lo = u;
    // d sigma / d log n = n sigma'(n) = p'(n) by the thermodynamic identity.
    const double fp = dpressure(n);
    double next = u - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15 * std::max(1.0, std::abs(u))) return std::exp(next);
    u = next;
  }
  return std::exp(u);
}

EosValues eos_maps(const EquationOfState& eos, double n) {
  if (!(n >= eos.n_min() && n <= eos.n_max())) {
    std::ostringstream os;
    os << "density " << n << " outside [" << eos.n_min() << ", " << eos.n_max() << "]";
    fail(ErrorKind::Domain, os.str());
  }
  EosValues v;
  v.n = n;
  v.p = eos.pressure(n);
  v.rho = eos.energy_density(n);
  v.sigma = eos.sigma(n);
  v.e = std::log(n / std::sqrt(v.sigma));
  // e'(sigma) = n'(sigma)/n - 1/(2 sigma), n'(sigma) = n / p'(n).
  v.de = 1.0 / eos.dpressure(n) - 0.5 / v.sigma;
  v.eta2 = eos.dpressure(n) / eos.denergy(n);
  if (v.eta2 > 1.0 + 1e-12) fail(ErrorKind::Domain, "sound speed exceeds the speed of light");
  return v;
}

EosValues eos_maps_sigma(const EquationOfState& eos, double sigma) {
  return eos_maps(eos, eos.n_of_sigma(sigma));
}

double thermo_residual(const EquationOfState& eos, double n) {
  const double h = 1e-5 * n;
  const double drho = (eos.energy_density(n + h) - eos.energy_density(n - h)) / (2.0 * h);
  const double rhs = (eos.pressure(n) + eos.energy_density(n)) / n;
  return std::abs(drho - rhs) / rhs;
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  Vec4 gaussian() {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v[i] = normal(rng);
    return v;
  }

  // Orthonormal frame with e0 the future time axis.
  std::array<Vec4, 4> frame(const LorentzMetric& m) {
    std::array<Vec4, 4> e;
    e[0] = m.time_axis();
    for (int a = 1; a < 4; ++a) {
      Vec4 v = Vec4::Unit(a);
      v += inner(m.g, v, e[0]) * e[0];
      for (int b = 1; b < a; ++b) v -= inner(m.g, v, e[b]) * e[b];
      e[a] = v / std::sqrt(inner(m.g, v, v));
    }
    return e;
  }

  // Future timelike vector: spatial speed below 0.95 in the frame, random scale.
  Vec4 future_timelike(const LorentzMetric& m) {
    const auto e = frame(m);
    Eigen::Vector3d dir(normal(rng), normal(rng), normal(rng));
    dir.normalize();
    const double speed = 0.95 * std::cbrt(unit(rng));
    const double scale = 0.5 + 1.5 * unit(rng);
    Vec4 X = e[0];
    for (int i = 0; i < 3; ++i) X += speed * dir[i] * e[i + 1];
    return scale * X / std::sqrt(1.0 - speed * speed);
  }
};

bool below(double value, double bound, double scale) {
  return value < bound - 1e-12 * std::max(1.0, scale);
}

}  // namespace

LorentzMetric random_metric(std::uint64_t seed, double amp) {
  Sampler s(seed);
  LorentzMetric m = minkowski();
  Mat4 A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = s.normal(s.rng);
  m.g += amp * 0.5 * (A + A.transpose());
  return m;
}

McResult mc_riemannian_H(long draws, std::uint64_t seed) {
  std::mt19937_64 seeds(seed);
  McResult r;
  for (long k = 0; k < draws; ++k) {
    const LorentzMetric m = random_metric(seeds(), 0.01);
    const Mat4 H = m.g + 2.0 * m.tau() * m.tau().transpose();
    Eigen::SelfAdjointEigenSolver<Mat4> es(H);
    const double lo = es.eigenvalues()[0];
    ++r.draws;
    if (!(lo > 0.0)) {
      ++r.violations;
      r.worst = std::min(r.worst, lo);
    }
  }
  return r;
}

McResult mc_em_positivity(long draws, std::uint64_t seed) {
  Sampler s(seed);
  McResult r;
  for (long k = 0; k < draws; ++k) {
    const LorentzMetric m = random_metric(s.rng(), 0.01);
    const Vec4 X = s.future_timelike(m);
    const Vec4 N = s.future_timelike(m);
    const Vec4 Z = s.gaussian();
    const EmPositivity q = em_positivity(Z, X, N, m);
    ++r.draws;
    if (below(q.Q, q.bound, std::max(std::abs(q.Q), std::abs(q.bound)))) {
      ++r.violations;
      r.worst = std::min(r.worst, q.Q - q.bound);
    }
  }
  return r;
}

McResult mc_surface_metric(long draws, std::uint64_t seed) {
  Sampler s(seed);
  McResult r;
  for (long k = 0; k < draws; ++k) {
    const LorentzMetric m = random_metric(s.rng(), 0.01);
    const Vec4 n = m.time_axis();
    const Vec4 V = s.future_timelike(m);
    const SurfaceMetric sm = surface_metric_G(m.g, V, n);
    Vec4 X = s.gaussian();
    X -= m.tau().dot(X) * n;  // tangent to the slice: tau(X) = 0
    const double GXX = X.dot(sm.G * X);
    const double gbar = X.dot(sm.gbar * X);
    ++r.draws;
    if (below(GXX, sm.coefficient * gbar, std::abs(gbar)) || !(sm.coefficient > 0.0)) {
      ++r.violations;
      r.worst = std::min(r.worst, GXX - sm.coefficient * gbar);
    }
  }
  return r;
}

McResult mc_wave_symbol(long draws, std::uint64_t seed) {
  Sampler s(seed);
  McResult r;
  for (long k = 0; k < draws; ++k) {
    const LorentzMetric m = random_metric(s.rng(), 0.01);
    const Vec4 V = s.future_timelike(m);
    const Vec4 tau = m.tau();
    const Vec4 n_s = tau / V.dot(tau);
    const Vec4 xi = s.gaussian();
    const SymbolPieces p = wave_symbol_decomposition(m.g, V, xi, n_s);
    const double sum = p.normal + p.mixed + p.tangential;
    const double scale = std::abs(p.normal) + std::abs(p.mixed) + std::abs(p.tangential);
    ++r.draws;
    bool bad = std::abs(p.total - sum) > 1e-12 * std::max(1.0, scale);
    if (p.xi_bar.norm() > 1e-8 && !(p.tangential > 0.0)) bad = true;
    if (bad) {
      ++r.violations;
      r.worst = std::min(r.worst, -std::abs(p.total - sum));
    }
  }
  return r;
}

}  // namespace fbe
