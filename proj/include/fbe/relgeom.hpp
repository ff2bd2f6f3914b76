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
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace fbe {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// A Lorentz metric at a point with its first derivatives, signature
/// (-,+,+,+); index 0 is the time coordinate.
struct LorentzMetric {
  Mat4 g = Mat4::Identity();
  std::array<Mat4, 4> dg{};  // dg[a](m, n) = d_a g_mn

  Mat4 inverse() const { return g.inverse(); }
  /// Gamma[mu](nu, alpha)
  std::array<Mat4, 4> christoffel() const;
  /// Unit covector of the time function t = x^0: dt / (-g(grad t, grad t))^{1/2}.
  Vec4 tau() const;
  /// The future unit vector generating the time axis, T^mu = -g^{mu nu} tau_nu.
  Vec4 time_axis() const;
  bool lorentzian() const;
};

LorentzMetric minkowski();

double inner(const Mat4& g, const Vec4& X, const Vec4& Y);
bool timelike(const Mat4& g, const Vec4& X);
bool future_directed(const LorentzMetric& m, const Vec4& X);

/// H = g + 2 tau (x) tau; throws MetricConsistency unless positive definite.
Mat4 riemannian_H(const Mat4& g, const Vec4& tau);
/// |beta|_H for a covector (H^{-1}) and a vector (H).
double h_norm_covector(const Mat4& H, const Vec4& beta);
double h_norm_vector(const Mat4& H, const Vec4& X);

struct EmPositivity {
  double Q = 0.0;      // Q[Z](X, N) with N normalised
  double bound = 0.0;  // (X^N - |P_N X|)((Z^N)^2 + g(P_N Z, P_N Z))
};

/// Q[Z](X, N) = 2 g(Z,X) g(Z,N) - g(X,N) g(Z,Z) for future timelike X, N.
EmPositivity em_positivity(const Vec4& Z, const Vec4& X, const Vec4& N, const LorentzMetric& m);

struct SurfaceMetric {
  Mat4 G;              // G(X, Y) = gbar(X, Y) - g(Vbar, X) g(Vbar, Y) / g(n, V)^2
  Mat4 gbar;           // g restricted to the slice: g + n_flat (x) n_flat
  double coefficient;  // -g(V, V) / g(n, V)^2
};

/// n is the unit future normal vector of the slice.
SurfaceMetric surface_metric_G(const Mat4& g, const Vec4& V, const Vec4& n);

struct SymbolPieces {
  double xi_s = 0.0;      // V^a xi_a
  Vec4 xi_bar;            // gamma xi, annihilates V
  double normal = 0.0;    // g^{ab} n_a n_b xi_s^2
  double mixed = 0.0;     // 2 g^{ab} n_a xi_s xibar_b
  double tangential = 0;  // g^{ab} xibar_a xibar_b = G1(xi, xi)
  double total = 0.0;     // g^{ab} xi_a xi_b
  Mat4 G1;
};

/// Splits the wave symbol along the level sets of s with conormal n_s,
/// V^a (n_s)_a = 1.
SymbolPieces wave_symbol_decomposition(const Mat4& g, const Vec4& V, const Vec4& xi, const Vec4& n_s);

/// Barotropic closures rho = C n^{1+a2}, p = a2 rho (a2 = 1 is the stiff
/// closure p = rho = C n^2).
class EquationOfState {
 public:
  EquationOfState(std::string name, double C, double a2, double n_min = 1e-2, double n_max = 1e2);
  static EquationOfState stiff(double C) { return EquationOfState("stiff", C, 1.0); }
  static EquationOfState polytrope(double C, double a2) { return EquationOfState("polytrope", C, a2); }

  const std::string& name() const { return name_; }
  double n_min() const { return n_min_; }
  double n_max() const { return n_max_; }
  double pressure(double n) const;
  double energy_density(double n) const;
  double dpressure(double n) const;
  double denergy(double n) const;
  double sigma(double n) const { return (pressure(n) + energy_density(n)) / n; }
  /// Inverse of sigma(n) by safeguarded Newton on log n.
  double n_of_sigma(double sigma) const;

 private:
  std::string name_;
  double C_, a2_, n_min_, n_max_;
};

struct EosValues {
  double n, p, rho, sigma, e, de, eta2;
};

/// All thermodynamic quantities at particle density n; Domain error outside
/// the sampled range.
EosValues eos_maps(const EquationOfState& eos, double n);
EosValues eos_maps_sigma(const EquationOfState& eos, double sigma);
/// |d rho/dn - (p + rho)/n| / ((p + rho)/n) with a centred difference.
double thermo_residual(const EquationOfState& eos, double n);

struct McResult {
  long draws = 0;
  long violations = 0;
  double worst = 0.0;  // most negative margin seen (0 if none)
};

/// A random metric near Minkowski: eta + amp * sym(N(0,1)).
LorentzMetric random_metric(std::uint64_t seed, double amp);

McResult mc_riemannian_H(long draws, std::uint64_t seed);
McResult mc_em_positivity(long draws, std::uint64_t seed);
McResult mc_surface_metric(long draws, std::uint64_t seed);
McResult mc_wave_symbol(long draws, std::uint64_t seed);

}  // namespace fbe
