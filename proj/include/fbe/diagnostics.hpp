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

#include <string>
#include <vector>

#include "fbe/euler.hpp"
#include "fbe/fields.hpp"
#include "fbe/geometry.hpp"
#include "fbe/smoothing.hpp"

namespace fbe {

/// Energy of the barotropic fluid with rho = exp(e1 h), p = (rho - 1) / e1,
/// minus the quiescent value: int (|V|^2 + Q(rho)) rho kappa dy.
double physical_energy(const Geometry& geo, const VecField& x, const VecField& V,
                       const ScalarField& h, double e1);

/// min over the boundary of -N~ . d~h, with N~ the unit outward normal in
/// the smoothed coordinates.
double taylor_margin(const Geometry& geo, const ScalarField& h, const FlowJacobian& jac);

/// e1 D_t h + div~ V at every node.
ScalarField continuity_defect(const Geometry& geo, const LagrangianState& s, const FlowJacobian& jac,
                              double e1);

/// L2 norm over the open domain (boundary nodes dropped), and over the
/// boundary with the boundary quadrature.
double interior_norm(const Geometry& geo, ScalarField f);
double boundary_norm(const Geometry& geo, const ScalarField& f);

/// ||e1 D_t h + div~ V||_{L2(Omega)} per slice.  On the boundary h is pinned
/// and the trace is reported separately.
std::vector<double> continuity_residual(const TrajectorySeries& series);

/// The words of length <= r_diag used by the energy diagnostics: the empty
/// word, the rotation, D_t, and their product.
std::vector<Word> diagnostic_words(int r_diag);

struct GoodUnknowns {
  std::vector<VecField> V;
  std::vector<ScalarField> h;
  std::vector<VecField> Tx;    // T^I x
  std::vector<VecField> Txe;   // S_eps T^I x_eps, x_eps = S_eps x
};

/// V^I = T^I V - d~V . S_eps T^I x_eps and h^I = T^I h - d~h . S_eps T^I x_eps
/// for every slice of the series.
GoodUnknowns good_unknowns(const TrajectorySeries& series, const SmoothingOperator& S,
                           const TangentialBasis& basis, const Word& I);

struct HigherEnergy {
  std::vector<double> E, B, BN;
  bool taylor_degenerate = false;
};

HigherEnergy higher_energy(const TrajectorySeries& series, const SmoothingOperator& S,
                           const TangentialBasis& basis, const Word& I);

struct CurlRecord {
  std::vector<double> K;         // ||K^J||_{L2}
  std::vector<double> DtK;       // ||D_t K^J||_{L2}
  std::vector<double> D;         // ||D^J||_{L2}
  double c_hat = 0.0;            // max |D_t curl~ V| / (|d~V| |d~V~|), J empty only
  std::vector<double> floor;     // ||curl~V(0)|| + int ||curl~ d~h||, J empty only
};

CurlRecord curl_divergence_residuals(const TrajectorySeries& series, const TangentialBasis& basis,
                                     const Word& J);

/// Smallest C with E(t) <= E(0) exp(C t) on the sampled times (t > 0).
double fit_growth(const std::vector<double>& t, const std::vector<double>& E);

struct EnergyTrace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double C_hat = 0.0;           // one growth constant for every E^I
  double c_hat = 0.0;           // curl transport constant
  double final_continuity = 0.0;
  double min_taylor = 0.0;
  bool taylor_degenerate = false;
};

/// All monitored quantities for a trajectory, one row per slice.
EnergyTrace energy_trace(const TrajectorySeries& series, const SmoothingOperator& S, int r_diag);

}  // namespace fbe
