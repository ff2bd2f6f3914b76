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

#include <optional>
#include <vector>

#include "fbe/jet.hpp"
#include "fbe/smoothing.hpp"

namespace fbe {

/// Initial data (h_0, V_0) on the reference configuration x_0.
struct InitialData {
  ScalarField h0;
  VecField V0;
  VecField x0;
  /// D_t h(0); when absent it follows from the continuity equation.
  std::optional<ScalarField> h1;
};

/// Rigidly rotating, radially pulsating data: V_0 = omega (-y^2, y^1),
/// h_0 = A (1 - r^2) + B (1 - r^2)^2 with B chosen so that the second
/// compatibility condition holds in the unsmoothed problem.  Taylor margin 2A.
InitialData pulsation_data(const Geometry& geo, double A, double omega);
/// Irrotational variant: V_0 = omega y (pure expansion), h_0 = A (1 - r^2).
InitialData expansion_data(const Geometry& geo, double A, double omega);
InitialData zero_data(const Geometry& geo);

struct CompatReport {
  std::vector<double> margins;     // max over the boundary of |h_k|, k = 0..order
  double continuity = 0.0;         // max |e1 h_1 + div~ V_0|
  bool pass(double tol) const;
};

CompatReport check_compat(const Geometry& geo, const DataJet& jet);

struct CorrectionOptions {
  double tol = 1e-11;       // on the Sobolev-surrogate size of each increment
  int max_iter = 60;
  double e1_max = 0.5;      // smallness hypothesis on e1
};

struct CorrectionResult {
  InitialData data;                 // (h_0^eps, V_0^eps)
  DataJet jet;                      // jet of the corrected data at eps
  int iterations = 0;
  std::vector<double> increments;   // surrogate norm of u^nu - u^{nu-1}
  std::vector<double> contraction;  // ratios of successive increments
  double velocity_change = 0.0;     // ||V_0^eps - V_0||_{L2}
  double enthalpy_change = 0.0;     // ||h_0^eps - h_0||_{L2}
};

/// Corrects eps = 0 compatible data so that the jet of the smoothed problem
/// has vanishing boundary traces to the given order (2 or 3): h_0 and h_1 are
/// shifted by u_0, u_1 (zero on the boundary) with h_{k+2}^eps = h_{k+2}^0,
/// and V_0^eps = V_0 + grad u_{-1} with Delta u_{-1} = -e1 u_1, so that the
/// continuity equation keeps e1 h_1^eps = -div V_0^eps (to the accuracy of
/// the discrete Laplacian; h_1^eps is carried explicitly).
CorrectionResult correct_data_for_eps(const SmoothingOperator& S, const InitialData& data, int order,
                                      double e1, const CorrectionOptions& opt = {});

/// sqrt(||u||^2 + ||grad u||^2 + ||grad grad u||^2)
double sobolev2_surrogate(const Geometry& geo, const ScalarField& u);

}  // namespace fbe
