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

#include "fbe/fields.hpp"
#include "fbe/geometry.hpp"
#include "fbe/smoothing.hpp"

namespace fbe {

/// Time derivatives at t = 0 of a formal power-series solution of the
/// smoothed system, h_k = D_t^k h(0) and V_k = D_t^k V(0), k = 0..order.
struct DataJet {
  int order = 0;
  double eps = 0.0;
  double e1 = 1.0;
  VecField x0;
  std::vector<ScalarField> h;
  std::vector<VecField> V;
  std::vector<VecField> xt;  // D_t^k x~(0)

  /// Truncated Taylor polynomial of V at time t.
  VecField V_at(double t) const;
  ScalarField h_at(double t) const;
  ScalarField ht_at(double t) const;
  VecField xt_at(double t) const;
};

constexpr int kMaxJetOrder = 3;

/// Differentiates the smoothed system in time at t = 0.  h_1 comes from the
/// continuity equation e1 h_1 = -div~ V_0 unless given explicitly.
DataJet power_series_coeffs(const SmoothingOperator& S, const ScalarField& h0, const VecField& V0,
                            const VecField& x0, int order, double e1,
                            const std::optional<ScalarField>& h1 = std::nullopt);

}  // namespace fbe
