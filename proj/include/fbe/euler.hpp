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

#include <memory>
#include <vector>

#include "fbe/compat.hpp"
#include "fbe/fields.hpp"
#include "fbe/geometry.hpp"
#include "fbe/smoothing.hpp"
#include "fbe/wave.hpp"

namespace fbe {

/// One time slice of the Lagrangian unknowns.  xt and Vt are the smoothed
/// coordinates and velocity the slice was advanced with.
struct LagrangianState {
  double t = 0.0;
  VecField x;
  VecField V;
  WaveState wave;
  VecField xt;
  VecField Vt;
};

/// Flow Jacobian of the slice's smoothed coordinates.
FlowJacobian slice_jacobian(const Geometry& geo, const LagrangianState& s);

struct IterationConfig {
  double eps = 0.0;
  double dt = 0.0;          // <= 0 picks 0.9 of the CFL limit at t = 0
  double T = 0.1;
  double picard_tol = 1e-8;
  int max_picard = 30;
  double e1 = 1.0;
  int r_diag = 2;
  bool eps_horizon = true;  // cap T at 0.5 eps when eps > 0
  bool taylor_guard = true;
  bool collocated_kick = true;  // div~ d~ h in the wave kick; false uses the FV form

  double horizon() const;
};

struct TrajectorySeries {
  std::shared_ptr<const Geometry> geo;
  double eps = 0.0;
  double e1 = 1.0;
  double dt = 0.0;
  std::vector<LagrangianState> slices;

  // Taylor-sign bookkeeping, filled when the guard is on.
  double taylor_initial = 0.0;
  double taylor_min = 0.0;
  bool taylor_violation = false;

  std::vector<VecField> velocities() const;
  std::vector<ScalarField> enthalpies() const;
  double T() const { return slices.empty() ? 0.0 : slices.back().t; }
};

struct SmoothedPath {
  std::vector<VecField> Vt;
  std::vector<VecField> xt;
};

/// Vt = S_eps^2 V per slice and xt integrated from x0 with the trapezoid
/// rule, the same rule that transports x.
SmoothedPath smooth_pair(const SmoothingOperator& S, const std::vector<VecField>& V,
                         const VecField& x0, double dt);

/// D_t h(0) of the data; falls back to -div~ V_0 / e1 at x_0.
ScalarField initial_ht(const Geometry& geo, const InitialData& data, double e1);

/// Step count and step size for the horizon T.
int time_steps(const Geometry& geo, const InitialData& data, const IterationConfig& cfg, double T,
               double& dt);

/// The linear system with frozen smoothed coordinates: V, h, D_t h and x are
/// advanced drift-kick-drift with the half-step gradient of h.
TrajectorySeries linear_solve(std::shared_ptr<const Geometry> geo, const SmoothedPath& path,
                              const InitialData& data, const IterationConfig& cfg, double dt);

struct PicardReport {
  int iterations = 0;
  bool converged = false;
  double horizon = 0.0;
  std::vector<double> increments;   // sup_t ||V^{k+1} - V^k||_{L2}
  std::vector<double> contraction;  // increments[k] / increments[k-1]
  std::vector<double> fixed_point_residual;  // ||D_t V + d~h|| with x~ rebuilt from V
  std::vector<double> truncation_estimate;   // same with the frozen coordinates
  double max_residual_ratio = 0.0;
};

/// Picard iteration for the nonlinear smoothed problem, started from the
/// truncated power series of the data.  Throws NonConvergence carrying the
/// increment history; \p report is filled before throwing.
TrajectorySeries picard_iterate(const SmoothingOperator& S, const InitialData& data,
                                const IterationConfig& cfg, PicardReport* report = nullptr);

/// The eps = 0 scheme: x~ = x, V~ = V, a single forward pass.
TrajectorySeries run_unsmoothed(std::shared_ptr<const Geometry> geo, const InitialData& data,
                                const IterationConfig& cfg);

/// Continues the eps = 0 scheme from a stored slice for \p steps steps;
/// \p taylor_initial is the margin the guard compares against.
TrajectorySeries run_unsmoothed_from(std::shared_ptr<const Geometry> geo, const LagrangianState& start,
                                     double dt, int steps, const IterationConfig& cfg,
                                     double taylor_initial);

/// ||D_t V + d~h||_{L2} per slice, d~ taken with the given coordinates.
std::vector<double> momentum_residual(const TrajectorySeries& series,
                                      const std::vector<VecField>& xt);

}  // namespace fbe
