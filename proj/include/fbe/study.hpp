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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbe/compat.hpp"
#include "fbe/config.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/errors.hpp"
#include "fbe/euler.hpp"

namespace fbe {

struct RunOutcome {
  bool ok = false;
  ErrorKind kind = ErrorKind::Configuration;
  std::string message;
  InitialData data;
  TrajectorySeries series;
  PicardReport picard;
  EnergyTrace trace;
  int correction_iterations = 0;
  nlohmann::json summary;
};

/// Builds the data (eps-corrected when eps > 0), runs the Picard iteration
/// or the eps = 0 scheme, and computes the diagnostics.  Library errors are
/// captured in the outcome rather than thrown.  \p data replaces the
/// configured profile (it is still eps-corrected when requested).
RunOutcome execute_run(const RunConfig& c, bool with_trace = true, const InitialData* data = nullptr);

/// Least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Max interior nodal error at time T of the leapfrog solver on
/// h = (1 - r^2) sin t, identity coordinates.  The forcing is the residual
/// of the discrete operator, so this isolates the time-stepping error.
double wave_manufactured_error(std::shared_ptr<const Geometry> geo, double e1, double dt, double T);

/// Max interior error of the finite-volume Dirichlet solver.  Cases:
/// "paraboloid" (1 - r^2), "manufactured" ((1 - r^2)(1 + 0.2 y1 + 0.3 y1 y2))
/// and "perturbed" (the same h in the coordinates y + 0.05 (sin y2, y1^2)).
double dirichlet_error(int n_tangential, int n_radial, const std::string& which);

/// ||S_eps f - f||_{L2} for the reference test function.
double smoothing_error(std::shared_ptr<const Geometry> geo, double eps);

/// The mildly perturbed coordinates y + 0.05 (sin y2, y1^2) used by the
/// elliptic oracles.
VecField perturbed_coordinates(const Geometry& geo);

struct DivCurlConstants {
  int fields = 0;
  double pointwise = 0.0;        // fitted on the first half of the fields
  double l2 = 0.0;
  int pointwise_violations = 0;  // on the second half
  int l2_violations = 0;
};

/// Random cubic vector fields in the perturbed coordinates; constants are
/// fitted (1.5 times the training maximum) on half of the draws and checked
/// on the other half.
DivCurlConstants divcurl_constants(int n_tangential, int n_radial, int fields, std::uint64_t seed);

/// Runs the sweep members (at most \p threads at a time) and aggregates.
nlohmann::json cmd_study(const RunConfig& base, const std::string& var, const std::vector<double>& values,
                         int threads);

struct SuiteVerdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  long draws = 10000;
  double kernel_scale = 1.0;  // != 1 corrupts the smoothing kernel (negative control)
  int n_tangential = 128;
  int n_radial = 16;
};

std::vector<SuiteVerdict> run_checks(const CheckOptions& opt);

}  // namespace fbe
