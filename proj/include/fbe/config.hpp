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

#include <json.hpp>

#include "fbe/compat.hpp"
#include "fbe/euler.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

constexpr int kConfigVersion = 1;

struct RunConfig {
  int version = kConfigVersion;
  // geometry
  int d = 2;
  int n_tangential = 128;
  int n_radial = 16;
  // physics
  double e1 = 0.25;
  std::string eos = "stiff";
  double eos_C = 1.0;
  double eos_a2 = 1.0;
  // smoothing
  double eps = 0.1;
  // time
  double dt = 0.0;  // 0 = automatic from the CFL limit
  double T = 0.1;
  bool eps_horizon = true;
  // iteration
  double picard_tol = 1e-8;
  int max_picard = 30;
  // diagnostics
  int r_diag = 2;
  int trace_every = 1;
  // data recipe
  std::string profile = "pulsation";
  double amplitude = 0.5;
  double omega = 1.0;
  bool correct = true;
  int jet_order = 2;
  // Monte-Carlo
  std::uint64_t seed = 1;
};

/// Parses a configuration document; unknown keys and bad values throw
/// Configuration errors naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
/// Reads and parses a JSON file; syntax errors report line and column.
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& c);
/// Applies name=value overrides (the --sweep variables).
void set_field(RunConfig& c, const std::string& name, double value);

IterationConfig iteration_config(const RunConfig& c);
std::shared_ptr<const Geometry> build_geometry(const RunConfig& c);
/// The named analytic profile at eps = 0: zero, pulsation, expansion.
InitialData make_profile(const Geometry& geo, const RunConfig& c);

}  // namespace fbe
