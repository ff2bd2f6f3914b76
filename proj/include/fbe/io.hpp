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
#include <string>

#include <json.hpp>

#include "fbe/diagnostics.hpp"
#include "fbe/euler.hpp"

namespace fbe {

constexpr std::uint32_t kCheckpointVersion = 1;

/// A slice on disk: a 64-byte little-endian descriptor followed by the
/// fields x, V, h, D_t h, x~, V~ as 64-bit floats, node-major per field.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  int d = 2;
  int n_tangential = 0;
  int n_radial = 0;
  std::uint64_t n = 0;
  double dt = 0.0;
  std::uint64_t config_hash = 0;
  double taylor_initial = 0.0;
  LagrangianState state;
};

void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

/// Rows t, E_total, ... one per slice at the given cadence; %.17g.
void write_trace_csv(const std::string& path, const EnergyTrace& tr, int every = 1);
std::string trace_csv(const EnergyTrace& tr, int every = 1);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace fbe
