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
#include "fbe/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fbe/errors.hpp"

namespace fbe {

namespace {

using nlohmann::json;

// Reads the keys of one section, rejecting anything not listed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(ErrorKind::Configuration, "section '" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(ErrorKind::Configuration, "unknown key '" + path(it.key()) + "'");
  }
  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::Configuration, "field '" + path(key) + "' has the wrong type");
    }
  }
  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) fail(ErrorKind::Configuration, "field '" + field + "' " + why);
}

void validate(const RunConfig& c) {
  require(c.version == kConfigVersion, "version", "must be " + std::to_string(kConfigVersion));
  require(c.d == 2 || c.d == 3, "geometry.d", "must be 2 or 3");
  require(c.n_tangential >= 8, "geometry.n_tangential", "must be at least 8");
  require(c.n_radial >= 4, "geometry.n_radial", "must be at least 4");
  require(c.e1 > 0.0, "physics.e1", "must be positive");
  require(c.eos == "stiff" || c.eos == "polytrope", "physics.eos.name", "must be stiff or polytrope");
  require(c.eos_C > 0.0, "physics.eos.C", "must be positive");
  require(c.eos_a2 > 0.0 && c.eos_a2 <= 1.0, "physics.eos.a2", "must lie in (0, 1]");
  require(c.eps >= 0.0, "smoothing.eps", "must be nonnegative");
  require(c.dt >= 0.0, "time.dt", "must be nonnegative");
  require(c.T > 0.0, "time.T", "must be positive");
  require(c.picard_tol > 0.0, "iteration.picard_tol", "must be positive");
  require(c.max_picard >= 1, "iteration.max_picard", "must be at least 1");
  require(c.r_diag >= 0 && c.r_diag <= 2, "diagnostics.r_diag", "must lie in [0, 2]");
  require(c.trace_every >= 1, "diagnostics.trace_every", "must be at least 1");
  require(c.profile == "zero" || c.profile == "pulsation" || c.profile == "expansion", "data.profile",
          "must be zero, pulsation or expansion");
  require(c.jet_order >= 0 && c.jet_order <= 3, "data.jet_order", "must lie in [0, 3]");
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  {
    Section top(j, "");
    top.get("version", c.version);
    top.get("seed", c.seed);
    if (const json* s = top.sub("geometry")) {
      Section g(*s, "geometry");
      g.get("d", c.d);
      g.get("n_tangential", c.n_tangential);
      g.get("n_radial", c.n_radial);
    }
    if (const json* s = top.sub("physics")) {
      Section p(*s, "physics");
      p.get("e1", c.e1);
      if (const json* e = p.sub("eos")) {
        Section q(*e, "physics.eos");
        q.get("name", c.eos);
        q.get("C", c.eos_C);
        q.get("a2", c.eos_a2);
      }
    }
    if (const json* s = top.sub("smoothing")) {
      Section p(*s, "smoothing");
      p.get("eps", c.eps);
    }
    if (const json* s = top.sub("time")) {
      Section p(*s, "time");
      p.get("dt", c.dt);
      p.get("T", c.T);
      p.get("eps_horizon", c.eps_horizon);
    }
    if (const json* s = top.sub("iteration")) {
      Section p(*s, "iteration");
      p.get("picard_tol", c.picard_tol);
      p.get("max_picard", c.max_picard);
    }
    if (const json* s = top.sub("diagnostics")) {
      Section p(*s, "diagnostics");
      p.get("r_diag", c.r_diag);
      p.get("trace_every", c.trace_every);
    }
    if (const json* s = top.sub("data")) {
      Section p(*s, "data");
      p.get("profile", c.profile);
      p.get("amplitude", c.amplitude);
      p.get("omega", c.omega);
      p.get("correct", c.correct);
      p.get("jet_order", c.jet_order);
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Configuration, "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // Recover line and column from the byte offset.
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
    size_t line = 1, col = 1;
    for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": " << e.what();
    fail(ErrorKind::Configuration, os.str());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  return json{{"version", c.version},
              {"seed", c.seed},
              {"geometry", {{"d", c.d}, {"n_tangential", c.n_tangential}, {"n_radial", c.n_radial}}},
              {"physics", {{"e1", c.e1}, {"eos", {{"name", c.eos}, {"C", c.eos_C}, {"a2", c.eos_a2}}}}},
              {"smoothing", {{"eps", c.eps}}},
              {"time", {{"dt", c.dt}, {"T", c.T}, {"eps_horizon", c.eps_horizon}}},
              {"iteration", {{"picard_tol", c.picard_tol}, {"max_picard", c.max_picard}}},
              {"diagnostics", {{"r_diag", c.r_diag}, {"trace_every", c.trace_every}}},
              {"data",
               {{"profile", c.profile},
                {"amplitude", c.amplitude},
                {"omega", c.omega},
                {"correct", c.correct},
                {"jet_order", c.jet_order}}}};
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void set_field(RunConfig& c, const std::string& name, double v) {
  if (name == "eps") c.eps = v;
  else if (name == "dt") c.dt = v;
  else if (name == "T") c.T = v;
  else if (name == "e1") c.e1 = v;
  else if (name == "n_tangential") c.n_tangential = static_cast<int>(v);
  else if (name == "n_radial") c.n_radial = static_cast<int>(v);
  else if (name == "amplitude") c.amplitude = v;
  else fail(ErrorKind::Configuration, "unknown sweep variable '" + name + "'");
  validate(c);
}

IterationConfig iteration_config(const RunConfig& c) {
  IterationConfig it;
  it.eps = c.eps;
  it.dt = c.dt;
  it.T = c.T;
  it.picard_tol = c.picard_tol;
  it.max_picard = c.max_picard;
  it.e1 = c.e1;
  it.r_diag = c.r_diag;
  it.eps_horizon = c.eps_horizon;
  return it;
}

std::shared_ptr<const Geometry> build_geometry(const RunConfig& c) {
  return build_atlas(c.d, c.n_tangential, c.n_radial);
}

InitialData make_profile(const Geometry& geo, const RunConfig& c) {
  if (c.profile == "zero") return zero_data(geo);
  if (c.profile == "pulsation") return pulsation_data(geo, c.amplitude, c.omega);
  if (c.profile == "expansion") return expansion_data(geo, c.amplitude, c.omega);
  fail(ErrorKind::Configuration, "unknown profile '" + c.profile + "'");
}

}  // namespace fbe
