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
// fbe: run, sweep and certify the smoothed free-boundary Euler solver.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fbe/io.hpp"
#include "fbe/smoothing.hpp"
#include "fbe/study.hpp"

namespace fs = std::filesystem;
using namespace fbe;

namespace {

RunConfig config_from(const std::string& path, const std::optional<std::uint64_t>& seed) {
  RunConfig c = path.empty() ? RunConfig{} : load_config(path);
  if (seed) c.seed = *seed;
  return c;
}

std::pair<std::string, std::vector<double>> parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorKind::Configuration, "--sweep expects name=v1,v2,...");
  std::vector<double> values;
  std::stringstream ss(s.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorKind::Configuration, "--sweep: '" + item + "' is not a number");
    }
  }
  return {s.substr(0, eq), values};
}

std::string slice_name(const fs::path& dir, size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "slice_%06zu.bin", k);
  return (dir / buf).string();
}

Checkpoint make_checkpoint(const RunConfig& c, const TrajectorySeries& s, size_t k) {
  Checkpoint ck;
  ck.d = c.d;
  ck.n_tangential = c.n_tangential;
  ck.n_radial = c.n_radial;
  ck.n = static_cast<std::uint64_t>(s.geo->n());
  ck.dt = s.dt;
  ck.config_hash = config_hash(c);
  ck.taylor_initial = s.taylor_initial;
  ck.state = s.slices[k];
  return ck;
}

void write_checkpoints(const RunConfig& c, const TrajectorySeries& s, int every, const fs::path& dir,
                       size_t offset = 0) {
  if (every <= 0 || s.slices.empty()) return;
  fs::create_directories(dir);
  for (size_t k = 0; k < s.slices.size(); ++k)
    if ((k + offset) % static_cast<size_t>(every) == 0 || k + 1 == s.slices.size())
      write_checkpoint(slice_name(dir, k + offset), make_checkpoint(c, s, k));
}

void write_outputs(const fs::path& out, const RunOutcome& r, int every) {
  fs::create_directories(out);
  if (!r.trace.rows.empty()) write_trace_csv((out / "trace.csv").string(), r.trace, every);
  write_json((out / "summary.json").string(), r.summary);
}

int cmd_run(const RunConfig& c, const fs::path& out, int ckpt_every, const std::string& restart,
            const std::string& data_path) {
  if (!restart.empty()) {
    // Deterministic continuation of an eps = 0 run from one of its slices.
    const Checkpoint ck = read_checkpoint(restart);
    if (ck.config_hash != config_hash(c))
      fail(ErrorKind::Configuration, "checkpoint " + restart + " was written with a different configuration");
    if (c.eps != 0.0) fail(ErrorKind::Configuration, "restart is supported for eps = 0 runs only");
    auto geo = build_geometry(c);
    if (static_cast<std::uint64_t>(geo->n()) != ck.n) fail(ErrorKind::Format, "checkpoint grid mismatch");
    const IterationConfig cfg = iteration_config(c);
    const int total = static_cast<int>(std::lround(cfg.T / ck.dt));
    const int done = static_cast<int>(std::lround(ck.state.t / ck.dt));
    RunOutcome r;
    r.summary = {{"config_hash", config_hash(c)}, {"restart_from", restart}, {"t_restart", ck.state.t}};
    try {
      r.series = run_unsmoothed_from(geo, ck.state, ck.dt, total - done, cfg, ck.taylor_initial);
      SmoothingOperator S(geo, 0.0);
      r.trace = energy_trace(r.series, S, c.r_diag);
      r.ok = !r.series.taylor_violation;
      r.kind = ErrorKind::TaylorSign;
      r.summary["dt"] = ck.dt;
      r.summary["t_final"] = r.series.T();
      r.summary["taylor_violation"] = r.series.taylor_violation;
      write_checkpoints(c, r.series, ckpt_every, out / "checkpoints", static_cast<size_t>(done));
    } catch (const Error& e) {
      r.ok = false;
      r.kind = e.kind();
      r.message = e.what();
    }
    r.summary["status"] = r.ok ? "ok" : "error";
    if (!r.ok) r.summary["error"] = {{"kind", to_string(r.kind)}, {"message", r.message}};
    write_outputs(out, r, c.trace_every);
    return r.ok ? 0 : 3;
  }

  std::optional<InitialData> data;
  if (!data_path.empty()) {
    const Checkpoint ck = read_checkpoint(data_path);
    InitialData d;
    d.x0 = ck.state.x;
    d.V0 = ck.state.V;
    d.h0 = ck.state.wave.h;
    d.h1 = ck.state.wave.ht;
    data = d;
  }
  const RunOutcome r = execute_run(c, true, data ? &*data : nullptr);
  write_outputs(out, r, c.trace_every);
  if (r.ok || !r.series.slices.empty()) write_checkpoints(c, r.series, ckpt_every, out / "checkpoints");
  if (!r.ok) std::cerr << "fbe run: " << to_string(r.kind) << ": " << r.message << "\n";
  return r.ok ? 0 : 3;
}

int cmd_make_data(const RunConfig& c, const fs::path& out) {
  auto geo = build_geometry(c);
  const InitialData d = make_profile(*geo, c);
  Checkpoint ck;
  ck.d = c.d;
  ck.n_tangential = c.n_tangential;
  ck.n_radial = c.n_radial;
  ck.n = static_cast<std::uint64_t>(geo->n());
  ck.config_hash = config_hash(c);
  ck.state.x = d.x0;
  ck.state.V = d.V0;
  ck.state.xt = d.x0;
  ck.state.Vt = d.V0;
  ck.state.wave.h = d.h0;
  ck.state.wave.ht = initial_ht(*geo, d, c.e1);
  fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  write_checkpoint(out.string(), ck);
  std::cout << "wrote " << out.string() << " (" << c.profile << ", " << geo->n() << " nodes)\n";
  return 0;
}

int cmd_energies(const RunConfig& c, const std::vector<std::string>& inputs, const fs::path& out) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".bin") files.push_back(e.path().string());
    } else {
      files.push_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) fail(ErrorKind::Configuration, "energies needs at least two checkpoint slices");
  TrajectorySeries s;
  s.geo = build_geometry(c);
  s.eps = c.eps;
  s.e1 = c.e1;
  for (const auto& f : files) {
    const Checkpoint ck = read_checkpoint(f);
    if (ck.n != static_cast<std::uint64_t>(s.geo->n())) fail(ErrorKind::Format, f + ": grid mismatch");
    s.dt = ck.dt;
    s.taylor_initial = ck.taylor_initial;
    s.slices.push_back(ck.state);
  }
  s.taylor_min = s.taylor_initial;
  SmoothingOperator S(s.geo, c.eps);
  const EnergyTrace tr = energy_trace(s, S, c.r_diag);
  fs::create_directories(out);
  write_trace_csv((out / "trace.csv").string(), tr, 1);
  std::cout << "recomputed " << tr.rows.size() << " rows; C_hat = " << tr.C_hat << "\n";
  return 0;
}

int cmd_check(const CheckOptions& opt, const fs::path& out) {
  const auto verdicts = run_checks(opt);
  nlohmann::json j = nlohmann::json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  " << v.detail << "\n";
    j.push_back({{"suite", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    all = all && v.pass;
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_json((out / "check.json").string(), j);
  }
  return all ? 0 : 1;
}

int cmd_multipliers(const RunConfig& c, const fs::path& out) {
  SmoothingOperator S(build_geometry(c), c.eps);
  std::ostringstream os;
  os << "k,multiplier\n";
  for (int k = 0; k <= c.n_tangential / 2; ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, S.multiplier(k));
    os << buf;
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    fs::create_directories(out);
    std::ofstream((out / "multipliers.csv").string()) << os.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed free-boundary Euler solver and diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", restart, data_path, sweep;
  std::optional<std::uint64_t> seed;
  int threads = 1, ckpt_every = 0;
  long draws = 10000;
  double kernel_scale = 1.0;
  std::vector<std::string> inputs;

  auto* run = app.add_subcommand("run", "run one configuration; writes trace.csv and summary.json");
  auto* study = app.add_subcommand("study", "sweep one configuration variable");
  auto* check = app.add_subcommand("check", "run the certificate suites");
  auto* make_data = app.add_subcommand("make-data", "write the configured initial data as a slice file");
  auto* energies = app.add_subcommand("energies", "recompute diagnostics from checkpoint slices");
  auto* mult = app.add_subcommand("multipliers", "dump the smoothing multipliers as CSV");

  for (auto* sc : {run, study, make_data, energies, mult}) sc->add_option("--config", config_path, "JSON run configuration");
  for (auto* sc : {run, study, check, energies, mult}) sc->add_option("--out", out_dir, "output directory");
  for (auto* sc : {run, study, check, make_data}) sc->add_option("--seed", seed, "Monte-Carlo seed");
  run->add_option("--checkpoint-every", ckpt_every, "write a slice every n steps (0: none)");
  run->add_option("--restart", restart, "continue an eps = 0 run from a slice");
  run->add_option("--data", data_path, "initial data written by make-data");
  study->add_option("--sweep", sweep, "name=v1,v2,...")->required();
  for (auto* sc : {study, check}) sc->add_option("--threads", threads, "concurrent members");
  check->add_option("--draws", draws, "Monte-Carlo draws per suite");
  check->add_option("--kernel-scale", kernel_scale, "corrupt the smoothing kernel (negative control)");
  make_data->add_option("--out", out_dir, "data file")->required();
  energies->add_option("inputs", inputs, "slice files or directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_from(config_path, seed), out_dir, ckpt_every, restart, data_path);
    if (*study) {
      const auto [name, values] = parse_sweep(sweep);
      const auto agg = cmd_study(config_from(config_path, seed), name, values, threads);
      fs::create_directories(out_dir);
      write_json((fs::path(out_dir) / "study.json").string(), agg);
      std::cout << agg.dump(2) << "\n";
      return agg.value("complete", true) ? 0 : 3;
    }
    if (*check) {
      CheckOptions opt;
      if (seed) opt.seed = *seed;
      opt.draws = draws;
      opt.kernel_scale = kernel_scale;
      return cmd_check(opt, check->count("--out") ? fs::path(out_dir) : fs::path());
    }
    if (*make_data) return cmd_make_data(config_from(config_path, seed), out_dir);
    if (*energies) return cmd_energies(config_from(config_path, seed), inputs, out_dir);
    if (*mult) return cmd_multipliers(config_from(config_path, seed), mult->count("--out") ? fs::path(out_dir) : fs::path());
  } catch (const Error& e) {
    std::cerr << "fbe: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
