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
#include "fbe/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbe/diagnostics.hpp"
#include "fbe/elliptic.hpp"
#include "fbe/errors.hpp"
#include "fbe/jet.hpp"

namespace fbe {

FlowJacobian slice_jacobian(const Geometry& geo, const LagrangianState& s) {
  return flow_jacobian(geo, s.xt);
}

double IterationConfig::horizon() const {
  if (eps > 0.0 && eps_horizon) return std::min(T, 0.5 * eps);
  return T;
}

std::vector<VecField> TrajectorySeries::velocities() const {
  std::vector<VecField> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.V);
  return out;
}

std::vector<ScalarField> TrajectorySeries::enthalpies() const {
  std::vector<ScalarField> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.wave.h);
  return out;
}

SmoothedPath smooth_pair(const SmoothingOperator& S, const std::vector<VecField>& V,
                         const VecField& x0, double dt) {
  SmoothedPath p;
  p.Vt.reserve(V.size());
  p.xt.reserve(V.size());
  for (const auto& v : V) p.Vt.push_back(S.apply_squared(v));
  p.xt.push_back(x0);
  for (size_t k = 1; k < V.size(); ++k) p.xt.push_back(p.xt[k - 1] + 0.5 * dt * (p.Vt[k - 1] + p.Vt[k]));
  const Geometry& geo = S.geometry();
  for (const auto& x : p.xt) flow_jacobian(geo, x);  // throws on a degenerate flow
  return p;
}

ScalarField initial_ht(const Geometry& geo, const InitialData& data, double e1) {
  if (data.h1) return *data.h1;
  const FlowJacobian jac = flow_jacobian(geo, data.x0);
  ScalarField h1 = -tilde_div(geo, data.V0, jac) / e1;
  for (int b : geo.grid.boundary) h1[b] = 0.0;
  return h1;
}

int time_steps(const Geometry& geo, const InitialData& data, const IterationConfig& cfg, double T,
               double& dt) {
  double target = cfg.dt;
  if (target <= 0.0) target = 0.9 * wave_cfl_limit(geo, flow_jacobian(geo, data.x0), cfg.e1);
  const int n = std::max(1, static_cast<int>(std::ceil(T / target - 1e-9)));
  dt = T / n;
  return n;
}

namespace {

void check_boundary(const Geometry& geo, const ScalarField& h, double t) {
  for (int b : geo.grid.boundary)
    if (h[b] != 0.0)
      fail(ErrorKind::InvariantViolation,
           "enthalpy left the boundary condition at t = " + std::to_string(t));
}

void check_cfl(const Geometry& geo, const FlowJacobian& jac, double dt, double e1, double t) {
  const double lim = wave_cfl_limit(geo, jac, e1);
  if (dt > lim * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the wave CFL limit " << lim << " at t = " << t;
    fail(ErrorKind::TimeStep, os.str());
  }
}

LagrangianState first_slice(const Geometry& geo, const InitialData& data, double e1) {
  LagrangianState s;
  s.t = 0.0;
  s.x = data.x0;
  s.V = data.V0;
  s.wave.h = data.h0;
  s.wave.ht = initial_ht(geo, data, e1);
  s.wave.t = 0.0;
  for (int b : geo.grid.boundary) {
    s.wave.h[b] = 0.0;
    s.wave.ht[b] = 0.0;
  }
  return s;
}

// One staggered step: drift h, update V with the half-step gradient, kick
// D_t h with the forcing at the half step, drift h, transport x.
LagrangianState advance(std::shared_ptr<const Geometry> geo, const LagrangianState& s,
                        const FlowJacobian& jac_half, const VecField& Vt_half, bool semi_implicit,
                        bool collocated, double dt, double e1) {
  const Geometry& g = *geo;
  check_cfl(g, jac_half, dt, e1, s.t);
  LagrangianState out;
  WaveState ws = s.wave;
  wave_drift(ws, dt);
  out.V = s.V - dt * tilde_grad(g, ws.h, jac_half);
  const VecField V_half = 0.5 * (s.V + out.V);
  const ScalarField F = wave_forcing(g, V_half, semi_implicit ? V_half : Vt_half, jac_half);
  if (collocated) {
    wave_kick_collocated(ws, g, jac_half, F, dt, e1);
  } else {
    DirichletOperator op(geo, jac_half);
    wave_kick(ws, op, F, dt, e1);
  }
  wave_drift(ws, dt);
  if (!ws.h.allFinite() || !ws.ht.allFinite() || !out.V.allFinite())
    fail(ErrorKind::BlowUp, "non-finite state at t = " + std::to_string(s.t + dt));
  out.wave = ws;
  out.x = s.x + dt * V_half;
  out.t = s.t + dt;
  out.wave.t = out.t;
  check_boundary(g, out.wave.h, out.t);
  return out;
}

// Scans the margins against c0 (the margin at the start of the run) and cuts
// the series after the first slice below c0 / 2.
void guard_taylor(TrajectorySeries& series, double c0) {
  const Geometry& g = *series.geo;
  series.taylor_initial = c0;
  series.taylor_min = c0;
  series.taylor_violation = false;
  for (size_t k = 0; k < series.slices.size(); ++k) {
    const double m = taylor_margin(g, series.slices[k].wave.h, slice_jacobian(g, series.slices[k]));
    series.taylor_min = std::min(series.taylor_min, m);
    if (c0 > 0.0 && m < 0.5 * c0) {
      series.taylor_violation = true;
      series.slices.resize(k + 1);
      return;
    }
  }
}

double sup_difference(const Geometry& g, const std::vector<VecField>& a, const std::vector<VecField>& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, l2_norm(g, VecField(a[k] - b[k])));
  return m;
}

}  // namespace

TrajectorySeries linear_solve(std::shared_ptr<const Geometry> geo, const SmoothedPath& path,
                              const InitialData& data, const IterationConfig& cfg, double dt) {
  const Geometry& g = *geo;
  if (path.Vt.size() != path.xt.size() || path.Vt.size() < 2)
    fail(ErrorKind::InsufficientHistory, "smoothed path needs at least two slices");
  TrajectorySeries out;
  out.geo = geo;
  out.eps = cfg.eps;
  out.e1 = cfg.e1;
  out.dt = dt;
  out.slices.reserve(path.Vt.size());
  LagrangianState s = first_slice(g, data, cfg.e1);
  s.xt = path.xt[0];
  s.Vt = path.Vt[0];
  out.slices.push_back(s);
  for (size_t n = 0; n + 1 < path.Vt.size(); ++n) {
    const VecField xt_half = 0.5 * (path.xt[n] + path.xt[n + 1]);
    const VecField Vt_half = 0.5 * (path.Vt[n] + path.Vt[n + 1]);
    const FlowJacobian jac = flow_jacobian(g, xt_half);
    LagrangianState next = advance(geo, out.slices.back(), jac, Vt_half, false, cfg.collocated_kick, dt, cfg.e1);
    next.xt = path.xt[n + 1];
    next.Vt = path.Vt[n + 1];
    out.slices.push_back(std::move(next));
  }
  return out;
}

TrajectorySeries run_unsmoothed_from(std::shared_ptr<const Geometry> geo, const LagrangianState& start,
                                     double dt, int steps, const IterationConfig& cfg,
                                     double taylor_initial) {
  const Geometry& g = *geo;
  TrajectorySeries out;
  out.geo = geo;
  out.eps = 0.0;
  out.e1 = cfg.e1;
  out.dt = dt;
  out.slices.reserve(static_cast<size_t>(steps) + 1);
  LagrangianState s = start;
  s.xt = s.x;
  s.Vt = s.V;
  out.slices.push_back(s);
  const double c0 = taylor_initial;
  for (int n = 0; n < steps; ++n) {
    const LagrangianState& cur = out.slices.back();
    const FlowJacobian jac = flow_jacobian(g, VecField(cur.x + 0.5 * dt * cur.V));
    LagrangianState next = advance(geo, cur, jac, cur.V, true, cfg.collocated_kick, dt, cfg.e1);
    next.xt = next.x;
    next.Vt = next.V;
    out.slices.push_back(std::move(next));
    if (cfg.taylor_guard && c0 > 0.0 &&
        taylor_margin(g, out.slices.back().wave.h, flow_jacobian(g, out.slices.back().x)) < 0.5 * c0) {
      out.taylor_violation = true;
      break;
    }
  }
  if (cfg.taylor_guard) guard_taylor(out, c0);
  return out;
}

TrajectorySeries run_unsmoothed(std::shared_ptr<const Geometry> geo, const InitialData& data,
                                const IterationConfig& cfg) {
  const Geometry& g = *geo;
  double dt = 0.0;
  const int steps = time_steps(g, data, cfg, cfg.T, dt);
  const LagrangianState s = first_slice(g, data, cfg.e1);
  const double c0 = taylor_margin(g, s.wave.h, flow_jacobian(g, s.x));
  return run_unsmoothed_from(geo, s, dt, steps, cfg, c0);
}

std::vector<double> momentum_residual(const TrajectorySeries& series,
                                      const std::vector<VecField>& xt) {
  const Geometry& g = *series.geo;
  const std::vector<VecField> V = series.velocities();
  const std::vector<VecField> DtV = material_series_derivative(V, series.dt);
  std::vector<double> out(V.size());
  for (size_t k = 0; k < V.size(); ++k) {
    const FlowJacobian jac = flow_jacobian(g, xt[k]);
    out[k] = l2_norm(g, VecField(DtV[k] + tilde_grad(g, series.slices[k].wave.h, jac)));
  }
  return out;
}

TrajectorySeries picard_iterate(const SmoothingOperator& S, const InitialData& data,
                                const IterationConfig& cfg, PicardReport* report) {
  if (cfg.eps <= 0.0) fail(ErrorKind::Precondition, "picard_iterate needs eps > 0");
  if (cfg.picard_tol <= 0.0) fail(ErrorKind::Configuration, "picard_tol must be positive");
  std::shared_ptr<const Geometry> geo = S.geometry_ptr();
  const Geometry& g = *geo;
  PicardReport local;
  PicardReport& rep = report ? *report : local;
  rep = PicardReport{};
  rep.horizon = cfg.horizon();

  double dt = 0.0;
  const int steps = time_steps(g, data, cfg, rep.horizon, dt);

  const int order = std::min(cfg.r_diag, kMaxJetOrder);
  const DataJet jet = power_series_coeffs(S, data.h0, data.V0, data.x0, order, cfg.e1,
                                          std::optional<ScalarField>(initial_ht(g, data, cfg.e1)));
  std::vector<VecField> V(static_cast<size_t>(steps) + 1);
  for (int n = 0; n <= steps; ++n) V[static_cast<size_t>(n)] = jet.V_at(n * dt);

  TrajectorySeries series;
  SmoothedPath path;
  for (int k = 1; k <= cfg.max_picard; ++k) {
    path = smooth_pair(S, V, data.x0, dt);
    series = linear_solve(geo, path, data, cfg, dt);
    std::vector<VecField> Vn = series.velocities();
    const double inc = sup_difference(g, Vn, V);
    rep.increments.push_back(inc);
    if (rep.increments.size() > 1) rep.contraction.push_back(inc / rep.increments[rep.increments.size() - 2]);
    rep.iterations = k;
    V = std::move(Vn);
    if (inc < cfg.picard_tol) {
      rep.converged = true;
      break;
    }
    if (!std::isfinite(inc) || inc > 1e6 * std::max(rep.increments.front(), cfg.picard_tol)) break;
  }
  if (!rep.converged) {
    std::ostringstream os;
    os << "Picard iteration did not reach " << cfg.picard_tol << " on [0, " << rep.horizon
       << "] at eps = " << cfg.eps << "; increments:";
    for (double v : rep.increments) os << ' ' << v;
    fail(ErrorKind::NonConvergence, os.str());
  }

  rep.truncation_estimate = momentum_residual(series, path.xt);
  const SmoothedPath fresh = smooth_pair(S, series.velocities(), data.x0, dt);
  rep.fixed_point_residual = momentum_residual(series, fresh.xt);
  for (size_t k = 0; k < rep.fixed_point_residual.size(); ++k) {
    const double est = std::max(rep.truncation_estimate[k], 1e-300);
    rep.max_residual_ratio = std::max(rep.max_residual_ratio, rep.fixed_point_residual[k] / est);
  }
  if (cfg.taylor_guard)
    guard_taylor(series, taylor_margin(g, series.slices[0].wave.h, slice_jacobian(g, series.slices[0])));
  return series;
}

}  // namespace fbe
