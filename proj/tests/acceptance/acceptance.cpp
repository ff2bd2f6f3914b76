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

// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fbe/compat.hpp"
#include "fbe/diagnostics.hpp"
#include "fbe/elliptic.hpp"
#include "fbe/fractional.hpp"
#include "fbe/jet.hpp"
#include "fbe/smoothing.hpp"
#include "fbe/study.hpp"
#include "fbe/wave.hpp"

using namespace fbe;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt("%.3g", v[k]);
  return s + "]";
}

double ratio_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    const auto t = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t - t0).count();
    t0 = t;
    return s;
  }
};

// Reference scenario: corrected pulsation data, eps = 0.1, T = 0.1.
RunConfig reference(double T = 0.1) {
  RunConfig c;
  c.n_tangential = 128;
  c.n_radial = 16;
  c.eps = 0.1;
  c.e1 = 0.25;
  c.T = T;
  c.eps_horizon = false;
  return c;
}

double column_max(const EnergyTrace& tr, const std::string& name, size_t from = 0) {
  const auto it = std::find(tr.columns.begin(), tr.columns.end(), name);
  const size_t c = static_cast<size_t>(it - tr.columns.begin());
  double m = 0.0;
  for (size_t k = from; k < tr.rows.size(); ++k) m = std::max(m, tr.rows[k][c]);
  return m;
}

double column_at(const EnergyTrace& tr, const std::string& name, size_t row) {
  const auto it = std::find(tr.columns.begin(), tr.columns.end(), name);
  return tr.rows[row][static_cast<size_t>(it - tr.columns.begin())];
}

double grid_gap(const Geometry& coarse, const ScalarField& hc, const Geometry& fine, const ScalarField& hf) {
  std::vector<int> nodes;
  for (int n = 0; n < coarse.n(); ++n)
    if (coarse.grid.r[n] < 0.9) nodes.push_back(n);
  Eigen::MatrixXd pts(static_cast<long>(nodes.size()), 2);
  for (size_t k = 0; k < nodes.size(); ++k) pts.row(static_cast<long>(k)) = coarse.grid.y.row(nodes[k]);
  const Eigen::VectorXd fi = fine.polar().interpolate(hf, pts);
  double gap = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k) gap = std::max(gap, std::abs(hc[nodes[k]] - fi[static_cast<long>(k)]));
  return gap;
}

}  // namespace

int main() {
  Clock clk;

  // Shared runs: the reference run at T = 0.1 (twice the eps-horizon) and
  // the eps sweep with its eps = 0 reference.
  const RunOutcome ref = execute_run(reference());
  const double t_ref = clk.lap();
  RunConfig sweep_base = reference();
  sweep_base.n_tangential = 256;
  const nlohmann::json sweep = cmd_study(sweep_base, "eps", {0.2, 0.1, 0.05}, 4);
  const double t_sweep = clk.lap();
  std::printf("# reference run %.1f s, eps sweep %.1f s\n", t_ref, t_sweep);

  // 1. Continuity preservation.
  {
    bool pass = ref.ok && ref.picard.converged && ref.trace.rows.size() > 2;
    std::string detail = "run failed: " + ref.message;
    if (ref.ok) {
      const double first = column_at(ref.trace, "cont_resid", 1);
      const double worst = column_max(ref.trace, "cont_resid", 1);
      pass = pass && worst <= 10.0 * first;
      detail = "max ||e1 D_t h + div V|| = " + fmt("%.3e", worst) + ", t=0+ value " + fmt("%.3e", first) +
               ", ratio " + fmt("%.1f", worst / first) + " (tolerance 10)";
    }
    verdict(1, pass, detail, t_ref);
  }

  // 2. Physical energy conservation at eps = 0, order in dt.
  {
    RunConfig c = reference();
    c.eps = 0.0;
    c.n_tangential = 64;
    c.n_radial = 32;
    std::vector<double> drift, dts;
    const RunOutcome base = execute_run(c, false);
    for (double f : {1.0, 0.5}) {
      c.dt = base.series.dt * f;
      const RunOutcome r = execute_run(c, false);
      const auto& a = r.series.slices.front();
      const auto& b = r.series.slices.back();
      const Geometry& g = *r.series.geo;
      const double E0 = physical_energy(g, a.x, a.V, a.wave.h, c.e1);
      drift.push_back(std::abs(physical_energy(g, b.x, b.V, b.wave.h, c.e1) - E0) / E0);
      dts.push_back(c.dt);
    }
    const double order = std::log2(drift[0] / drift[1]);
    verdict(2, order >= 1.9,
            "relative drift " + list(drift) + " at dt " + list(dts) + ", order " + fmt("%.3f", order) +
                " (tolerance >= 1.9)",
            clk.lap());
  }

  // 3. eps-uniform growth constant.
  {
    const bool complete = sweep.value("complete", false);
    const std::vector<double> C = sweep.value("C_hat", std::vector<double>{});
    const double ratio = C.size() == 3 ? ratio_spread(C) : INFINITY;
    verdict(3, complete && ratio <= 2.0,
            "C_hat over eps {0.2, 0.1, 0.05} = " + list(C) + ", max/min " + fmt("%.3f", ratio) +
                " (tolerance 2)",
            0.0);
  }

  // 4. Smoothing operator.
  CheckOptions opt;
  const std::vector<SuiteVerdict> suites = run_checks(opt);
  const double t_checks = clk.lap();
  auto suite = [&](const std::string& name) {
    for (const auto& s : suites)
      if (s.name == name) return s;
    return SuiteVerdict{name, false, "missing"};
  };
  {
    const SuiteVerdict sym = suite("smoothing_symmetry"), cst = suite("smoothing_constants");
    const double slope = sweep.value("smoothing_slope", NAN);
    auto geo = build_atlas(2, 256, 16);
    const auto tb = tangential_fields(*geo);
    const FlowJacobian id = identity_jacobian(*geo);
    ScalarField f(geo->n()), g(geo->n());
    for (int n = 0; n < geo->n(); ++n) {
      const double y1 = geo->grid.y(n, 0), y2 = geo->grid.y(n, 1);
      f[n] = std::cos(2.0 * y1) * std::exp(0.5 * y2);
      g[n] = std::sin(3.0 * y1 + y2) + y1 * y2;
    }
    std::vector<double> mult, grad, rad;
    for (double eps : {0.2, 0.1, 0.05}) {
      SmoothingOperator S(geo, eps);
      const CommutatorReport r = commutator_residuals(S, f, g, tb.fields[0], id);
      mult.push_back(r.multiplication);
      grad.push_back(r.gradient);
      rad.push_back(r.radial);
    }
    // The tangential commutator vanishes to roundoff and carries no ratio.
    const double uni = std::max({ratio_spread(mult), ratio_spread(grad), ratio_spread(rad)});
    const bool slope_ok = slope >= 0.8 && slope <= 1.2;
    verdict(4, sym.pass && cst.pass && slope_ok && uni <= 3.0,
            sym.detail + " (1e-9); " + cst.detail + " (1e-10); ||S f - f|| eps-slope " + fmt("%.3f", slope) +
                " (range [0.8, 1.2]); commutators multiplication " + list(mult) + " gradient " + list(grad) +
                " radial " + list(rad) + ", worst max/min " + fmt("%.2f", uni) + " (tolerance 3)",
            t_checks + clk.lap());
  }

  // 5. Fractional calculus.
  {
    auto geo = build_atlas(2, 64, 32);
    FractionalNorm fr(geo, 0.5);
    Eigen::VectorXd f(geo->grid.boundary.size());
    for (size_t b = 0; b < geo->grid.boundary.size(); ++b) {
      const int n = geo->grid.boundary[b];
      f[static_cast<long>(b)] = std::cos(std::atan2(geo->grid.y(n, 1), geo->grid.y(n, 0)));
    }
    const double err = (fr.boundary(f) - std::pow(2.0, 0.25) * f).cwiseAbs().maxCoeff();
    const SuiteVerdict lb = suite("leibniz");
    verdict(5, err <= 1e-10 && lb.pass,
            "k = 1 multiplier error " + fmt("%.2e", err) + " (1e-10); Leibniz " + lb.detail + " (tolerance 1.5)",
            clk.lap());
  }

  // 6. Dirichlet solver.
  {
    const double para = dirichlet_error(64, 32, "paraboloid");
    std::vector<double> h, err;
    for (int nt : {32, 64, 128}) {
      h.push_back(1.0 / nt);
      err.push_back(dirichlet_error(nt, nt / 2, "manufactured"));
    }
    const double order = log_slope(h, err);
    auto solve = [](int nt) {
      auto geo = build_atlas(2, nt, nt / 2);
      const FlowJacobian jac = flow_jacobian(*geo, perturbed_coordinates(*geo));
      return std::make_pair(geo, solve_dirichlet(geo, jac, ScalarField::Ones(geo->n()), 1e-9));
    };
    const auto [g1, h1] = solve(32);
    const auto [g2, h2] = solve(64);
    const auto [g3, h3] = solve(128);
    const double estimate = grid_gap(*g1, h1, *g2, h2) * 4.0 / 3.0;
    const double actual = grid_gap(*g1, h1, *g3, h3);
    // 1 - r^2 lies in the kernel of the scheme's truncation error, so its
    // order is undefined; the cubic-weighted case carries the order check.
    verdict(6, para <= 1e-9 && order >= 1.9 && actual <= 3.0 * estimate,
            "1 - r^2 max error " + fmt("%.2e", para) + " (reproduced, 1e-9); (1 - r^2)(1 + 0.2 y1 + 0.3 y1 y2) errors " +
                list(err) + " order " + fmt("%.3f", order) + " (>= 1.9); perturbed coordinates error " +
                fmt("%.3e", actual) + " vs Richardson estimate " + fmt("%.3e", estimate) + " (factor 3)",
            clk.lap());
  }

  // 7. Div-curl certificates.
  {
    const SuiteVerdict dc = suite("divcurl");
    verdict(7, dc.pass, dc.detail + " over 200 fields at 64x32 and 128x64 (growth <= 25%)", 0.0);
  }

  // 8. Curl transport.
  {
    const auto& members = sweep["members"];
    double c_fine = NAN;
    for (const auto& m : members)
      if (m["value"] == 0.1 && m["ok"]) c_fine = m["summary"].value("c_hat", NAN);
    const double c_coarse = ref.trace.c_hat;
    const double spread = std::max(c_fine, c_coarse) / std::min(c_fine, c_coarse);
    // Irrotational data: no rotation, only the enthalpy profile.
    RunConfig c = reference(0.05);
    c.omega = 0.0;
    const RunOutcome irr = execute_run(c, false);
    bool floor_ok = irr.ok;
    double worst = 0.0, fl = 0.0;
    if (irr.ok) {
      const CurlRecord rec = curl_divergence_residuals(irr.series, tangential_fields(*irr.series.geo), {});
      for (size_t k = 0; k < rec.K.size(); ++k) {
        floor_ok = floor_ok && rec.K[k] <= rec.floor[k] * (1.0 + 1e-9) + 1e-14;
        worst = std::max(worst, rec.K[k]);
        fl = std::max(fl, rec.floor[k]);
      }
    }
    verdict(8, std::isfinite(spread) && spread <= 1.25 && floor_ok,
            "c_hat " + fmt("%.4f", c_coarse) + " (128x16) vs " + fmt("%.4f", c_fine) + " (256x16), ratio " +
                fmt("%.3f", spread) + " (tolerance 1.25); irrotational max ||curl V|| " + fmt("%.2e", worst) +
                " within floor " + fmt("%.2e", fl),
            clk.lap());
  }

  // 9. Taylor sign persistence.
  {
    const double c0 = ref.series.taylor_initial, mn = ref.trace.min_taylor;
    RunConfig bad = reference();
    bad.eps = 0.0;
    bad.n_tangential = 64;
    bad.n_radial = 32;
    bad.profile = "expansion";
    const RunOutcome b = execute_run(bad, false);
    const bool flagged = !b.ok && b.kind == ErrorKind::TaylorSign && b.summary["taylor_violation"] == true &&
                         b.summary["status"] == "error";
    verdict(9, ref.ok && mn >= 0.5 * c0 && flagged,
            "initial margin " + fmt("%.4f", c0) + ", minimum " + fmt("%.4f", mn) + " (>= c/2); expansion data " +
                (flagged ? "stopped with a taylor-sign report at t = " + fmt("%.2e", b.series.T())
                         : std::string("not flagged")),
            clk.lap());
  }

  // 10. Picard convergence.
  {
    RunConfig c = reference(0.05);
    const RunOutcome r = execute_run(c, false);
    bool contraction_ok = r.ok && r.picard.converged;
    for (double q : r.picard.contraction) contraction_ok = contraction_ok && q < 1.0;
    const double resid = r.picard.max_residual_ratio;
    // At twice the horizon the iteration either converges or must say so.
    const bool doubled_reported = !ref.picard.converged && !ref.ok && ref.kind == ErrorKind::NonConvergence;
    verdict(10, contraction_ok && resid <= 5.0 && doubled_reported,
            "T = 0.05: contraction " + list(r.picard.contraction) + " (< 1), residual / truncation " +
                fmt("%.3f", resid) + " (<= 5); T = 0.1: " +
                (ref.picard.converged ? "converged in " + std::to_string(ref.picard.iterations) +
                                            " iterations, no non-convergence to report"
                                      : "non-convergence reported: " + ref.message),
            clk.lap());
  }

  // 11. eps -> 0 limit.
  {
    const std::vector<double> gap = sweep.value("velocity_gap", std::vector<double>{});
    bool pass = gap.size() == 3 && sweep.value("reference_ok", false);
    for (size_t k = 1; pass && k < gap.size(); ++k) pass = gap[k] <= 1.1 * gap[k - 1];
    verdict(11, pass, "||V_eps - V_0||(T) over eps {0.2, 0.1, 0.05} = " + list(gap) + " (decreasing, 10% slack)",
            0.0);
  }

  // 12. Compatibility machinery.
  {
    auto geo = build_atlas(2, 256, 32);
    const InitialData d = pulsation_data(*geo, 0.5, 1.0);
    const double e1 = 0.05;
    SmoothingOperator S0(geo, 0.0);
    const CompatReport jet = check_compat(*geo, power_series_coeffs(S0, d.h0, d.V0, d.x0, 2, e1));
    std::vector<double> change, margin;
    bool converged = true;
    for (double eps : {0.2, 0.1, 0.05}) {
      SmoothingOperator S(geo, eps);
      const CorrectionResult cr = correct_data_for_eps(S, d, 2, e1);
      const CompatReport rep = check_compat(*geo, cr.jet);
      margin.push_back(*std::max_element(rep.margins.begin(), rep.margins.end()));
      change.push_back(cr.velocity_change + cr.enthalpy_change);
      converged = converged && cr.iterations >= 1;
    }
    const bool decreasing = change[1] < change[0] && change[2] < change[1];
    const double worst_margin = *std::max_element(margin.begin(), margin.end());
    verdict(12, jet.continuity <= 1e-8 && converged && worst_margin <= 1e-6 && decreasing,
            "jet residual " + fmt("%.2e", jet.continuity) + " (1e-8); corrected margins " + list(margin) +
                " (1e-6); correction size " + list(change) + " (decreasing)",
            clk.lap());
  }

  // 13. Relativistic kernels.
  {
    bool pass = true;
    std::string detail;
    for (const char* name : {"relgeom_Q", "relgeom_G", "relgeom_symbol", "relgeom_H", "eos"}) {
      const SuiteVerdict s = suite(name);
      pass = pass && s.pass;
      detail += std::string(detail.empty() ? "" : "; ") + name + " " + s.detail;
    }
    verdict(13, pass, detail + " (violations beyond 1e-12 over 1e4 draws; EOS 1e-8)", 0.0);
  }

  // 14. Galerkin / leapfrog cross-validation.
  {
    auto geo = build_atlas(2, 32, 16);
    DirichletOperator op(geo, identity_jacobian(*geo));
    const GalerkinBasis basis = galerkin_basis(geo, 200.0);
    const ScalarField h0 = basis.psi.col(0) + 0.5 * basis.psi.col(3);
    const ScalarField F = ScalarField::Zero(geo->n());
    const double T = 1.0;
    auto energy = [&](const WaveState& w) { return geo->grid.w.dot(w.ht.cwiseAbs2()) + op.energy(w.h); };
    struct Out {
      ScalarField lf, gk;
      double drift;
    };
    auto solve = [&](double dt) {
      WaveState ws{h0, ScalarField::Zero(geo->n()), 0.0};
      GalerkinState gs = galerkin_init(basis, *geo, ws);
      const double E0 = energy(galerkin_state(basis, gs));
      double drift = 0.0;
      const int steps = static_cast<int>(std::lround(T / dt));
      for (int k = 0; k < steps; ++k) {
        ws = step_wave(ws, F, op, dt, 1.0);
        gs = step_wave_galerkin(gs, F, op, basis, dt, 1.0);
        drift = std::max(drift, std::abs(energy(galerkin_state(basis, gs)) - E0) / E0);
      }
      return Out{ws.h, galerkin_state(basis, gs).h, drift};
    };
    const Out a = solve(0.002), b = solve(0.001);
    const double diff = l2_norm(*geo, ScalarField(a.lf - a.gk));
    // Richardson estimates of each solver's time error at dt, order 2.
    const double est = (l2_norm(*geo, ScalarField(a.lf - b.lf)) + l2_norm(*geo, ScalarField(a.gk - b.gk))) * 4.0 / 3.0;
    verdict(14, diff <= est && a.drift / T <= 1e-3,
            "L2 difference " + fmt("%.2e", diff) + " vs combined truncation estimate " + fmt("%.2e", est) +
                "; energy drift " + fmt("%.2e", a.drift / T) + " per unit time (1e-3)",
            clk.lap());
  }

  std::printf("%d of 14 criteria failed\n", failures);
  return failures;
}
