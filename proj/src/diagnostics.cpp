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
#include "fbe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbe/errors.hpp"
#include "fbe/wave.hpp"

namespace fbe {

namespace {

std::vector<FlowJacobian> slice_jacobians(const TrajectorySeries& s) {
  std::vector<FlowJacobian> out;
  out.reserve(s.slices.size());
  for (const auto& sl : s.slices) out.push_back(slice_jacobian(*s.geo, sl));
  return out;
}

// T^I applied componentwise to a series of vector fields.
std::vector<VecField> word_vec(const Geometry& g, const TangentialBasis& basis,
                               const std::vector<VecField>& series, double dt, const Word& w) {
  const int d = g.d();
  std::vector<VecField> out(series.size(), VecField(g.n(), d));
  for (int i = 0; i < d; ++i) {
    std::vector<ScalarField> c(series.size());
    for (size_t k = 0; k < series.size(); ++k) c[k] = series[k].col(i);
    c = apply_word(g, basis, c, dt, w);
    for (size_t k = 0; k < series.size(); ++k) out[k].col(i) = c[k];
  }
  return out;
}

// Unit outward normal covector in the smoothed coordinates and the surface
// element ratio |kappa~ J^{-T} N| at a boundary node.
Eigen::VectorXd tilde_normal(const Geometry& g, const FlowJacobian& jac, int bi, double& area) {
  const int d = g.d();
  const int node = g.grid.boundary[static_cast<size_t>(bi)];
  Eigen::VectorXd n = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) n[i] += g.grid.normal(bi, a) * jac.Jinv(node, a * d + i);
  const double len = n.norm();
  area = jac.kappa[node] * len;
  return n / len;
}

GoodUnknowns good_unknowns_impl(const TrajectorySeries& s, const SmoothingOperator& S,
                                const TangentialBasis& basis, const Word& I,
                                const std::vector<FlowJacobian>& jac) {
  const Geometry& g = *s.geo;
  const int d = g.d();
  const size_t m = s.slices.size();
  std::vector<VecField> V(m), x(m), xe(m);
  std::vector<ScalarField> h(m);
  for (size_t k = 0; k < m; ++k) {
    V[k] = s.slices[k].V;
    x[k] = s.slices[k].x;
    xe[k] = S.apply(x[k]);
    h[k] = s.slices[k].wave.h;
  }
  GoodUnknowns gu;
  if (I.empty()) {
    gu.V = V;
    gu.h = h;
    gu.Tx = x;
    gu.Txe = xe;
    return gu;
  }
  const std::vector<VecField> TV = word_vec(g, basis, V, s.dt, I);
  const std::vector<ScalarField> Th = apply_word(g, basis, h, s.dt, I);
  gu.Tx = word_vec(g, basis, x, s.dt, I);
  gu.Txe = word_vec(g, basis, xe, s.dt, I);
  gu.V.resize(m);
  gu.h.resize(m);
  for (size_t k = 0; k < m; ++k) {
    const VecField STxe = S.apply(gu.Txe[k]);
    const Eigen::MatrixXd DV = tilde_deriv(g, V[k], jac[k]);  // i*d+j = d~_i V^j
    const VecField gh = tilde_grad(g, h[k], jac[k]);
    gu.V[k] = TV[k];
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) gu.V[k].col(j).array() -= DV.col(i * d + j).array() * STxe.col(i).array();
    gu.h[k] = Th[k] - (gh.array() * STxe.array()).rowwise().sum().matrix();
  }
  return gu;
}

HigherEnergy higher_energy_impl(const TrajectorySeries& s, const SmoothingOperator& S,
                                const TangentialBasis& basis, const Word& I,
                                const std::vector<FlowJacobian>& jac) {
  const Geometry& g = *s.geo;
  const GoodUnknowns gu = good_unknowns_impl(s, S, basis, I, jac);
  const size_t m = s.slices.size();
  HigherEnergy he;
  he.E.resize(m);
  he.B.resize(m);
  he.BN.resize(m);
  for (size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd& kap = jac[k].kappa;
    const ScalarField dens = gu.V[k].rowwise().squaredNorm() + s.e1 * gu.h[k].cwiseAbs2() +
                             gu.Tx[k].rowwise().squaredNorm();
    double E = g.grid.w.dot(dens.cwiseProduct(kap));
    const VecField gh = tilde_grad(g, s.slices[k].wave.h, jac[k]);
    double B = 0.0, BN = 0.0;
    for (size_t bi = 0; bi < g.grid.boundary.size(); ++bi) {
      const int node = g.grid.boundary[bi];
      double area = 0.0;
      const Eigen::VectorXd n = tilde_normal(g, jac[k], static_cast<int>(bi), area);
      const Eigen::VectorXd T = gu.Txe[k].row(node).transpose();
      const double nt = n.dot(T);
      const double grad = gh.row(node).norm();
      if (grad < 1e-12) he.taylor_degenerate = true;
      E += g.grid.wb[static_cast<Eigen::Index>(bi)] * area * nt * nt * grad;
      B += g.grid.wb[static_cast<Eigen::Index>(bi)] * T.squaredNorm();
      BN += g.grid.wb[static_cast<Eigen::Index>(bi)] * nt * nt;
    }
    he.E[k] = E;
    he.B[k] = B;
    he.BN[k] = BN;
  }
  return he;
}

// K^J = T^J curl~ V.  Commuting T through d~ ([T, d~_i] f = -d~_i(T x~^k) d~_k f)
// gives K^J = curl~ T^J V - L1[d~ T^J x~] with
//   L1_{ij} = d~_i(T^J x~^k) d~_k V^j - d~_j(T^J x~^k) d~_k V^i,
// exact for |J| = 1 and the leading part for longer words.
CurlRecord curl_impl(const TrajectorySeries& s, const TangentialBasis& basis, const Word& J,
                     const std::vector<FlowJacobian>& jac) {
  const Geometry& g = *s.geo;
  const int d = g.d();
  const size_t m = s.slices.size();
  if (m < 3) fail(ErrorKind::InsufficientHistory, "curl diagnostics need at least three slices");
  std::vector<VecField> V(m), xt(m);
  std::vector<ScalarField> ht(m);
  for (size_t k = 0; k < m; ++k) {
    V[k] = s.slices[k].V;
    xt[k] = s.slices[k].xt;
    ht[k] = s.slices[k].wave.ht;
  }
  const std::vector<VecField> TV = J.empty() ? V : word_vec(g, basis, V, s.dt, J);
  const std::vector<VecField> Tx = J.empty() ? std::vector<VecField>() : word_vec(g, basis, xt, s.dt, J);
  const std::vector<ScalarField> Tht = J.empty() ? ht : apply_word(g, basis, ht, s.dt, J);

  CurlRecord rec;
  std::vector<Eigen::MatrixXd> K(m);
  rec.D.resize(m);
  for (size_t k = 0; k < m; ++k) {
    K[k] = tilde_curl(g, TV[k], jac[k]);
    ScalarField D = tilde_div(g, TV[k], jac[k]) + s.e1 * Tht[k];
    if (!J.empty()) {
      const Eigen::MatrixXd DX = tilde_deriv(g, Tx[k], jac[k]);  // i*d+k = d~_i T x~^k
      const Eigen::MatrixXd DV = tilde_deriv(g, V[k], jac[k]);
      int c = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j, ++c)
          for (int q = 0; q < d; ++q)
            K[k].col(c).array() -= DX.col(i * d + q).array() * DV.col(q * d + j).array() -
                                   DX.col(j * d + q).array() * DV.col(q * d + i).array();
      for (int i = 0; i < d; ++i)
        for (int q = 0; q < d; ++q) D.array() -= DX.col(i * d + q).array() * DV.col(q * d + i).array();
    }
    rec.D[k] = interior_norm(g, D);
  }
  const std::vector<Eigen::MatrixXd> DtK = material_series_derivative(K, s.dt);
  rec.K.resize(m);
  rec.DtK.resize(m);
  for (size_t k = 0; k < m; ++k) {
    rec.K[k] = l2_norm(g, VecField(K[k]));
    rec.DtK[k] = l2_norm(g, VecField(DtK[k]));
  }
  if (J.empty()) {
    double scale = 0.0;
    std::vector<ScalarField> prod(m);
    for (size_t k = 0; k < m; ++k) {
      const Eigen::MatrixXd DV = tilde_deriv(g, V[k], jac[k]);
      const Eigen::MatrixXd DVt = tilde_deriv(g, s.slices[k].Vt, jac[k]);
      prod[k] = DV.rowwise().norm().cwiseProduct(DVt.rowwise().norm());
      scale = std::max(scale, prod[k].maxCoeff());
    }
    for (size_t k = 0; k < m; ++k)
      for (int n = 0; n < g.n(); ++n) {
        if (prod[k][n] <= 1e-6 * scale) continue;
        rec.c_hat = std::max(rec.c_hat, DtK[k].row(n).norm() / prod[k][n]);
      }
    rec.floor.resize(m);
    double acc = 0.0, prev = 0.0;
    for (size_t k = 0; k < m; ++k) {
      const double defect =
          l2_norm(g, VecField(tilde_curl(g, tilde_grad(g, s.slices[k].wave.h, jac[k]), jac[k])));
      if (k > 0) acc += 0.5 * s.dt * (prev + defect);
      prev = defect;
      rec.floor[k] = rec.K[0] + acc;
    }
  }
  return rec;
}

}  // namespace

double physical_energy(const Geometry& geo, const VecField& x, const VecField& V,
                       const ScalarField& h, double e1) {
  const FlowJacobian jac = flow_jacobian(geo, x);
  ScalarField dens(geo.n());
  for (int n = 0; n < geo.n(); ++n) {
    const double u = e1 * h[n];
    const double rho = std::exp(u);
    // Q = 2 int_1^rho p s^-2 ds with p = (s - 1)/e1; expm1 keeps small u accurate.
    const double Q = (2.0 / e1) * (u - (-std::expm1(-u)));
    dens[n] = (V.row(n).squaredNorm() + Q) * rho * jac.kappa[n];
  }
  return integrate(geo, dens);
}

double taylor_margin(const Geometry& geo, const ScalarField& h, const FlowJacobian& jac) {
  const VecField gh = tilde_grad(geo, h, jac);
  double m = std::numeric_limits<double>::infinity();
  for (size_t bi = 0; bi < geo.grid.boundary.size(); ++bi) {
    double area = 0.0;
    const Eigen::VectorXd n = tilde_normal(geo, jac, static_cast<int>(bi), area);
    m = std::min(m, -n.dot(gh.row(geo.grid.boundary[bi]).transpose()));
  }
  return m;
}

ScalarField continuity_defect(const Geometry& geo, const LagrangianState& s, const FlowJacobian& jac,
                              double e1) {
  return e1 * s.wave.ht + tilde_div(geo, s.V, jac);
}

double interior_norm(const Geometry& geo, ScalarField f) {
  for (int b : geo.grid.boundary) f[b] = 0.0;
  return l2_norm(geo, f);
}

double boundary_norm(const Geometry& geo, const ScalarField& f) {
  return std::sqrt(integrate_boundary(geo, f.cwiseAbs2()));
}

std::vector<double> continuity_residual(const TrajectorySeries& series) {
  const Geometry& g = *series.geo;
  std::vector<double> out;
  out.reserve(series.slices.size());
  for (const auto& s : series.slices)
    out.push_back(interior_norm(g, continuity_defect(g, s, slice_jacobian(g, s), series.e1)));
  return out;
}

std::vector<Word> diagnostic_words(int r_diag) {
  std::vector<Word> w{{}};
  if (r_diag >= 1) {
    w.push_back({0});
    w.push_back({kDt});
  }
  if (r_diag >= 2) w.push_back({0, kDt});
  return w;
}

GoodUnknowns good_unknowns(const TrajectorySeries& series, const SmoothingOperator& S,
                           const TangentialBasis& basis, const Word& I) {
  return good_unknowns_impl(series, S, basis, I, slice_jacobians(series));
}

HigherEnergy higher_energy(const TrajectorySeries& series, const SmoothingOperator& S,
                           const TangentialBasis& basis, const Word& I) {
  return higher_energy_impl(series, S, basis, I, slice_jacobians(series));
}

CurlRecord curl_divergence_residuals(const TrajectorySeries& series, const TangentialBasis& basis,
                                     const Word& J) {
  return curl_impl(series, basis, J, slice_jacobians(series));
}

double fit_growth(const std::vector<double>& t, const std::vector<double>& E) {
  double C = -std::numeric_limits<double>::infinity();
  if (E.empty() || !(E[0] > 0.0)) return 0.0;
  for (size_t k = 1; k < E.size(); ++k) {
    if (t[k] <= t[0]) continue;
    if (!(E[k] > 0.0)) continue;
    C = std::max(C, std::log(E[k] / E[0]) / (t[k] - t[0]));
  }
  return std::isfinite(C) ? C : 0.0;
}

EnergyTrace energy_trace(const TrajectorySeries& series, const SmoothingOperator& S, int r_diag) {
  const Geometry& g = *series.geo;
  const size_t m = series.slices.size();
  const std::vector<FlowJacobian> jac = slice_jacobians(series);
  const TangentialBasis basis = tangential_fields(g);
  const std::vector<Word> words = diagnostic_words(r_diag);
  std::vector<Word> wave_words;
  for (const auto& w : words)
    if (static_cast<int>(w.size()) <= r_diag - 1) wave_words.push_back(w);

  EnergyTrace tr;
  tr.columns = {"t", "E_total"};
  std::vector<HigherEnergy> he;
  for (const auto& w : words) {
    he.push_back(higher_energy_impl(series, S, basis, w, jac));
    tr.taylor_degenerate = tr.taylor_degenerate || he.back().taylor_degenerate;
  }
  for (const auto& w : words) tr.columns.push_back("E[" + word_name(w, basis) + "]");
  for (const auto& w : words) tr.columns.push_back("B[" + word_name(w, basis) + "]");
  for (const auto& w : words) tr.columns.push_back("BN[" + word_name(w, basis) + "]");
  std::vector<std::vector<double>> W;
  const std::vector<ScalarField> h = series.enthalpies();
  for (const auto& w : wave_words) {
    W.push_back(wave_energy(series.geo, basis, h, jac, series.dt, series.e1, w));
    tr.columns.push_back("W[" + word_name(w, basis) + "]");
  }
  tr.columns.push_back("cont_resid");
  tr.columns.push_back("cont_resid_boundary");
  std::vector<CurlRecord> curls;
  for (const auto& w : wave_words) {
    curls.push_back(curl_impl(series, basis, w, jac));
    tr.columns.push_back("curl_K[" + word_name(w, basis) + "]");
  }
  tr.columns.push_back("taylor_margin");

  std::vector<double> t(m);
  for (size_t k = 0; k < m; ++k) t[k] = series.slices[k].t;
  tr.min_taylor = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < m; ++k) {
    const LagrangianState& s = series.slices[k];
    std::vector<double> row{s.t, physical_energy(g, s.x, s.V, s.wave.h, series.e1)};
    for (const auto& e : he) row.push_back(e.E[k]);
    for (const auto& e : he) row.push_back(e.B[k]);
    for (const auto& e : he) row.push_back(e.BN[k]);
    for (const auto& w : W) row.push_back(w[k]);
    const ScalarField defect = continuity_defect(g, s, jac[k], series.e1);
    const double cont = interior_norm(g, defect);
    row.push_back(cont);
    row.push_back(boundary_norm(g, defect));
    for (const auto& c : curls) row.push_back(c.K[k]);
    const double tm = taylor_margin(g, s.wave.h, jac[k]);
    row.push_back(tm);
    tr.min_taylor = std::min(tr.min_taylor, tm);
    tr.final_continuity = cont;
    tr.rows.push_back(std::move(row));
  }
  tr.C_hat = -std::numeric_limits<double>::infinity();
  for (const auto& e : he) tr.C_hat = std::max(tr.C_hat, fit_growth(t, e.E));
  if (!curls.empty()) tr.c_hat = curls.front().c_hat;
  return tr;
}

}  // namespace fbe
