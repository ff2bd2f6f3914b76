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
#include "fbe/wave.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "fbe/errors.hpp"

namespace fbe {

ScalarField wave_forcing(const Geometry& geo, const VecField& V, const VecField& Vt,
                         const FlowJacobian& jac) {
  const int d = geo.d();
  const Eigen::MatrixXd DV = tilde_deriv(geo, V, jac);
  const Eigen::MatrixXd DVt = tilde_deriv(geo, Vt, jac);
  ScalarField F = ScalarField::Zero(geo.n());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) F.array() += DVt.col(i * d + j).array() * DV.col(j * d + i).array();
  return F;
}

double wave_cfl_limit(const Geometry& geo, const FlowJacobian& jac, double e1) {
  const PolarOps& P = geo.polar();
  double stretch = 0.0;
  for (int n = 0; n < geo.n(); ++n) stretch = std::max(stretch, jac.at(n).norm() / std::sqrt(2.0));
  stretch = std::max(stretch, 1e-300);
  return 0.5 * std::sqrt(e1) * P.r(0) * P.dtheta() / stretch;
}

void wave_drift(WaveState& ws, double dt) {
  ws.h += 0.5 * dt * ws.ht;
  ws.t += 0.5 * dt;
}

void wave_kick(WaveState& ws, const DirichletOperator& op, const ScalarField& F, double dt, double e1) {
  const ScalarField acc = op.laplacian(ws.h) + F;
  const int ni = op.n_interior();
  ws.ht.head(ni) += (dt / e1) * acc.head(ni);
  ws.ht.tail(ws.ht.size() - ni).setZero();
}

void wave_kick_collocated(WaveState& ws, const Geometry& geo, const FlowJacobian& jac,
                          const ScalarField& F, double dt, double e1) {
  const ScalarField acc = tilde_div(geo, tilde_grad(geo, ws.h, jac), jac) + F;
  ws.ht += (dt / e1) * acc;
  for (int b : geo.grid.boundary) ws.ht[b] = 0.0;
}

WaveState step_wave(const WaveState& ws, const ScalarField& F, const DirichletOperator& op,
                    double dt, double e1) {
  WaveState out = ws;
  wave_drift(out, dt);
  wave_kick(out, op, F, dt, e1);
  wave_drift(out, dt);
  if (!out.h.allFinite() || !out.ht.allFinite())
    fail(ErrorKind::BlowUp, "non-finite enthalpy at t = " + std::to_string(out.t));
  return out;
}

WaveState step_wave(const WaveState& ws, const VecField& V, const VecField& Vt,
                    const FlowJacobian& jac, std::shared_ptr<const Geometry> geo, double dt, double e1) {
  if (dt > wave_cfl_limit(*geo, jac, e1) * (1.0 + 1e-12))
    fail(ErrorKind::TimeStep, "time step " + std::to_string(dt) + " violates the wave CFL limit " +
                                  std::to_string(wave_cfl_limit(*geo, jac, e1)));
  const ScalarField F = wave_forcing(*geo, V, Vt, jac);
  DirichletOperator op(geo, jac);
  return step_wave(ws, F, op, dt, e1);
}

Eigen::VectorXd GalerkinBasis::project(const Geometry& geo, const ScalarField& f) const {
  return psi.transpose() * geo.grid.w.cwiseProduct(f);
}

GalerkinBasis galerkin_basis(std::shared_ptr<const Geometry> geo, double lambda_max) {
  const PolarOps& P = geo->polar();
  const int nt = P.nt(), nr = P.nr(), m = nr - 1;
  const double dr = P.dr(), dth = P.dtheta();
  GalerkinBasis b;
  b.lambda_max = lambda_max;
  std::vector<double> lam;
  std::vector<Eigen::VectorXd> cols;
  std::vector<int> modes;
  for (int k = 0; k <= nt / 2; ++k) {
    // Per-ring stiffness of the angular mode with unit angular norm:
    // the theta faces contribute (2 - 2 cos k dth)/dth^2 * dr/r_j and the
    // r faces r_f/dr; the mass is dr * r_j (times dth, which cancels).
    const double sk = (2.0 - 2.0 * std::cos(k * dth)) / (dth * dth);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd mass(m);
    for (int j = 0; j < m; ++j) {
      mass[j] = dr * P.r(j);
      A(j, j) += sk * dr / P.r(j);
      const double rf = (j + 1) * dr;
      A(j, j) += rf / dr;
      if (j + 1 < m) {
        A(j + 1, j + 1) += rf / dr;
        A(j, j + 1) -= rf / dr;
        A(j + 1, j) -= rf / dr;
      }
    }
    const Eigen::VectorXd is = mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd S = is.asDiagonal() * A * is.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    for (int e = 0; e < m; ++e) {
      const double l = es.eigenvalues()[e];
      if (l > lambda_max) break;
      const Eigen::VectorXd radial = is.cwiseProduct(es.eigenvectors().col(e));  // mass-orthonormal
      const int copies = (k == 0 || k == nt / 2) ? 1 : 2;
      for (int c = 0; c < copies; ++c) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(P.size());
        // Angular factor normalised so that sum_i dth * f(theta_i)^2 = 1.
        const double norm = (copies == 1) ? 1.0 / std::sqrt(2.0 * M_PI) : 1.0 / std::sqrt(M_PI);
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < nt; ++i) {
            const double th = P.theta(i);
            const double ang = (k == 0) ? 1.0 : (k == nt / 2 ? std::cos(k * th) : (c == 0 ? std::cos(k * th) : std::sin(k * th)));
            col[P.index(i, j)] = norm * ang * radial[j];
          }
        lam.push_back(l);
        cols.push_back(col);
        modes.push_back(k);
      }
    }
  }
  std::vector<size_t> order(lam.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t c) { return lam[a] < lam[c]; });
  b.lambda.resize(static_cast<long>(order.size()));
  b.psi.resize(P.size(), static_cast<long>(order.size()));
  for (size_t k = 0; k < order.size(); ++k) {
    b.lambda[static_cast<long>(k)] = lam[order[k]];
    b.psi.col(static_cast<long>(k)) = cols[order[k]];
    b.mode.push_back(modes[order[k]]);
  }
  return b;
}

GalerkinState galerkin_init(const GalerkinBasis& basis, const Geometry& geo, const WaveState& ws) {
  GalerkinState gs;
  gs.d = basis.project(geo, ws.h);
  gs.dd = basis.project(geo, ws.ht);
  gs.t = ws.t;
  return gs;
}

namespace {

Eigen::VectorXd galerkin_accel(const GalerkinBasis& basis, const DirichletOperator& op,
                               const Eigen::VectorXd& d, const Eigen::VectorXd& Fp, double e1) {
  const ScalarField h = basis.psi * d;
  const ScalarField Kh = op.stiffness() * h;
  return (-(basis.psi.transpose() * Kh.cwiseQuotient(op.kappa())) + Fp) / e1;
}

}  // namespace

GalerkinState step_wave_galerkin(const GalerkinState& gs, const ScalarField& F,
                                 const DirichletOperator& op, const GalerkinBasis& basis,
                                 double dt, double e1) {
  GalerkinState out = gs;
  const Geometry& geo = op.geometry();
  const Eigen::VectorXd Fp = basis.project(geo, F);
  // Forcing energy outside the span signals a basis narrower than the data.
  const ScalarField resid = F - basis.psi * Fp;
  const double fn = std::sqrt(geo.grid.w.dot(F.cwiseAbs2()));
  const double rn = std::sqrt(geo.grid.w.dot(resid.cwiseAbs2()));
  out.bandwidth_warning = gs.bandwidth_warning || (fn > 0 && rn > 1e-3 * fn);
  out.d += 0.5 * dt * out.dd;
  out.dd += dt * galerkin_accel(basis, op, out.d, Fp, e1);
  out.d += 0.5 * dt * out.dd;
  out.t += dt;
  if (!out.d.allFinite() || !out.dd.allFinite())
    fail(ErrorKind::BlowUp, "non-finite Galerkin coefficients at t = " + std::to_string(out.t));
  return out;
}

WaveState galerkin_state(const GalerkinBasis& basis, const GalerkinState& gs) {
  WaveState ws;
  ws.h = basis.psi * gs.d;
  ws.ht = basis.psi * gs.dd;
  ws.t = gs.t;
  return ws;
}

std::vector<double> wave_energy(std::shared_ptr<const Geometry> geo, const TangentialBasis& basis,
                                const std::vector<ScalarField>& h, const std::vector<FlowJacobian>& jac,
                                double dt, double e1, const Word& J) {
  if (h.size() < 2) fail(ErrorKind::InsufficientHistory, "wave energy needs at least two slices");
  if (jac.size() != h.size()) fail(ErrorKind::Configuration, "one Jacobian per slice is required");
  const Geometry& g = *geo;
  const Word DtJ = [&] {
    Word w{kDt};
    w.insert(w.end(), J.begin(), J.end());
    return w;
  }();
  const std::vector<ScalarField> th = apply_word(g, basis, h, dt, DtJ);
  std::vector<double> out(h.size());
  if (J.empty()) {
    for (size_t k = 0; k < h.size(); ++k) {
      DirichletOperator op(geo, jac[k]);
      out[k] = e1 * g.grid.w.dot(th[k].cwiseAbs2().cwiseProduct(jac[k].kappa)) + op.energy(h[k]);
    }
    return out;
  }
  // T^J applied to each component of d~h.
  const int d = g.d();
  std::vector<std::vector<ScalarField>> comp(d, std::vector<ScalarField>(h.size()));
  for (size_t k = 0; k < h.size(); ++k) {
    const VecField gh = tilde_grad(g, h[k], jac[k]);
    for (int i = 0; i < d; ++i) comp[i][k] = gh.col(i);
  }
  for (int i = 0; i < d; ++i) comp[i] = apply_word(g, basis, comp[i], dt, J);
  for (size_t k = 0; k < h.size(); ++k) {
    ScalarField dens = e1 * th[k].cwiseAbs2();
    for (int i = 0; i < d; ++i) dens += comp[i][k].cwiseAbs2();
    out[k] = g.grid.w.dot(dens.cwiseProduct(jac[k].kappa));
  }
  return out;
}

}  // namespace fbe
