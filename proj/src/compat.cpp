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
#include "fbe/compat.hpp"

#include <cmath>

#include "fbe/elliptic.hpp"
#include "fbe/errors.hpp"

namespace fbe {

InitialData pulsation_data(const Geometry& geo, double A, double omega) {
  const int n = geo.n(), d = geo.d();
  if (d != 2) fail(ErrorKind::UnsupportedDimension, "pulsation data is planar");
  const double B = (4.0 * A + 2.0 * omega * omega) / 8.0;
  InitialData data;
  data.x0 = geo.grid.y;
  data.h0.resize(n);
  data.V0.resize(n, d);
  for (int k = 0; k < n; ++k) {
    const double q = 1.0 - geo.grid.r[k] * geo.grid.r[k];
    data.h0[k] = A * q + B * q * q;
    data.V0(k, 0) = -omega * geo.grid.y(k, 1);
    data.V0(k, 1) = omega * geo.grid.y(k, 0);
  }
  return data;
}

InitialData expansion_data(const Geometry& geo, double A, double omega) {
  InitialData data;
  data.x0 = geo.grid.y;
  data.h0 = A * (1.0 - geo.grid.r.array().square()).matrix();
  data.V0 = omega * geo.grid.y;
  return data;
}

InitialData zero_data(const Geometry& geo) {
  InitialData data;
  data.x0 = geo.grid.y;
  data.h0 = ScalarField::Zero(geo.n());
  data.V0 = VecField::Zero(geo.n(), geo.d());
  return data;
}

bool CompatReport::pass(double tol) const {
  for (double m : margins)
    if (!(m <= tol)) return false;
  return true;
}

CompatReport check_compat(const Geometry& geo, const DataJet& jet) {
  CompatReport rep;
  for (const ScalarField& hk : jet.h) {
    double m = 0.0;
    for (int b : geo.grid.boundary) m = std::max(m, std::abs(hk[b]));
    rep.margins.push_back(m);
  }
  const FlowJacobian jac = flow_jacobian(geo, jet.x0);
  if (jet.h.size() > 1)
    rep.continuity = (jet.e1 * jet.h[1] + tilde_div(geo, jet.V[0], jac)).cwiseAbs().maxCoeff();
  return rep;
}

double sobolev2_surrogate(const Geometry& geo, const ScalarField& u) {
  double s = geo.grid.w.dot(u.cwiseAbs2());
  const VecField g = grad_y(geo, u);
  s += geo.grid.w.dot(g.rowwise().squaredNorm());
  for (int a = 0; a < geo.d(); ++a) s += geo.grid.w.dot(grad_y(geo, g.col(a)).rowwise().squaredNorm());
  return std::sqrt(s);
}

CorrectionResult correct_data_for_eps(const SmoothingOperator& S, const InitialData& data, int order,
                                      double e1, const CorrectionOptions& opt) {
  const Geometry& geo = S.geometry();
  require_planar(geo, "the eps-correction");
  if (order < 2 || order > kMaxJetOrder)
    fail(ErrorKind::UnsupportedOrder, "the correction is implemented for orders 2 and 3");
  if (e1 > opt.e1_max)
    fail(ErrorKind::Precondition, "e1 = " + std::to_string(e1) + " exceeds the smallness threshold " +
                                      std::to_string(opt.e1_max));
  if ((data.x0 - geo.grid.y).cwiseAbs().maxCoeff() > 1e-14)
    fail(ErrorKind::Precondition, "the correction assumes the reference configuration x_0 = y");
  // Targets: the jet of the unsmoothed problem.
  const SmoothingOperator S0(S.geometry_ptr(), 0.0);
  const DataJet target = power_series_coeffs(S0, data.h0, data.V0, data.x0, order, e1, data.h1);
  const PolarPoisson poisson(S.geometry_ptr());

  const int nu_k = order - 1;  // unknowns u_0 .. u_{order-2}
  std::vector<ScalarField> u(nu_k, ScalarField::Zero(geo.n()));
  ScalarField um1 = ScalarField::Zero(geo.n());
  CorrectionResult res;
  int growth = 0;
  auto corrected = [&] {
    InitialData out = data;
    out.h0 = data.h0 + u[0];
    out.V0 = data.V0 + grad_y(geo, um1);
    out.h1 = target.h[1] + (nu_k > 1 ? u[1] : ScalarField::Zero(geo.n()));
    return out;
  };
  for (int nu = 1; nu <= opt.max_iter; ++nu) {
    const InitialData cur = corrected();
    const DataJet jet = power_series_coeffs(S, cur.h0, cur.V0, cur.x0, order, e1, cur.h1);
    double inc = 0.0;
    for (int k = 0; k < nu_k; ++k) {
      const ScalarField resid = e1 * (target.h[k + 2] - jet.h[k + 2]);
      const ScalarField du = poisson.solve(resid);
      u[k] += du;
      inc += sobolev2_surrogate(geo, du);
    }
    if (nu_k > 1) {
      const ScalarField next = poisson.solve(ScalarField(-e1 * u[1]));
      inc += sobolev2_surrogate(geo, ScalarField(next - um1));
      um1 = next;
    }
    res.increments.push_back(inc);
    res.iterations = nu;
    if (res.increments.size() >= 2) {
      const double prev = res.increments[res.increments.size() - 2];
      res.contraction.push_back(prev > 0 ? inc / prev : 0.0);
      growth = inc > prev ? growth + 1 : 0;
      if (growth >= 3)
        fail(ErrorKind::CorrectionFailure,
             "eps-correction diverges (increment " + std::to_string(inc) + "); try a smaller e1 or eps");
    }
    if (!std::isfinite(inc)) fail(ErrorKind::CorrectionFailure, "eps-correction produced non-finite data");
    if (inc < opt.tol) break;
    if (nu == opt.max_iter)
      fail(ErrorKind::CorrectionFailure, "eps-correction did not converge in " + std::to_string(opt.max_iter) +
                                             " iterations (last increment " + std::to_string(inc) + ")");
  }
  res.data = corrected();
  res.jet = power_series_coeffs(S, res.data.h0, res.data.V0, res.data.x0, order, e1, res.data.h1);
  res.velocity_change = l2_norm(geo, VecField(res.data.V0 - data.V0));
  res.enthalpy_change = l2_norm(geo, ScalarField(res.data.h0 - data.h0));
  return res;
}

}  // namespace fbe
