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
#include "fbe/fields.hpp"

#include <sstream>

namespace fbe {

Eigen::MatrixXd FlowJacobian::at(int node) const {
  Eigen::MatrixXd m(d, d);
  for (int q = 0; q < d * d; ++q) m(q / d, q % d) = J(node, q);
  return m;
}

Eigen::MatrixXd FlowJacobian::inv_at(int node) const {
  Eigen::MatrixXd m(d, d);
  for (int q = 0; q < d * d; ++q) m(q / d, q % d) = Jinv(node, q);
  return m;
}

FlowJacobian identity_jacobian(const Geometry& geo) {
  return flow_jacobian(geo, geo.grid.y);
}

FlowJacobian flow_jacobian(const Geometry& geo, const VecField& xt) {
  const int d = geo.d(), n = geo.n();
  if (xt.rows() != n || xt.cols() != d) fail(ErrorKind::Configuration, "flow map has wrong shape");
  FlowJacobian jac;
  jac.d = d;
  jac.J.resize(n, d * d);
  jac.Jinv.resize(n, d * d);
  jac.kappa.resize(n);
  for (int i = 0; i < d; ++i) {
    const VecField g = grad_y(geo, xt.col(i));
    for (int a = 0; a < d; ++a) jac.J.col(i * d + a) = g.col(a);
  }
  for (int node = 0; node < n; ++node) {
    const Eigen::MatrixXd m = jac.at(node);
    const double det = m.determinant();
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "det dx~/dy = " << det << " at node " << node;
      fail(ErrorKind::DegenerateFlow, os.str());
    }
    jac.kappa[node] = det;
    const Eigen::MatrixXd inv = m.inverse();
    for (int q = 0; q < d * d; ++q) jac.Jinv(node, q) = inv(q / d, q % d);
  }
  return jac;
}

VecField tilde_grad(const Geometry& geo, const ScalarField& f, const FlowJacobian& jac) {
  const int d = geo.d();
  const VecField g = grad_y(geo, f);
  VecField out = VecField::Zero(geo.n(), d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      out.col(i).array() += jac.Jinv.col(a * d + i).array() * g.col(a).array();
  return out;
}

Eigen::MatrixXd tilde_deriv(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac) {
  const int d = geo.d();
  Eigen::MatrixXd out(geo.n(), d * d);
  for (int j = 0; j < d; ++j) {
    const VecField g = tilde_grad(geo, alpha.col(j), jac);
    for (int i = 0; i < d; ++i) out.col(i * d + j) = g.col(i);
  }
  return out;
}

ScalarField tilde_div(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac) {
  const int d = geo.d();
  const Eigen::MatrixXd D = tilde_deriv(geo, alpha, jac);
  ScalarField out = ScalarField::Zero(geo.n());
  for (int i = 0; i < d; ++i) out += D.col(i * d + i);
  return out;
}

Eigen::MatrixXd tilde_curl(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac) {
  const int d = geo.d();
  const Eigen::MatrixXd D = tilde_deriv(geo, alpha, jac);
  Eigen::MatrixXd out(geo.n(), d * (d - 1) / 2);
  int c = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) out.col(c++) = D.col(i * d + j) - D.col(j * d + i);
  return out;
}

std::string word_name(const Word& w, const TangentialBasis& basis) {
  if (w.empty()) return "0";
  std::string s;
  for (int op : w) {
    if (!s.empty()) s += ".";
    s += op == kDt ? std::string("Dt") : basis.names.at(static_cast<size_t>(op));
  }
  return s;
}

int word_time_order(const Word& w) {
  int k = 0;
  for (int op : w) k += op == kDt;
  return k;
}

std::vector<ScalarField> apply_word(const Geometry& geo, const TangentialBasis& basis,
                                    const std::vector<ScalarField>& series, double dt, const Word& w) {
  std::vector<ScalarField> cur = series;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (*it == kDt) {
      cur = material_series_derivative(cur, dt);
    } else {
      const VecField& S = basis.fields.at(static_cast<size_t>(*it));
      for (auto& f : cur) f = apply_tangential(S, f, geo);
    }
  }
  return cur;
}

}  // namespace fbe
