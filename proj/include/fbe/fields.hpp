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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbe/errors.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

/// J = dx~/dy and its inverse per node, stored row-major in n x d^2 arrays:
/// J(n, i*d + a) = dx~^i/dy^a and Jinv(n, a*d + i) = dy^a/dx~^i.
struct FlowJacobian {
  int d = 2;
  Eigen::MatrixXd J;
  Eigen::MatrixXd Jinv;
  Eigen::VectorXd kappa;

  Eigen::MatrixXd at(int node) const;
  Eigen::MatrixXd inv_at(int node) const;
};

FlowJacobian identity_jacobian(const Geometry& geo);
FlowJacobian flow_jacobian(const Geometry& geo, const VecField& xt);

VecField tilde_grad(const Geometry& geo, const ScalarField& f, const FlowJacobian& jac);
/// Full derivative of a vector field: D(n, i*d + j) = d~_i alpha^j.
Eigen::MatrixXd tilde_deriv(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac);
ScalarField tilde_div(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac);
/// Antisymmetric curl; one column per pair i<j in order (12), (13), (23).
Eigen::MatrixXd tilde_curl(const Geometry& geo, const VecField& alpha, const FlowJacobian& jac);

/// A word T^I in the tangential fields and D_t: entries are indices into a
/// TangentialBasis, or kDt.  Applied right to left.
using Word = std::vector<int>;
constexpr int kDt = -1;

std::string word_name(const Word& w, const TangentialBasis& basis);
int word_time_order(const Word& w);

/// Time derivative at fixed label of a uniformly sampled series: centred in
/// the interior, second-order one-sided at the ends (first order for two
/// slices).
template <class F>
std::vector<F> material_series_derivative(const std::vector<F>& s, double dt) {
  const size_t m = s.size();
  if (m < 2) fail(ErrorKind::InsufficientHistory, "material derivative needs at least two slices");
  std::vector<F> out(m);
  if (m == 2) {
    out[0] = (s[1] - s[0]) / dt;
    out[1] = out[0];
    return out;
  }
  for (size_t k = 1; k + 1 < m; ++k) out[k] = (s[k + 1] - s[k - 1]) / (2.0 * dt);
  out[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dt);
  out[m - 1] = (3.0 * s[m - 1] - 4.0 * s[m - 2] + s[m - 3]) / (2.0 * dt);
  return out;
}

/// T^I applied to every slice of a uniformly sampled series.
std::vector<ScalarField> apply_word(const Geometry& geo, const TangentialBasis& basis,
                                    const std::vector<ScalarField>& series, double dt, const Word& w);

}  // namespace fbe
