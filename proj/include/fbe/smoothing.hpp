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

#include <memory>
#include <vector>

#include "fbe/fields.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

/// psi(t) = (35/32)(1 - t^2)^3 on |t| <= 1.
double smoothing_kernel(double t);
/// Continuous Fourier transform of psi, int psi(t) cos(xi t) dt.
double smoothing_kernel_hat(double xi);

/// The symmetric tangential mollifier S_eps.  In each boundary chart it
/// convolves m (chi f) along the tangential parameter axes; the interior
/// chart contributes chi_0^2 f unchanged.  eps = 0 is the identity.
class SmoothingOperator {
 public:
  SmoothingOperator(std::shared_ptr<const Geometry> geo, double eps);

  double eps() const { return eps_; }
  const Geometry& geometry() const { return *geo_; }
  std::shared_ptr<const Geometry> geometry_ptr() const { return geo_; }

  ScalarField apply(const ScalarField& f) const;
  VecField apply(const VecField& f) const;
  ScalarField apply_squared(const ScalarField& f) const { return apply(apply(f)); }
  VecField apply_squared(const VecField& f) const { return apply(apply(f)); }

  /// Discrete multiplier of the boundary-chart convolution on angular mode k
  /// (d = 2).
  double multiplier(int k) const;

  /// Test hook: scale the discrete kernel so it no longer has unit mass.
  void set_kernel_scale_for_testing(double s);

 private:
  void build_weights();
  ScalarField apply_ball(const ScalarField& f) const;

  std::shared_ptr<const Geometry> geo_;
  double eps_;
  double scale_ = 1.0;
  std::vector<double> w_;  // kernel weights at offsets -K..K
  std::vector<std::complex<double>> mult_;
};

struct CommutatorReport {
  double tangential = 0.0;      // ||[S_eps, S] f||
  double multiplication = 0.0;  // ||S_eps(f S g) - f S_eps S g||
  double gradient = 0.0;        // sum_i ||[d~_i, S_eps] S f||
  double radial = 0.0;          // ||[S_eps, d_r] f||  (d = 2)
};

CommutatorReport commutator_residuals(const SmoothingOperator& op, const ScalarField& f,
                                      const ScalarField& g, const VecField& S,
                                      const FlowJacobian& jac);

}  // namespace fbe
