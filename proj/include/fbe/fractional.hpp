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

#include "fbe/geometry.hpp"

namespace fbe {

/// <xi>^s = (1 + |xi|^2)^{s/2}.
double japanese(double xi, double s);

/// Chartwise fractional tangential derivatives <d_theta>^s_mu (d = 2).
///
/// The collar chart is periodic in the angle and uses exact Fourier series
/// ring by ring.  The interior chart is planar: chi_0 f is resampled on a
/// Cartesian grid over its parameter box padded by a factor two, multiplied
/// in Fourier space and interpolated back.
class FractionalNorm {
 public:
  FractionalNorm(std::shared_ptr<const Geometry> geo, double s);

  double order() const { return s_; }
  const Geometry& geometry() const { return *geo_; }

  ScalarField frac_deriv(const ScalarField& f, int mu) const;
  /// <d_theta>^s on boundary traces (values at the boundary nodes).
  Eigen::VectorXd boundary(const Eigen::VectorXd& fb) const;

 private:
  ScalarField interior(const ScalarField& f) const;

  std::shared_ptr<const Geometry> geo_;
  double s_;
  int m_ = 0;         // Cartesian samples per axis of the padded box
  double half_ = 0;   // padded half-width
};

/// sum_mu < <d>^s_mu f, <d>^s_mu g >_w
double frac_inner(const FractionalNorm& fr, const ScalarField& f, const ScalarField& g);
/// ||f||_{H^s(dOmega)} of a boundary trace.
double boundary_hs_norm(const FractionalNorm& fr, const Eigen::VectorXd& fb);

/// ( sum_mu || <d>^s_mu (f g) - f <d>^s_mu g ||^2 )^{1/2}
double leibniz_residual(const FractionalNorm& fr, const ScalarField& f, const ScalarField& g);
/// The same commutator on boundary traces.
double leibniz_residual_boundary(const FractionalNorm& fr, const Eigen::VectorXd& fb,
                                 const Eigen::VectorXd& gb);

}  // namespace fbe
