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

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace fbe {

/// Finite-difference weights for derivatives 0..order at x0 from nodes x
/// (Fornberg's recursion). Returns a (order+1) x x.size() matrix.
Eigen::MatrixXd fd_weights(double x0, const std::vector<double>& x, int order);

/// Unnormalised two-dimensional complex DFT (forward: e^{-i k x}).
Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& a, bool inverse);

/// Differentiation, filtering and interpolation on the polar node set of the
/// two-dimensional atlas.
///
/// Nodes sit at theta_i = 2 pi i / nt and r_j = (j + 1/2) dr with
/// dr = 1/(nr - 1/2), so ring nr-1 is the boundary r = 1.  Node (i, j) has
/// index j*nt + i.  Angular derivatives are spectral; radial derivatives use
/// sixth-order stencils along diameters, which makes the origin an ordinary
/// interior point of a uniform line of 2*nr nodes.
class PolarOps {
 public:
  PolarOps(int nt, int nr);
  ~PolarOps();
  PolarOps(const PolarOps&) = delete;
  PolarOps& operator=(const PolarOps&) = delete;

  int nt() const { return nt_; }
  int nr() const { return nr_; }
  int size() const { return nt_ * nr_; }
  double dtheta() const { return dtheta_; }
  double dr() const { return dr_; }
  double r(int j) const { return (j + 0.5) * dr_; }
  double theta(int i) const { return i * dtheta_; }
  int index(int i, int j) const { return j * nt_ + i; }

  Eigen::VectorXd d_theta(const Eigen::VectorXd& f) const;
  Eigen::VectorXd d_r(const Eigen::VectorXd& f) const;
  /// Cartesian gradient, n x 2.
  Eigen::MatrixXd grad(const Eigen::VectorXd& f) const;

  /// Ring-wise Fourier coefficients: (nt/2+1) x nr, unnormalised (FFTW r2c).
  Eigen::MatrixXcd ring_fft(const Eigen::VectorXd& f) const;
  Eigen::VectorXd ring_ifft(const Eigen::MatrixXcd& c) const;
  /// Multiply the angular Fourier coefficient k (0..nt/2) by m[k] on every ring.
  Eigen::VectorXd theta_multiplier(const Eigen::VectorXd& f,
                                   const std::vector<std::complex<double>>& m) const;

  /// The diameter through theta_i and theta_i + pi as a uniform line.
  const std::vector<double>& line() const { return line_; }
  /// Banded first/second derivative matrices on the diameter line.
  const Eigen::MatrixXd& line_d1() const { return d1_; }
  const Eigen::MatrixXd& line_d2() const { return d2_; }

  /// Spectral-in-theta, Lagrange-in-r evaluation of f at Cartesian points.
  Eigen::VectorXd interpolate(const Eigen::VectorXd& f, const Eigen::MatrixXd& pts) const;

 private:
  int nt_, nr_;
  double dtheta_, dr_;
  std::vector<double> line_;
  Eigen::MatrixXd d1_, d2_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace fbe
