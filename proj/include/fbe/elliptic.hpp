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
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fbe/fields.hpp"
#include "fbe/fractional.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Compact symmetric finite-volume form of int kappa~ |d~h|^2 dy on the polar
/// grid (d = 2).  K is assembled over all nodes; the Dirichlet problem uses
/// the block of interior nodes, which are the first nt*(nr-1) indices.
class DirichletOperator {
 public:
  DirichletOperator(std::shared_ptr<const Geometry> geo, const FlowJacobian& jac);

  const SparseMatrix& stiffness() const { return K_; }
  const SparseMatrix& interior_block() const { return Kii_; }
  int n_interior() const { return ni_; }
  const Eigen::VectorXd& kappa() const { return kappa_; }
  const Geometry& geometry() const { return *geo_; }

  /// Delta~ h = -(K h) / (w kappa~) at interior nodes, zero on the boundary.
  ScalarField laplacian(const ScalarField& h) const;
  /// h^T K h
  double energy(const ScalarField& h) const;
  /// Delta~ h = rhs, h = 0 on the boundary; PCG until the L2 residual of
  /// the discrete equation is below tol.
  ScalarField solve(const ScalarField& rhs, double tol, int max_iter = 20000) const;

 private:
  std::shared_ptr<const Geometry> geo_;
  SparseMatrix K_, Kii_;
  Eigen::VectorXd kappa_;
  int ni_ = 0;
};

ScalarField solve_dirichlet(std::shared_ptr<const Geometry> geo, const FlowJacobian& jac,
                            const ScalarField& rhs, double tol);

/// L2 norm over interior nodes of Delta~ h - rhs.
double dirichlet_residual(const DirichletOperator& op, const ScalarField& h, const ScalarField& rhs);

/// High-order Poisson solver at identity coordinates: exact Fourier modes in
/// the angle, sixth-order stencils in r along diameters.
class PolarPoisson {
 public:
  explicit PolarPoisson(std::shared_ptr<const Geometry> geo);
  ScalarField laplacian(const ScalarField& f) const;
  /// Delta u = rhs with u = 0 on the boundary.
  ScalarField solve(const ScalarField& rhs) const;

 private:
  std::shared_ptr<const Geometry> geo_;
  std::vector<Eigen::MatrixXd> lap_;                    // per mode, nr x nr
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;  // interior block
};

/// |d~ alpha| / (|div~ alpha| + |curl~ alpha| + sum_S |S alpha|) per node.
ScalarField pointwise_divcurl_certificate(const Geometry& geo, const VecField& alpha,
                                          const FlowJacobian& jac, const TangentialBasis& basis);

struct DivCurlL2Record {
  double lhs = 0;            // ||alpha||^2_{H^1}
  double div2 = 0;           // ||div~ alpha||^2
  double curl2 = 0;          // ||curl~ alpha||^2
  double boundary_half = 0;  // int N_i N_j <d>^{1/2} alpha^i <d>^{1/2} alpha^j
  double boundary_l2 = 0;    // ||alpha||^2_{L2(dOmega)}
  double interior_l2 = 0;    // ||alpha||^2_{L2(Omega)}
  double rhs() const { return div2 + curl2 + boundary_half + boundary_l2 + interior_l2; }
  double constant() const { return rhs() > 0 ? lhs / rhs() : 0.0; }
};

DivCurlL2Record l2_divcurl_certificate(const VecField& alpha, const FlowJacobian& jac,
                                       const FractionalNorm& half);

}  // namespace fbe
