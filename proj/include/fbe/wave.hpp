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

#include "fbe/elliptic.hpp"
#include "fbe/fields.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

struct WaveState {
  ScalarField h;
  ScalarField ht;  // D_t h
  double t = 0.0;
};

/// F = d~_i V~^j d~_j V^i
ScalarField wave_forcing(const Geometry& geo, const VecField& V, const VecField& Vt,
                         const FlowJacobian& jac);

/// Largest step allowed by the wave CFL condition for the given coordinates.
double wave_cfl_limit(const Geometry& geo, const FlowJacobian& jac, double e1);

/// Position-Verlet halves of the leapfrog step; the Euler coupling interleaves
/// the velocity update between them.
void wave_drift(WaveState& ws, double dt);
void wave_kick(WaveState& ws, const DirichletOperator& op, const ScalarField& F, double dt, double e1);
/// Kick with the collocated Laplacian div~ d~ h, the operator that makes the
/// discrete continuity equation follow from the discrete momentum equation.
void wave_kick_collocated(WaveState& ws, const Geometry& geo, const FlowJacobian& jac,
                          const ScalarField& F, double dt, double e1);

/// One leapfrog step with the forcing and the coordinates at the half step.
WaveState step_wave(const WaveState& ws, const ScalarField& F, const DirichletOperator& op,
                    double dt, double e1);
WaveState step_wave(const WaveState& ws, const VecField& V, const VecField& Vt,
                    const FlowJacobian& jac, std::shared_ptr<const Geometry> geo, double dt, double e1);

/// Eigenpairs of the identity-coordinate Dirichlet operator up to lambda_max,
/// orthonormal in the w-weighted inner product.  The operator is rotation
/// invariant, so each angular mode reduces to a tridiagonal radial problem.
struct GalerkinBasis {
  double lambda_max = 0;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd psi;     // n x m, zero on the boundary
  std::vector<int> mode;   // angular wavenumber of each column

  Eigen::VectorXd project(const Geometry& geo, const ScalarField& f) const;
  ScalarField expand(const Eigen::VectorXd& d) const { return psi * d; }
};

GalerkinBasis galerkin_basis(std::shared_ptr<const Geometry> geo, double lambda_max);

struct GalerkinState {
  Eigen::VectorXd d, dd;  // coefficients and their time derivatives
  double t = 0.0;
  bool bandwidth_warning = false;
};

GalerkinState galerkin_init(const GalerkinBasis& basis, const Geometry& geo, const WaveState& ws);
/// Stormer-Verlet on e1 d'' = -psi^T diag(1/kappa~) K psi d + <psi, F>_w.
GalerkinState step_wave_galerkin(const GalerkinState& gs, const ScalarField& F,
                                 const DirichletOperator& op, const GalerkinBasis& basis,
                                 double dt, double e1);
WaveState galerkin_state(const GalerkinBasis& basis, const GalerkinState& gs);

/// W^J at each slice:  int e1 (D_t T^J h)^2 + |T^J d~h|^2 dx~.  For the empty
/// word the gradient term is the discrete Dirichlet form h^T K h.
std::vector<double> wave_energy(std::shared_ptr<const Geometry> geo, const TangentialBasis& basis,
                                const std::vector<ScalarField>& h, const std::vector<FlowJacobian>& jac,
                                double dt, double e1, const Word& J);

}  // namespace fbe
