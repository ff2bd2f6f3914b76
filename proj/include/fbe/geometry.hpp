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

#include "fbe/polar.hpp"

namespace fbe {

/// Scalar fields are one value per grid node; vector fields are n x d with
/// Cartesian components in the columns.
using ScalarField = Eigen::VectorXd;
using VecField = Eigen::MatrixXd;

/// C^2 ramp q(t) = t^3 (10 - 15 t + 6 t^2), clamped to [0, 1].
double ramp(double t);
double ramp_prime(double t);
/// Radial cutoff: 0 for r <= 0.3 (in particular for r < 1/4), 1 for r >= 1/2.
double eta(double r);
double eta_prime(double r);

struct Chart {
  std::string name;
  int dim = 0;
  std::vector<double> box_lo, box_hi;
  std::vector<bool> periodic;
  std::vector<int> shape;      // nodes per parameter axis (tensor layout)
  std::vector<int> nodes;      // grid node of each tensor slot, -1 if absent
  Eigen::MatrixXd param;       // parameters per tensor slot
  Eigen::MatrixXd jacobian;    // dy/dparam per slot, row-major d*d
  Eigen::VectorXd m;           // |det dy/dparam|^{1/2}
};

struct ChartAtlas {
  int d = 2;
  Chart interior_chart;
  std::vector<Chart> boundary_charts;
  /// Cutoffs per chart evaluated at every grid node; index 0 is the interior
  /// chart, 1.. the boundary charts.
  std::vector<Eigen::VectorXd> chi;
  std::vector<Eigen::VectorXd> chi_fat;
  int n_charts() const { return 1 + static_cast<int>(boundary_charts.size()); }
  const Chart& chart(int mu) const { return mu == 0 ? interior_chart : boundary_charts[mu - 1]; }
};

struct Grid {
  int d = 2;
  int n = 0;
  Eigen::MatrixXd y;            // n x d
  Eigen::VectorXd r;            // |y|
  Eigen::VectorXd w;            // volume quadrature
  std::vector<int> boundary;    // boundary node indices
  Eigen::VectorXd wb;           // boundary quadrature, aligned with boundary
  Eigen::MatrixXd normal;       // outward unit normal, aligned with boundary
  std::vector<char> on_boundary;
  std::vector<double> spacing;  // per chart axis (d=2: dtheta, dr)
  std::vector<int> owner;       // chart that differentiates the node
  std::shared_ptr<const PolarOps> polar;  // d = 2 only
};

/// The reference domain: atlas and grid are built together and immutable.
struct Geometry {
  ChartAtlas atlas;
  Grid grid;
  const PolarOps& polar() const;
  int n() const { return grid.n; }
  int d() const { return grid.d; }
};

struct TangentialBasis {
  std::vector<std::string> names;
  std::vector<VecField> fields;
  int n_rotations = 0;
};

std::shared_ptr<const Geometry> build_atlas(int d, int n_tangential, int n_radial);

TangentialBasis tangential_fields(const Geometry& geo);

/// Plain reference-coordinate gradient (n x d), chartwise.
VecField grad_y(const Geometry& geo, const ScalarField& f);

/// S f = S^a d_a f for a vector field S in Cartesian components.
ScalarField apply_tangential(const VecField& S, const ScalarField& f, const Geometry& geo);

/// Inverse chart map: parameters z of the point y in chart mu (0 = interior).
/// Returns false if y is outside the chart's parameter box.
bool chart_inverse(const Geometry& geo, int mu, const Eigen::VectorXd& y, Eigen::VectorXd& z);

/// Weighted quadrature helpers.
double integrate(const Geometry& geo, const ScalarField& f);
double integrate_boundary(const Geometry& geo, const ScalarField& f);
double l2_norm(const Geometry& geo, const ScalarField& f);
double l2_norm(const Geometry& geo, const VecField& f);

/// Throws UnsupportedDimension unless geo is two-dimensional.
void require_planar(const Geometry& geo, const char* what);

}  // namespace fbe
