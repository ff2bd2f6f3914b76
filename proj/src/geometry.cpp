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
#include "fbe/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fbe/errors.hpp"

namespace fbe {

double ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double ramp_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double eta(double r) { return ramp((r - 0.3) / 0.2); }
double eta_prime(double r) { return ramp_prime((r - 0.3) / 0.2) / 0.2; }

const PolarOps& Geometry::polar() const {
  if (!grid.polar) fail(ErrorKind::UnsupportedDimension, "polar operators exist only for d=2");
  return *grid.polar;
}

void require_planar(const Geometry& geo, const char* what) {
  if (geo.d() != 2)
    fail(ErrorKind::UnsupportedDimension, std::string(what) + " is implemented for d=2 only");
}

namespace {

double fat_outer(double r) { return ramp((r - 0.125) / 0.125); }
double fat_inner(double r) { return 1.0 - ramp((r - 0.5) / 0.125); }

void build_planar(Geometry& geo, int nt, int nr) {
  auto ops = std::make_shared<PolarOps>(nt, nr);
  Grid& g = geo.grid;
  g.d = 2;
  g.n = nt * nr;
  g.polar = ops;
  g.y.resize(g.n, 2);
  g.r.resize(g.n);
  g.w.resize(g.n);
  g.on_boundary.assign(g.n, 0);
  g.owner.assign(g.n, 1);
  g.spacing = {ops->dtheta(), ops->dr()};
  for (int j = 0; j < nr; ++j) {
    const double rj = ops->r(j);
    // Cell areas: the boundary ring owns the half annulus (1 - dr/2, 1).
    const double half = (j == nr - 1) ? 0.5 * (1.0 - 0.25 * ops->dr()) : 1.0;
    for (int i = 0; i < nt; ++i) {
      const int n = ops->index(i, j);
      g.y(n, 0) = rj * std::cos(ops->theta(i));
      g.y(n, 1) = rj * std::sin(ops->theta(i));
      g.r[n] = rj;
      g.w[n] = ops->dtheta() * ops->dr() * half * rj;
      if (rj < 0.25) g.owner[n] = 0;
    }
  }
  g.boundary.resize(nt);
  g.wb = Eigen::VectorXd::Constant(nt, ops->dtheta());
  g.normal.resize(nt, 2);
  for (int i = 0; i < nt; ++i) {
    const int n = ops->index(i, nr - 1);
    g.boundary[i] = n;
    g.on_boundary[n] = 1;
    g.normal(i, 0) = std::cos(ops->theta(i));
    g.normal(i, 1) = std::sin(ops->theta(i));
  }

  ChartAtlas& a = geo.atlas;
  a.d = 2;
  // Boundary chart: z = (phi, r) with y = r (cos phi, -sin phi).  The angle
  // runs clockwise so that the chart is orientation preserving.
  Chart b;
  b.name = "collar";
  b.dim = 2;
  b.box_lo = {0.0, 0.0};
  b.box_hi = {2.0 * M_PI, 1.0};
  b.periodic = {true, false};
  b.shape = {nt, nr};
  b.nodes.resize(g.n);
  b.param.resize(g.n, 2);
  b.jacobian.resize(g.n, 4);
  b.m.resize(g.n);
  for (int n = 0; n < g.n; ++n) {
    b.nodes[n] = n;
    const double th = std::atan2(g.y(n, 1), g.y(n, 0));
    double phi = std::fmod(-th + 4.0 * M_PI, 2.0 * M_PI);
    const double rr = g.r[n];
    b.param(n, 0) = phi;
    b.param(n, 1) = rr;
    const double c = std::cos(phi), s = std::sin(phi);
    // dy/dphi = r(-sin, -cos), dy/dr = (cos, -sin)
    b.jacobian(n, 0) = -rr * s;
    b.jacobian(n, 1) = c;
    b.jacobian(n, 2) = -rr * c;
    b.jacobian(n, 3) = -s;
    b.m[n] = std::sqrt(rr);
  }
  a.boundary_charts = {b};

  Chart in;
  in.name = "interior";
  in.dim = 2;
  in.box_lo = {-0.75, -0.75};
  in.box_hi = {0.75, 0.75};
  in.periodic = {false, false};
  for (int n = 0; n < g.n; ++n)
    if (g.r[n] < 0.75) in.nodes.push_back(n);
  in.shape = {static_cast<int>(in.nodes.size())};
  in.param.resize(in.nodes.size(), 2);
  in.jacobian.resize(in.nodes.size(), 4);
  in.m = Eigen::VectorXd::Ones(in.nodes.size());
  for (size_t k = 0; k < in.nodes.size(); ++k) {
    in.param.row(k) = g.y.row(in.nodes[k]);
    in.jacobian.row(k) << 1.0, 0.0, 0.0, 1.0;
  }
  a.interior_chart = in;

  a.chi.assign(2, Eigen::VectorXd(g.n));
  a.chi_fat.assign(2, Eigen::VectorXd(g.n));
  for (int n = 0; n < g.n; ++n) {
    const double e = eta(g.r[n]);
    a.chi[1][n] = e;
    a.chi[0][n] = std::sqrt(std::max(0.0, 1.0 - e * e));
    a.chi_fat[1][n] = fat_outer(g.r[n]);
    a.chi_fat[0][n] = fat_inner(g.r[n]);
  }
}

// ---- d = 3: six gnomonic panels x radius, plus a Cartesian core ----------

struct Panel {
  Eigen::Vector3d n, e1, e2;
};

const std::array<Panel, 6>& panels() {
  static const std::array<Panel, 6> p = {{
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
      {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},
      {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},
      {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}},
  }};
  return p;
}

constexpr double kPanelBox = 1.5;     // fattened gnomonic parameter box (-L, L)
constexpr double kBumpEdge = 1.35;    // chi support edge in gnomonic units
constexpr double kFatEdge = 1.45;     // fattened cutoff support edge

double panel_bump(double s) { return ramp((kBumpEdge - std::abs(s)) / (kBumpEdge - 1.0)); }
double panel_fat(double s) { return ramp((kFatEdge - std::abs(s)) / (kFatEdge - kBumpEdge)); }

// Sphere-panel weights b_mu(u) for a unit vector u; returns false if u is not
// in the open hemisphere of the panel.
void panel_coords(int mu, const Eigen::Vector3d& u, double& al, double& be, bool& ok) {
  const Panel& p = panels()[mu];
  const double un = u.dot(p.n);
  ok = un > 1e-12;
  if (!ok) return;
  al = u.dot(p.e1) / un;
  be = u.dot(p.e2) / un;
}

void sphere_cutoffs(const Eigen::Vector3d& y, std::array<double, 7>& chi, std::array<double, 7>& fat) {
  const double rr = y.norm();
  const Eigen::Vector3d u = rr > 0 ? Eigen::Vector3d(y / rr) : Eigen::Vector3d(0, 0, 1);
  std::array<double, 6> b{}, bf{};
  double sum = 0.0;
  for (int mu = 0; mu < 6; ++mu) {
    double al = 0, be = 0;
    bool ok = false;
    panel_coords(mu, u, al, be, ok);
    b[mu] = ok ? panel_bump(al) * panel_bump(be) : 0.0;
    bf[mu] = ok ? panel_fat(al) * panel_fat(be) : 0.0;
    sum += b[mu] * b[mu];
  }
  const double e = eta(rr);
  chi[0] = std::sqrt(std::max(0.0, 1.0 - e * e));
  fat[0] = fat_inner(rr);
  for (int mu = 0; mu < 6; ++mu) {
    chi[mu + 1] = e * b[mu] / std::sqrt(sum);
    fat[mu + 1] = fat_outer(rr) * bf[mu];
  }
}

void build_ball(Geometry& geo, int nt, int nr) {
  Grid& g = geo.grid;
  ChartAtlas& a = geo.atlas;
  g.d = 3;
  a.d = 3;
  const double dr = 1.0 / (nr - 0.5);
  const double da = 2.0 / nt;
  const int nbox = static_cast<int>(std::lround(2.0 * kPanelBox / da));
  const double da_box = 2.0 * kPanelBox / nbox;
  std::vector<double> radii;
  std::vector<double> rweight;
  for (int j = 0; j < nr; ++j) {
    const double rj = (j + 0.5) * dr;
    if (rj <= 0.25 - 2.0 * dr) continue;
    radii.push_back(rj);
    rweight.push_back(j == nr - 1 ? 0.5 * dr : dr);
  }
  // Cartesian core with spacing dr.
  const int ni = 2 * static_cast<int>(std::ceil(0.97 / dr));
  const double hc = 2.0 * 0.97 / ni;

  std::vector<Eigen::Vector3d> pts;
  std::vector<double> wts;
  std::vector<int> owner;

  Chart core;
  core.name = "interior";
  core.dim = 3;
  core.box_lo = {-0.97, -0.97, -0.97};
  core.box_hi = {0.97, 0.97, 0.97};
  core.periodic = {false, false, false};
  core.shape = {ni, ni, ni};
  core.nodes.assign(static_cast<size_t>(ni) * ni * ni, -1);
  core.param.resize(core.nodes.size(), 3);
  core.jacobian.resize(core.nodes.size(), 9);
  core.m = Eigen::VectorXd::Ones(core.nodes.size());
  for (int k = 0; k < ni; ++k)
    for (int jj = 0; jj < ni; ++jj)
      for (int i = 0; i < ni; ++i) {
        const size_t slot = (static_cast<size_t>(k) * ni + jj) * ni + i;
        Eigen::Vector3d y(-0.97 + (i + 0.5) * hc, -0.97 + (jj + 0.5) * hc, -0.97 + (k + 0.5) * hc);
        core.param.row(slot) = y.transpose();
        core.jacobian.row(slot) << 1, 0, 0, 0, 1, 0, 0, 0, 1;
        if (y.norm() >= 0.97) continue;
        std::array<double, 7> chi{}, fat{};
        sphere_cutoffs(y, chi, fat);
        core.nodes[slot] = static_cast<int>(pts.size());
        pts.push_back(y);
        wts.push_back(chi[0] * chi[0] * hc * hc * hc);
        owner.push_back(0);
      }
  a.interior_chart = core;

  std::vector<int> bnodes;
  std::vector<double> bw;
  for (int mu = 0; mu < 6; ++mu) {
    const Panel& p = panels()[mu];
    Chart c;
    c.name = "panel" + std::to_string(mu);
    c.dim = 3;
    c.box_lo = {-kPanelBox, -kPanelBox, radii.front()};
    c.box_hi = {kPanelBox, kPanelBox, 1.0};
    c.periodic = {false, false, false};
    const int nrad = static_cast<int>(radii.size());
    c.shape = {nbox, nbox, nrad};
    const size_t slots = static_cast<size_t>(nbox) * nbox * nrad;
    c.nodes.assign(slots, -1);
    c.param.resize(slots, 3);
    c.jacobian.resize(slots, 9);
    c.m.resize(slots);
    for (int k = 0; k < nrad; ++k)
      for (int jb = 0; jb < nbox; ++jb)
        for (int ia = 0; ia < nbox; ++ia) {
          const size_t slot = (static_cast<size_t>(k) * nbox + jb) * nbox + ia;
          const double al = -kPanelBox + (ia + 0.5) * da_box;
          const double be = -kPanelBox + (jb + 0.5) * da_box;
          const double rr = radii[k];
          const Eigen::Vector3d P = p.n + al * p.e1 + be * p.e2;
          const double pn = P.norm();
          const Eigen::Vector3d u = P / pn;
          const Eigen::Vector3d ya = rr * (p.e1 - u * (u.dot(p.e1))) / pn;
          const Eigen::Vector3d yb = rr * (p.e2 - u * (u.dot(p.e2))) / pn;
          Eigen::Matrix3d J;
          J.col(0) = ya;
          J.col(1) = yb;
          J.col(2) = u;
          c.param.row(slot) << al, be, rr;
          for (int q = 0; q < 9; ++q) c.jacobian(slot, q) = J(q / 3, q % 3);
          const double det = J.determinant();
          c.m[slot] = std::sqrt(std::abs(det));
          const Eigen::Vector3d y = rr * u;
          std::array<double, 7> chi{}, fat{};
          sphere_cutoffs(y, chi, fat);
          c.nodes[slot] = static_cast<int>(pts.size());
          pts.push_back(y);
          const double area = da_box * da_box / std::pow(1.0 + al * al + be * be, 1.5);
          wts.push_back(chi[mu + 1] * chi[mu + 1] * rr * rr * rweight[k] * area);
          owner.push_back(mu + 1);
          if (k == nrad - 1) {
            bnodes.push_back(c.nodes[slot]);
            const double bchi = chi[mu + 1] / std::max(eta(rr), 1e-300);
            bw.push_back(bchi * bchi * area);
          }
        }
    a.boundary_charts.push_back(c);
  }

  g.n = static_cast<int>(pts.size());
  g.y.resize(g.n, 3);
  g.r.resize(g.n);
  g.w.resize(g.n);
  for (int n = 0; n < g.n; ++n) {
    g.y.row(n) = pts[n].transpose();
    g.r[n] = pts[n].norm();
    g.w[n] = wts[n];
  }
  g.owner = owner;
  g.on_boundary.assign(g.n, 0);
  g.boundary = bnodes;
  g.wb.resize(bnodes.size());
  g.normal.resize(bnodes.size(), 3);
  for (size_t k = 0; k < bnodes.size(); ++k) {
    g.on_boundary[bnodes[k]] = 1;
    g.wb[k] = bw[k];
    g.normal.row(k) = g.y.row(bnodes[k]) / g.r[bnodes[k]];
  }
  g.spacing = {da_box, da_box, dr, hc};

  a.chi.assign(7, Eigen::VectorXd(g.n));
  a.chi_fat.assign(7, Eigen::VectorXd(g.n));
  for (int n = 0; n < g.n; ++n) {
    std::array<double, 7> chi{}, fat{};
    sphere_cutoffs(pts[n], chi, fat);
    for (int mu = 0; mu < 7; ++mu) {
      a.chi[mu][n] = chi[mu];
      a.chi_fat[mu][n] = fat[mu];
    }
  }
}

// Derivative along one tensor axis of a chart using the contiguous run of
// present slots around each node (fourth order where the run allows).
void axis_derivative(const Chart& c, int axis, double h, const ScalarField& f,
                     std::vector<double>& out) {
  const int dim = c.dim;
  std::vector<int> stride(dim, 1);
  for (int k = 1; k < dim; ++k) stride[k] = stride[k - 1] * c.shape[k - 1];
  const int len = c.shape[axis];
  out.assign(c.nodes.size(), 0.0);
  std::vector<int> idx(dim, 0);
  for (size_t slot = 0; slot < c.nodes.size(); ++slot) {
    if (c.nodes[slot] < 0) continue;
    size_t rem = slot;
    for (int k = 0; k < dim; ++k) {
      idx[k] = static_cast<int>(rem % c.shape[k]);
      rem /= c.shape[k];
    }
    const int p = idx[axis];
    const size_t base = slot - static_cast<size_t>(p) * stride[axis];
    int lo = p, hi = p;
    while (lo > 0 && c.nodes[base + static_cast<size_t>(lo - 1) * stride[axis]] >= 0 && p - lo < 4) --lo;
    while (hi < len - 1 && c.nodes[base + static_cast<size_t>(hi + 1) * stride[axis]] >= 0 && hi - p < 4) ++hi;
    int s0 = std::max(lo, p - 2), s1 = std::min(hi, p + 2);
    while (s1 - s0 < 4 && (s0 > lo || s1 < hi)) {
      if (s0 > lo) --s0;
      if (s1 - s0 < 4 && s1 < hi) ++s1;
    }
    if (s1 == s0) continue;
    std::vector<double> xs;
    for (int q = s0; q <= s1; ++q) xs.push_back((q - p) * h);
    const Eigen::MatrixXd wgt = fd_weights(0.0, xs, 1);
    double acc = 0.0;
    for (int q = s0; q <= s1; ++q)
      acc += wgt(1, q - s0) * f[c.nodes[base + static_cast<size_t>(q) * stride[axis]]];
    out[slot] = acc;
  }
}

VecField grad_ball(const Geometry& geo, const ScalarField& f) {
  const Grid& g = geo.grid;
  VecField out = VecField::Zero(g.n, 3);
  for (int mu = 0; mu < geo.atlas.n_charts(); ++mu) {
    const Chart& c = geo.atlas.chart(mu);
    std::array<std::vector<double>, 3> dp;
    for (int axis = 0; axis < 3; ++axis) {
      double h;
      if (mu == 0) {
        h = g.spacing[3];
      } else {
        h = axis < 2 ? g.spacing[0] : g.spacing[2];
      }
      axis_derivative(c, axis, h, f, dp[axis]);
    }
    for (size_t slot = 0; slot < c.nodes.size(); ++slot) {
      const int n = c.nodes[slot];
      if (n < 0 || g.owner[n] != mu) continue;
      Eigen::Matrix3d J;
      for (int q = 0; q < 9; ++q) J(q / 3, q % 3) = c.jacobian(slot, q);
      const Eigen::Vector3d gp(dp[0][slot], dp[1][slot], dp[2][slot]);
      out.row(n) = J.transpose().fullPivLu().solve(gp).transpose();
    }
  }
  return out;
}

}  // namespace

std::shared_ptr<const Geometry> build_atlas(int d, int n_tangential, int n_radial) {
  if (d != 2 && d != 3) fail(ErrorKind::UnsupportedDimension, "dimension must be 2 or 3");
  if (n_tangential < 8 || n_radial < 8)
    fail(ErrorKind::Configuration, "node counts must be at least 8 per axis");
  auto geo = std::make_shared<Geometry>();
  if (d == 2) {
    if (n_tangential % 2 != 0)
      fail(ErrorKind::Configuration, "angular node count must be even");
    build_planar(*geo, n_tangential, n_radial);
  } else {
    build_ball(*geo, n_tangential, n_radial);
  }
  return geo;
}

TangentialBasis tangential_fields(const Geometry& geo) {
  const Grid& g = geo.grid;
  const int d = g.d;
  TangentialBasis tb;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      VecField S = VecField::Zero(g.n, d);
      for (int n = 0; n < g.n; ++n) {
        const double e = eta(g.r[n]);
        S(n, b) = e * g.y(n, a);
        S(n, a) = -e * g.y(n, b);
      }
      tb.names.push_back("eta*Omega_" + std::to_string(a + 1) + std::to_string(b + 1));
      tb.fields.push_back(S);
    }
  tb.n_rotations = static_cast<int>(tb.fields.size());
  for (int a = 0; a < d; ++a) {
    VecField S = VecField::Zero(g.n, d);
    for (int n = 0; n < g.n; ++n) S(n, a) = 1.0 - eta(g.r[n]);
    tb.names.push_back("(1-eta)*d_" + std::to_string(a + 1));
    tb.fields.push_back(S);
  }
  return tb;
}

VecField grad_y(const Geometry& geo, const ScalarField& f) {
  if (geo.d() == 2) return geo.polar().grad(f);
  return grad_ball(geo, f);
}

ScalarField apply_tangential(const VecField& S, const ScalarField& f, const Geometry& geo) {
  const VecField g = grad_y(geo, f);
  return (S.array() * g.array()).rowwise().sum();
}

bool chart_inverse(const Geometry& geo, int mu, const Eigen::VectorXd& y, Eigen::VectorXd& z) {
  const Chart& c = geo.atlas.chart(mu);
  const int d = geo.d();
  z.resize(d);
  if (mu == 0) {
    z = y;
  } else if (d == 2) {
    z[0] = std::fmod(-std::atan2(y[1], y[0]) + 4.0 * M_PI, 2.0 * M_PI);
    z[1] = y.norm();
  } else {
    const Eigen::Vector3d yy(y[0], y[1], y[2]);
    const double rr = yy.norm();
    if (rr == 0.0) return false;
    bool ok = false;
    double al = 0, be = 0;
    panel_coords(mu - 1, yy / rr, al, be, ok);
    if (!ok) return false;
    z << al, be, rr;
  }
  for (int k = 0; k < d; ++k) {
    if (c.periodic[k]) continue;
    if (z[k] < c.box_lo[k] - 1e-12 || z[k] > c.box_hi[k] + 1e-12) return false;
  }
  return true;
}

double integrate(const Geometry& geo, const ScalarField& f) { return geo.grid.w.dot(f); }

double integrate_boundary(const Geometry& geo, const ScalarField& f) {
  double s = 0.0;
  for (size_t k = 0; k < geo.grid.boundary.size(); ++k) s += geo.grid.wb[k] * f[geo.grid.boundary[k]];
  return s;
}

double l2_norm(const Geometry& geo, const ScalarField& f) {
  return std::sqrt(geo.grid.w.dot(f.cwiseAbs2()));
}

double l2_norm(const Geometry& geo, const VecField& f) {
  return std::sqrt(geo.grid.w.dot(f.rowwise().squaredNorm()));
}

}  // namespace fbe
