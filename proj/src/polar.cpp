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
#include "fbe/polar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fbe/errors.hpp"

namespace fbe {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
constexpr int kStencil = 7;
}  // namespace

Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& a, bool inverse) {
  Eigen::MatrixXcd in = a, out(a.rows(), a.cols());
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    // Column-major storage: FFTW sees a cols x rows row-major array.
    p = fftw_plan_dft_2d(static_cast<int>(a.cols()), static_cast<int>(a.rows()),
                         reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()),
                         inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
  return out;
}

Eigen::MatrixXd fd_weights(double x0, const std::vector<double>& x, int order) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(order + 1, n);
  double c1 = 1.0, c4 = x[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

struct PolarOps::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  // banded derivative stencils on the diameter line
  std::vector<int> start;
  std::vector<double> w1;
};

PolarOps::PolarOps(int nt, int nr) : nt_(nt), nr_(nr) {
  if (nt < 8 || nr < kStencil || nt % 2 != 0)
    fail(ErrorKind::Configuration, "polar grid needs an even angular count >= 8 and >= 7 rings");
  dtheta_ = 2.0 * M_PI / nt;
  dr_ = 1.0 / (nr - 0.5);
  const int L = 2 * nr;
  line_.resize(L);
  for (int k = 0; k < L; ++k) line_[k] = k < nr ? -r(nr - 1 - k) : r(k - nr);
  d1_ = Eigen::MatrixXd::Zero(L, L);
  d2_ = Eigen::MatrixXd::Zero(L, L);
  plans_ = std::make_unique<Plans>();
  plans_->start.resize(L);
  plans_->w1.resize(static_cast<size_t>(L) * kStencil);
  for (int k = 0; k < L; ++k) {
    const int s0 = std::clamp(k - kStencil / 2, 0, L - kStencil);
    std::vector<double> xs(line_.begin() + s0, line_.begin() + s0 + kStencil);
    Eigen::MatrixXd c = fd_weights(line_[k], xs, 2);
    plans_->start[k] = s0;
    for (int q = 0; q < kStencil; ++q) {
      d1_(k, s0 + q) = c(1, q);
      d2_(k, s0 + q) = c(2, q);
      plans_->w1[static_cast<size_t>(k) * kStencil + q] = c(1, q);
    }
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<double> in(static_cast<size_t>(nt) * nr);
  std::vector<std::complex<double>> out(static_cast<size_t>(nt / 2 + 1) * nr);
  int n[1] = {nt};
  plans_->fwd = fftw_plan_many_dft_r2c(1, n, nr, in.data(), nullptr, 1, nt,
                                       reinterpret_cast<fftw_complex*>(out.data()), nullptr, 1,
                                       nt / 2 + 1, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->bwd = fftw_plan_many_dft_c2r(1, n, nr, reinterpret_cast<fftw_complex*>(out.data()),
                                       nullptr, 1, nt / 2 + 1, in.data(), nullptr, 1, nt,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
}

PolarOps::~PolarOps() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

Eigen::MatrixXcd PolarOps::ring_fft(const Eigen::VectorXd& f) const {
  Eigen::MatrixXcd c(nt_ / 2 + 1, nr_);
  Eigen::VectorXd in = f;
  fftw_execute_dft_r2c(plans_->fwd, in.data(), reinterpret_cast<fftw_complex*>(c.data()));
  return c;
}

Eigen::VectorXd PolarOps::ring_ifft(const Eigen::MatrixXcd& c) const {
  Eigen::MatrixXcd tmp = c;  // c2r destroys its input
  Eigen::VectorXd out(size());
  fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(tmp.data()), out.data());
  return out / static_cast<double>(nt_);
}

Eigen::VectorXd PolarOps::theta_multiplier(const Eigen::VectorXd& f,
                                           const std::vector<std::complex<double>>& m) const {
  Eigen::MatrixXcd c = ring_fft(f);
  for (int j = 0; j < nr_; ++j)
    for (int k = 0; k <= nt_ / 2; ++k) c(k, j) *= m[k];
  return ring_ifft(c);
}

Eigen::VectorXd PolarOps::d_theta(const Eigen::VectorXd& f) const {
  std::vector<std::complex<double>> m(nt_ / 2 + 1);
  for (int k = 0; k < nt_ / 2; ++k) m[k] = {0.0, static_cast<double>(k)};
  m[nt_ / 2] = 0.0;  // the Nyquist mode has no consistent derivative
  return theta_multiplier(f, m);
}

Eigen::VectorXd PolarOps::d_r(const Eigen::VectorXd& f) const {
  const int L = 2 * nr_;
  Eigen::VectorXd out(size());
  std::vector<double> g(L), d(L);
  for (int i = 0; i < nt_ / 2; ++i) {
    const int ip = i + nt_ / 2;
    for (int k = 0; k < nr_; ++k) g[k] = f[index(ip, nr_ - 1 - k)];
    for (int k = nr_; k < L; ++k) g[k] = f[index(i, k - nr_)];
    for (int k = 0; k < L; ++k) {
      const double* w = &plans_->w1[static_cast<size_t>(k) * kStencil];
      const int s0 = plans_->start[k];
      double acc = 0.0;
      for (int q = 0; q < kStencil; ++q) acc += w[q] * g[s0 + q];
      d[k] = acc;
    }
    for (int j = 0; j < nr_; ++j) {
      out[index(i, j)] = d[nr_ + j];
      out[index(ip, j)] = -d[nr_ - 1 - j];
    }
  }
  return out;
}

Eigen::MatrixXd PolarOps::grad(const Eigen::VectorXd& f) const {
  const Eigen::VectorXd fr = d_r(f), ft = d_theta(f);
  Eigen::MatrixXd g(size(), 2);
  for (int j = 0; j < nr_; ++j) {
    const double rj = r(j);
    for (int i = 0; i < nt_; ++i) {
      const int n = index(i, j);
      const double c = std::cos(theta(i)), s = std::sin(theta(i));
      g(n, 0) = c * fr[n] - s / rj * ft[n];
      g(n, 1) = s * fr[n] + c / rj * ft[n];
    }
  }
  return g;
}

Eigen::VectorXd PolarOps::interpolate(const Eigen::VectorXd& f, const Eigen::MatrixXd& pts) const {
  const Eigen::MatrixXcd c = ring_fft(f) / static_cast<double>(nt_);
  const int L = 2 * nr_;
  constexpr int kInterp = 6;
  Eigen::VectorXd out(pts.rows());
  std::vector<std::complex<double>> ck(nt_ / 2 + 1);
  for (int p = 0; p < pts.rows(); ++p) {
    const double rr = std::min(std::hypot(pts(p, 0), pts(p, 1)), 1.0);
    const double th = std::atan2(pts(p, 1), pts(p, 0));
    const int pos = static_cast<int>(std::lower_bound(line_.begin(), line_.end(), rr) - line_.begin());
    const int s0 = std::clamp(pos - kInterp / 2, 0, L - kInterp);
    std::vector<double> xs(line_.begin() + s0, line_.begin() + s0 + kInterp);
    const Eigen::MatrixXd w = fd_weights(rr, xs, 0);
    std::fill(ck.begin(), ck.end(), std::complex<double>(0.0, 0.0));
    for (int q = 0; q < kInterp; ++q) {
      const int k = s0 + q;
      const bool neg = k < nr_;
      const int j = neg ? nr_ - 1 - k : k - nr_;
      for (int m = 0; m <= nt_ / 2; ++m) {
        const double parity = (neg && (m % 2 == 1)) ? -1.0 : 1.0;
        ck[m] += w(0, q) * parity * c(m, j);
      }
    }
    double acc = ck[0].real();
    for (int m = 1; m <= nt_ / 2; ++m) {
      const double wm = (m == nt_ / 2) ? 1.0 : 2.0;
      acc += wm * (ck[m] * std::exp(std::complex<double>(0.0, m * th))).real();
    }
    out[p] = acc;
  }
  return out;
}

}  // namespace fbe
