/*
 * Copyright (c) The shearlet toolkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "fft.hpp"

namespace shearlet {

// ---- Meyer-type windows ----

inline double nu(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  return x * x * x * x * (35 - 84 * x + 70 * x * x - 20 * x * x * x);
}

struct WindowSpec {
  double (*ramp)(double) = nu;

  double w0(double xi) const {
    double a = std::abs(xi);
    if (a <= 0.25) return 1;
    if (a <= 1) return std::cos(0.5 * kPi * ramp(4.0 / 3.0 * a - 1.0 / 3.0));
    return 0;
  }
  double w(double xi) const {
    double a = std::abs(xi);
    if (a < 0.25) return 0;
    if (a <= 1) return std::sin(0.5 * kPi * ramp(4.0 / 3.0 * a - 1.0 / 3.0));
    if (a <= 4) return std::cos(0.5 * kPi * ramp(a / 3.0 - 1.0 / 3.0));
    return 0;
  }
  // sqrt(nu(1+xi) + nu(1-xi)) with nu taken as zero off [0,1): only one
  // term survives on each side of 0
  double v(double xi) const {
    double a = std::abs(xi);
    if (a >= 1) return 0;
    return std::sqrt(ramp(1 - a));
  }
  double v0(double) const { return 1; }
};

enum class Window { W0, W, V, V0 };

inline double window_values(const WindowSpec& s, Window which, double xi) {
  switch (which) {
    case Window::W0: return s.w0(xi);
    case Window::W: return s.w(xi);
    case Window::V: return s.v(xi);
    case Window::V0: return s.v0(xi);
  }
  return 0;
}

// ---- subband layout ----

// phase of the band coefficients: relative to the band's first grid index,
// or absolute in the grid indices
enum class BandPhase { relative, absolute };

struct FdstBand {
  int cone = 0;  // 1, 2: scaling on sector 1/2; 11, 12, 21, 22: shearlet cones
  int j = 0, k = 0;
  int sector = 0, sign = 1;  // grid sector and sign of the radial index
  int rad_start = 0, rows = 0;  // |n| = rad_start + t1, t1 < rows (L1)
  int ang_start = 0, cols = 0;  // l = ang_start + t2, t2 < cols (L2)
  std::size_t offset = 0;
  RVec rad_win, ang_win;  // window factors along each axis
  bool scaling() const { return cone < 10; }
  std::size_t count() const { return std::size_t(rows) * cols; }
};

inline int ceil_log4(double x) {
  int e = 0;
  double p = 1;
  while (p < x) {
    p *= 4;
    ++e;
  }
  return e;
}

class SubbandLayout {
 public:
  SubbandLayout(const PPGridParams& p, BandPhase phase = BandPhase::relative, WindowSpec spec = {})
      : p_(p), phase_(phase), spec_(spec) {
    p.validate();
    if (p.n < 4 || !is_pow2(p.n)) throw std::invalid_argument("FDST needs N a power of two, N >= 4");
    long half_r = p.r / 2;
    long q = 1;
    while (q < half_r) q *= 4;
    if (q != half_r) throw std::invalid_argument("FDST layout needs R/2 a power of four (R = 2, 8, 32, ...)");
    jl_ = -ceil_log4(p.r / 2.0);
    jh_ = ceil_log4(p.n);
    build();
  }

  const PPGridParams& params() const { return p_; }
  int jl() const { return jl_; }
  int jh() const { return jh_; }
  BandPhase phase() const { return phase_; }
  const WindowSpec& spec() const { return spec_; }
  const std::vector<FdstBand>& bands() const { return bands_; }
  std::size_t total() const { return total_; }
  double redundancy() const { return double(total_) / (double(p_.n) * p_.n); }

  // 4^j * R/2 as a double (exact for the allowed R)
  double quarter_scale(int j) const { return std::ldexp(p_.r / 2.0, 2 * j); }

  int find(int cone, int j, int k) const {
    for (std::size_t b = 0; b < bands_.size(); ++b)
      if (bands_[b].cone == cone && bands_[b].j == j && bands_[b].k == k) return int(b);
    return -1;
  }

  // C(omega): 1 off the seams, 1/sqrt 2 on seams, 1/sqrt(2(N+1)) at the center
  double cnorm(int n, int l) const { return 1.0 / std::sqrt(double(multiplicity(p_, n, l))); }

 private:
  void build() {
    int n = p_.n, half = p_.half_rows();
    std::size_t off = 0;
    for (int s = 1; s <= 2; ++s) {
      FdstBand b;
      b.cone = s;
      b.j = jl_;
      b.sector = s;
      b.rad_start = -1;
      b.rows = 3;
      b.ang_start = -n / 2;
      b.cols = n + 1;
      b.offset = off;
      for (int t = -1; t <= 1; ++t) b.rad_win.push_back(spec_.w0(std::ldexp(2.0 * std::abs(t) / p_.r, -2 * jl_)));
      b.ang_win.assign(n + 1, 1.0);
      off += b.count();
      bands_.push_back(std::move(b));
    }
    for (int cone : {11, 12, 21, 22}) {
      for (int j = jl_; j <= jh_; ++j) {
        int kmax = j < 0 ? 0 : (1 << j);
        for (int k = -kmax; k <= kmax; ++k) {
          FdstBand b;
          b.cone = cone;
          b.j = j;
          b.k = k;
          b.sector = cone / 10;
          b.sign = cone % 10 == 1 ? 1 : -1;
          if (j == jl_) {
            b.rad_start = 1;
            b.rows = int(quarter_scale(j + 1));
          } else {
            b.rad_start = int(quarter_scale(j - 1));
            b.rows = j == jh_ ? half - b.rad_start + 1 : int(quarter_scale(j - 1)) * 15 + 1;
          }
          if (j < 0) {
            b.ang_start = -n / 2;
            b.cols = n + 1;
          } else {
            int w = n >> (j + 1);  // 2^{-j-1} N
            if (k == kmax) {
              b.ang_start = w * (k - 1);
              b.cols = w + 1;
            } else if (k == -kmax) {
              b.ang_start = -n / 2;
              b.cols = w + 1;
            } else {
              b.ang_start = w * (k - 1);
              b.cols = 2 * w + 1;
            }
          }
          b.offset = off;
          b.rad_win.resize(b.rows);
          for (int t = 0; t < b.rows; ++t) {
            int rho = b.rad_start + t;
            b.rad_win[t] = rho <= half ? spec_.w(std::ldexp(2.0 * rho / p_.r, -2 * j)) : 0.0;
          }
          b.ang_win.resize(b.cols);
          for (int t = 0; t < b.cols; ++t) {
            int l = b.ang_start + t;
            b.ang_win[t] = j < 0 ? spec_.v0(0) : spec_.v(k - std::ldexp(double(l), j + 1) / n);
          }
          off += b.count();
          bands_.push_back(std::move(b));
        }
      }
    }
    total_ = off;
  }

  PPGridParams p_;
  BandPhase phase_;
  WindowSpec spec_;
  int jl_ = 0, jh_ = 0;
  std::vector<FdstBand> bands_;
  std::size_t total_ = 0;
};

namespace detail {

inline std::pair<CVec, CVec> band_phases(const SubbandLayout& lay, const FdstBand& b) {
  CVec pr(b.rows, 1.0), pc(b.cols, 1.0);
  if (b.scaling()) {
    // centered indices n = -1..1, l = -N/2..N/2
    for (int r = 0; r < b.rows; ++r) pr[r] = turn(double((r - 1) * b.rad_start) / b.rows);
    for (int c = 0; c < b.cols; ++c) pc[c] = turn(double(long(c - b.cols / 2) * b.ang_start) / b.cols);
  } else if (lay.phase() == BandPhase::absolute) {
    for (int r = 0; r < b.rows; ++r) pr[r] = turn(double(long(r) * b.rad_start) / b.rows);
    for (int c = 0; c < b.cols; ++c) pc[c] = turn(double(long(c) * b.ang_start) / b.cols);
  }
  return {pr, pc};
}

// output frequency index of the DFT row/col r, as stored
inline int freq_pos(const FdstBand& b, int r, bool row) {
  if (!b.scaling()) return r;
  int len = row ? b.rows : b.cols;
  return ((r - len / 2) % len + len) % len;
}

}  // namespace detail

// Analysis: coefficients c = <J, sigma> with the sum over all stored entries.
inline CVec window_apply(const PPArray& a, const SubbandLayout& lay) {
  const auto& p = lay.params();
  if (!(a.params == p)) throw std::invalid_argument("array does not match layout");
  CVec out(lay.total());
  CVec buf;
  for (const auto& b : lay.bands()) {
    buf.assign(b.count(), 0.0);
    const CVec& sec = a.sector(b.sector);
    for (int t1 = 0; t1 < b.rows; ++t1) {
      int n = b.scaling() ? b.rad_start + t1 : b.sign * (b.rad_start + t1);
      if (std::abs(n) > p.half_rows() || b.rad_win[t1] == 0) continue;
      for (int t2 = 0; t2 < b.cols; ++t2) {
        int l = b.ang_start + t2;
        buf[std::size_t(t1) * b.cols + t2] = sec[p.index(n, l)] * (b.rad_win[t1] * b.ang_win[t2] * lay.cnorm(n, l));
      }
    }
    fft2_inplace(buf.data(), b.rows, b.cols, FFTW_FORWARD);
    auto [pr, pc] = detail::band_phases(lay, b);
    double norm = 1.0 / std::sqrt(double(b.count()));
    for (int r1 = 0; r1 < b.rows; ++r1)
      for (int r2 = 0; r2 < b.cols; ++r2) {
        int f1 = detail::freq_pos(b, r1, true), f2 = detail::freq_pos(b, r2, false);
        out[b.offset + std::size_t(r1) * b.cols + r2] = buf[std::size_t(f1) * b.cols + f2] * pr[r1] * pc[r2] * norm;
      }
  }
  return out;
}

// Plain conjugate transpose of window_apply (sum over stored entries).
inline PPArray window_adjoint_stored(const CVec& c, const SubbandLayout& lay) {
  const auto& p = lay.params();
  if (c.size() != lay.total()) throw std::invalid_argument("coefficient count does not match layout");
  PPArray out(p);
  CVec buf;
  for (const auto& b : lay.bands()) {
    buf.assign(b.count(), 0.0);
    auto [pr, pc] = detail::band_phases(lay, b);
    double norm = 1.0 / std::sqrt(double(b.count()));
    for (int r1 = 0; r1 < b.rows; ++r1)
      for (int r2 = 0; r2 < b.cols; ++r2) {
        int f1 = detail::freq_pos(b, r1, true), f2 = detail::freq_pos(b, r2, false);
        buf[std::size_t(f1) * b.cols + f2] =
            c[b.offset + std::size_t(r1) * b.cols + r2] * std::conj(pr[r1] * pc[r2]) * norm;
      }
    fft2_inplace(buf.data(), b.rows, b.cols, FFTW_BACKWARD);
    CVec& sec = out.sector(b.sector);
    for (int t1 = 0; t1 < b.rows; ++t1) {
      int n = b.scaling() ? b.rad_start + t1 : b.sign * (b.rad_start + t1);
      if (std::abs(n) > p.half_rows() || b.rad_win[t1] == 0) continue;
      for (int t2 = 0; t2 < b.cols; ++t2) {
        int l = b.ang_start + t2;
        sec[p.index(n, l)] += buf[std::size_t(t1) * b.cols + t2] * (b.rad_win[t1] * b.ang_win[t2] * lay.cnorm(n, l));
      }
    }
  }
  return out;
}

// Adjoint with respect to the grid inner product that counts each distinct
// point once; window_adjoint(window_apply(J)) = J for every stored array.
inline PPArray window_adjoint(const CVec& c, const SubbandLayout& lay) {
  auto out = window_adjoint_stored(c, lay);
  const auto& p = lay.params();
  for (int s = 1; s <= 2; ++s)
    for (int n = -p.half_rows(); n <= p.half_rows(); ++n)
      for (int l = -p.n / 2; l <= p.n / 2; ++l) out.at(s, n, l) *= double(multiplicity(p, n, l));
  return out;
}

// One analyzing element sigma (or phi for scaling bands) at position (r1, r2),
// evaluated at every stored index; coefficients are dot(J, sigma) over stored entries.
inline PPArray shearlet_values(const SubbandLayout& lay, int band, int r1, int r2) {
  const auto& p = lay.params();
  const auto& b = lay.bands().at(band);
  if (r1 < 0 || r1 >= b.rows || r2 < 0 || r2 >= b.cols) throw std::out_of_range("position outside band");
  PPArray out(p);
  double norm = 1.0 / std::sqrt(double(b.count()));
  for (int t1 = 0; t1 < b.rows; ++t1) {
    int n = b.scaling() ? b.rad_start + t1 : b.sign * (b.rad_start + t1);
    if (std::abs(n) > p.half_rows()) continue;
    for (int t2 = 0; t2 < b.cols; ++t2) {
      int l = b.ang_start + t2;
      double ph;
      if (b.scaling())
        ph = double((r1 - 1) * n) / 3.0 + double(long(r2 - p.n / 2) * l) / (p.n + 1);
      else if (lay.phase() == BandPhase::absolute)
        ph = double(long(r1) * (b.rad_start + t1)) / b.rows + double(long(r2) * l) / b.cols;
      else
        ph = double(long(r1) * t1) / b.rows + double(long(r2) * t2) / b.cols;
      double amp = b.rad_win[t1] * b.ang_win[t2] * lay.cnorm(n, l) * norm;
      out.at(b.sector, n, l) += amp * std::conj(turn(ph));
    }
  }
  return out;
}

}  // namespace shearlet
