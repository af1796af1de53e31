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

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <map>
#include <memory>

#include "linalg.hpp"
#include "transform.hpp"

namespace shearlet {

// ---- 1D filters ----

// finitely supported filter, v[i] sits at index start + i
struct Taps {
  int start = 0;
  RVec v{1.0};

  int size() const { return int(v.size()); }
  int stop() const { return start + size(); }
  double operator()(int n) const {
    n -= start;
    return n >= 0 && n < size() ? v[n] : 0.0;
  }
  // sum_n v(n) e^{-2 pi i n xi}
  cplx response(double xi) const {
    cplx s = 0;
    for (int i = 0; i < size(); ++i) s += v[i] * turn((start + i) * xi);
    return s;
  }
};

inline Taps tap_convolve(const Taps& a, const Taps& b) {
  Taps out;
  out.start = a.start + b.start;
  out.v.assign(a.v.size() + b.v.size() - 1, 0.0);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) out.v[i + j] += a.v[i] * b.v[j];
  return out;
}

inline Taps tap_upsample(const Taps& a, int factor) {
  Taps out;
  out.start = a.start * factor;
  out.v.assign(std::size_t(a.size() - 1) * factor + 1, 0.0);
  for (int i = 0; i < a.size(); ++i) out.v[std::size_t(i) * factor] = a.v[i];
  return out;
}

// |m0(xi)|^2 of the maxflat family, equal to 1 at xi = 0
inline double maxflat_magnitude(int K, int L, double xi) {
  if (K < 1 || L < 1) throw std::invalid_argument("maxflat needs K, L >= 1");
  double c2 = std::pow(std::cos(kPi * xi), 2), s2 = std::pow(std::sin(kPi * xi), 2);
  double sum = 0, binom = 1, sp = 1;
  for (int n = 0; n < L; ++n) {
    sum += binom * sp;
    binom = binom * (K + n) / (n + 1);
    sp *= s2;
  }
  return std::pow(c2, K) * sum;
}

namespace detail {

// Laurent polynomials in z = e^{-2 pi i xi}, stored centered (length 2M+1)
inline RVec laurent_mul(const RVec& a, const RVec& b) {
  RVec out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline double laurent_eval(const RVec& r, double xi) {
  int m = int(r.size()) / 2;
  double s = 0;
  for (int i = 0; i < int(r.size()); ++i) s += r[i] * std::cos(2 * kPi * (i - m) * xi);
  return s;
}

}  // namespace detail

// centered Laurent coefficients of maxflat_magnitude(K, L, .)
inline RVec maxflat_coefficients(int K, int L) {
  const RVec cos2{0.25, 0.5, 0.25}, sin2{-0.25, 0.5, -0.25};
  RVec sum{0.0};
  RVec power{1.0};
  double binom = 1;
  for (int n = 0; n < L; ++n) {
    // pad the running sum to the size of power
    RVec padded(power.size(), 0.0);
    std::size_t off = (power.size() - sum.size()) / 2;
    for (std::size_t i = 0; i < sum.size(); ++i) padded[i + off] = sum[i];
    for (std::size_t i = 0; i < power.size(); ++i) padded[i] += binom * power[i];
    sum = padded;
    binom = binom * (K + n) / (n + 1);
    power = detail::laurent_mul(power, sin2);
  }
  for (int i = 0; i < K; ++i) sum = detail::laurent_mul(sum, cos2);
  return sum;
}

// Minimum phase real h with |h^(xi)|^2 = sum_m mag2[m] z^(m-M).
// Roots at z = -1 are divided out first since they come with high multiplicity.
inline Taps spectral_factorize(const RVec& mag2) {
  if (mag2.size() % 2 == 0) throw std::invalid_argument("mag2 needs odd length");
  int M = int(mag2.size()) / 2;
  double scale = 0;
  for (double x : mag2) scale = std::max(scale, std::abs(x));
  for (int i = 0; i <= 1024; ++i)
    if (detail::laurent_eval(mag2, i / 2048.0) < -1e-10 * scale)
      throw NumericalError("spectral factorization of a negative magnitude");
  Taps out;
  if (M == 0) {
    out.v = {std::sqrt(mag2[0])};
    return out;
  }
  // z^M R(z), coefficients in increasing degree
  std::vector<double> poly(mag2.begin(), mag2.end());
  int at_minus_one = 0;
  while (poly.size() > 1) {
    // synthetic division by (z + 1), highest degree first
    std::vector<double> q(poly.size() - 1);
    double carry = 0;
    for (int i = int(poly.size()) - 1; i >= 1; --i) {
      carry = poly[i] - carry;
      q[i - 1] = carry;
    }
    double rem = poly[0] - carry;
    if (std::abs(rem) > 1e-9 * scale) break;
    poly = q;
    ++at_minus_one;
  }
  if (at_minus_one % 2) throw NumericalError("odd root multiplicity on the unit circle");
  std::vector<cplx> roots;
  if (poly.size() > 1) {
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(poly.data(), Eigen::Index(poly.size()));
    solver.compute(c);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    roots.resize(roots.size() / 2);
  }
  for (int i = 0; i < at_minus_one / 2; ++i) roots.push_back(-1.0);
  std::vector<cplx> c{1.0};  // highest degree first
  for (cplx r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = next;
  }
  out.v.resize(c.size());
  double energy = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.v[i] = c[i].real();
    energy += out.v[i] * out.v[i];
  }
  double gain = std::sqrt(mag2[M] / energy);
  double total = std::accumulate(out.v.begin(), out.v.end(), 0.0);
  if (total < 0) gain = -gain;
  for (double& x : out.v) x *= gain;
  return out;
}

// lowpass h with sum sqrt 2 and highpass g(n) = (-1)^n h(1-n)
struct FilterPair {
  Taps h, g;
};

inline FilterPair mirror_pair(const Taps& h) {
  FilterPair p;
  p.h = h;
  p.g.start = 1 - (h.stop() - 1);
  p.g.v.resize(h.v.size());
  for (int i = 0; i < p.g.size(); ++i) {
    int n = p.g.start + i;
    p.g.v[i] = (n % 2 ? -1.0 : 1.0) * h(1 - n);
  }
  return p;
}

// minimum phase factor of the K = L maxflat halfband; K = 4 gives 8 taps
inline FilterPair maxflat_pair(int K = 4) {
  RVec r = maxflat_coefficients(K, K);
  for (double& x : r) x *= 2;
  return mirror_pair(spectral_factorize(r));
}

// taps of the dyadic products H_j and G_j; h[0] is the identity
struct IteratedFilters {
  std::vector<Taps> h, g;
  int levels() const { return int(h.size()) - 1; }
};

inline IteratedFilters iterated_filters(const FilterPair& pair, int jmax) {
  if (jmax < 1) throw std::invalid_argument("iterated filters need jmax >= 1");
  IteratedFilters f;
  f.h.push_back(Taps{});
  f.g.push_back(Taps{});
  for (int j = 1; j <= jmax; ++j) {
    int step = 1 << (j - 1);
    f.g.push_back(tap_convolve(f.h.back(), tap_upsample(pair.g, step)));
    f.h.push_back(tap_convolve(f.h.back(), tap_upsample(pair.h, step)));
  }
  return f;
}

// ---- digital shear ----

enum class PhiMode { delta, numeric };

// 2D kernel on the refined grid, entry (a, b) at offset (a - start1, b - start2)
struct ShearKernel {
  int start1 = 0, start2 = 0, rows = 1, cols = 1;
  RVec v{1.0};
  double at(int a, int b) const {
    a -= start1;
    b -= start2;
    return a >= 0 && a < rows && b >= 0 && b < cols ? v[std::size_t(a) * cols + b] : 0.0;
  }
};

// Phi_k(n) = <phi(S_k .), phi(. - n)> with phi from the cascade algorithm
// (8 refinement levels) and a Riemann sum on the dyadic grid.
inline ShearKernel shear_kernel(const FilterPair& pair, int k, int levels = 8) {
  auto it = iterated_filters(pair, levels);
  const Taps& hl = it.h[levels];
  double step = std::ldexp(1.0, -levels);
  int scale = 1 << levels;
  RVec phi(hl.v.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = hl.v[i] * std::sqrt(double(scale));
  int len = int(phi.size());
  // autocorrelation A(t) = int phi(x + t) phi(x) dx at t = i step
  RVec acf(2 * len - 1, 0.0);
  for (int i = -(len - 1); i < len; ++i) {
    double s = 0;
    for (int m = std::max(0, -i); m < len && m + i < len; ++m) s += phi[m] * phi[m + i];
    acf[i + len - 1] = s * step;
  }
  auto a_at = [&](long t) { return t > -len && t < len ? acf[t + len - 1] : 0.0; };
  int support = (len - 1 + scale - 1) / scale;  // integer support length of phi
  ShearKernel ker;
  ker.start2 = -support;
  ker.cols = 2 * support + 1;
  ker.start1 = -support - std::abs(k) * support;
  ker.rows = 2 * (support + std::abs(k) * support) + 1;
  ker.v.assign(std::size_t(ker.rows) * ker.cols, 0.0);
  for (int a = 0; a < ker.rows; ++a)
    for (int b = 0; b < ker.cols; ++b) {
      int n1 = ker.start1 + a, n2 = ker.start2 + b;
      double s = 0;
      for (int x = 0; x < len; ++x) {
        int y = x - n2 * scale;
        if (y < 0 || y >= len) continue;
        s += phi[x] * phi[y] * a_at(long(n1) * scale + long(k) * x);
      }
      ker.v[std::size_t(a) * ker.cols + b] = s * step;
    }
  return ker;
}

namespace detail {

inline int wrap(long i, int n) {
  long r = i % n;
  return int(r < 0 ? r + n : r);
}

inline int signed_index(int c, int n) { return c < n / 2 ? c : c - n; }

// fine(m) = sum_n f(n) h(m - up n), periodic with length up * n
inline void upsample_convolve(const double* f, int n, int up, const Taps& h, double* fine) {
  int m = up * n;
  std::fill(fine, fine + m, 0.0);
  for (int i = 0; i < n; ++i) {
    if (f[i] == 0) continue;
    for (int t = 0; t < h.size(); ++t) fine[wrap(long(up) * i + h.start + t, m)] += f[i] * h.v[t];
  }
}

// out(n) = sum_m fine(m) h(m - up n), the transpose of upsample_convolve
inline void correlate_downsample(const double* fine, int n, int up, const Taps& h, double* out) {
  int m = up * n;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int t = 0; t < h.size(); ++t) s += fine[wrap(long(up) * i + h.start + t, m)] * h.v[t];
    out[i] = s;
  }
}

// refined grid, x1 refined: fine rows = up * n, columns = n (stored column-major per x2)
struct FineGrid {
  int rows = 0, cols = 0;
  RVec v;
  double* col(int c) { return v.data() + std::size_t(c) * rows; }
  const double* col(int c) const { return v.data() + std::size_t(c) * rows; }
};

inline FineGrid apply_kernel(const FineGrid& in, const ShearKernel& ker, bool transpose) {
  FineGrid out{in.rows, in.cols, RVec(in.v.size(), 0.0)};
  for (int a = 0; a < ker.rows; ++a)
    for (int b = 0; b < ker.cols; ++b) {
      double w = ker.v[std::size_t(a) * ker.cols + b];
      if (w == 0) continue;
      int d1 = ker.start1 + a, d2 = ker.start2 + b;
      if (transpose) {
        d1 = -d1;
        d2 = -d2;
      }
      // out(m) += w in(m - d)
      for (int c = 0; c < in.cols; ++c) {
        const double* src = in.col(wrap(c - d2, in.cols));
        double* dst = out.col(c);
        for (int r = 0; r < in.rows; ++r) dst[r] += w * src[wrap(r - d1, in.rows)];
      }
    }
  return out;
}

}  // namespace detail

// Digital shear along x1 (rows) by k/2^level: refine x1 by 2^level, smooth
// with h_level, move column x2 by k x2 on the refined grid, optionally
// convolve with Phi_k, then correlate with h_level and decimate.
// x2 is taken signed, -n/2..n/2-1, so the wrap sits at the image border.
// With transpose set, applies the adjoint operator.
inline RealImage digital_shear(const RealImage& f, int level, int k, const IteratedFilters& filt,
                               const ShearKernel* phi = nullptr, bool transpose = false) {
  if (level < 0 || level > filt.levels()) throw std::out_of_range("shear level outside filter table");
  int lim = 1 << level;
  if (std::abs(k) > lim) throw std::out_of_range("shear out of range");
  int n = f.n, up = lim;
  const Taps& h = filt.h[level];
  detail::FineGrid fine{up * n, n, RVec(std::size_t(up) * n * n)};
  RVec line(n), out_line(n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) line[r] = f.raw(r, c);
    detail::upsample_convolve(line.data(), n, up, h, fine.col(c));
  }
  int dir = transpose ? -1 : 1;
  auto shift = [&](detail::FineGrid& g, int sign) {
    RVec tmp(g.rows);
    for (int c = 0; c < n; ++c) {
      long s = long(sign) * k * detail::signed_index(c, n);
      double* col = g.col(c);
      for (int m = 0; m < g.rows; ++m) tmp[m] = col[detail::wrap(m + s, g.rows)];
      std::copy(tmp.begin(), tmp.end(), col);
    }
  };
  if (phi && transpose) fine = detail::apply_kernel(fine, *phi, true);
  shift(fine, dir);
  if (phi && !transpose) fine = detail::apply_kernel(fine, *phi, false);
  RealImage out(n);
  for (int c = 0; c < n; ++c) {
    detail::correlate_downsample(fine.col(c), n, up, h, out_line.data());
    for (int r = 0; r < n; ++r) out.raw(r, c) = out_line[r];
  }
  return out;
}

// ---- separable anisotropic analysis ----

// out(a, b) = sum_x f1(x1 - p1[a]) f2(x2 - p2[b]) in(x1, x2), periodic
inline void separable_analysis(const RealImage& in, const Taps& f1, const std::vector<int>& p1, const Taps& f2,
                               const std::vector<int>& p2, double* out) {
  int n = in.n, rows = int(p1.size()), cols = int(p2.size());
  RVec tmp(std::size_t(rows) * n, 0.0);
  for (int a = 0; a < rows; ++a) {
    double* dst = tmp.data() + std::size_t(a) * n;
    for (int t = 0; t < f1.size(); ++t) {
      const double* src = &in.data[std::size_t(detail::wrap(long(p1[a]) + f1.start + t, n)) * n];
      double w = f1.v[t];
      for (int x2 = 0; x2 < n; ++x2) dst[x2] += w * src[x2];
    }
  }
  for (int a = 0; a < rows; ++a) {
    const double* src = tmp.data() + std::size_t(a) * n;
    for (int b = 0; b < cols; ++b) {
      double s = 0;
      for (int t = 0; t < f2.size(); ++t) s += f2.v[t] * src[detail::wrap(long(p2[b]) + f2.start + t, n)];
      out[std::size_t(a) * cols + b] = s;
    }
  }
}

// transpose of separable_analysis, accumulated into acc
inline void separable_synthesis(const double* coeff, const Taps& f1, const std::vector<int>& p1, const Taps& f2,
                                const std::vector<int>& p2, RealImage& acc) {
  int n = acc.n, rows = int(p1.size()), cols = int(p2.size());
  RVec tmp(std::size_t(rows) * n, 0.0);
  for (int a = 0; a < rows; ++a) {
    double* dst = tmp.data() + std::size_t(a) * n;
    for (int b = 0; b < cols; ++b) {
      double c = coeff[std::size_t(a) * cols + b];
      if (c == 0) continue;
      for (int t = 0; t < f2.size(); ++t) dst[detail::wrap(long(p2[b]) + f2.start + t, n)] += c * f2.v[t];
    }
  }
  for (int a = 0; a < rows; ++a) {
    const double* src = tmp.data() + std::size_t(a) * n;
    for (int t = 0; t < f1.size(); ++t) {
      double* dst = &acc.data[std::size_t(detail::wrap(long(p1[a]) + f1.start + t, n)) * n];
      double w = f1.v[t];
      for (int x2 = 0; x2 < n; ++x2) dst[x2] += w * src[x2];
    }
  }
}

// sampling positions round(m * step) for m < n / step; the count must be integral
inline std::vector<int> sample_positions(int n, double step) {
  double count = n / step;
  long c = std::lround(count);
  if (c < 1 || std::abs(count - c) > 1e-9) throw std::invalid_argument("non-integer sampling grid");
  std::vector<int> p(c);
  for (long m = 0; m < c; ++m) p[m] = int(std::lround(m * step));
  return p;
}

// W_{j1,j2} on the dyadic grid (c1 = c2 = 1)
inline std::vector<double> aniso_wavelet(const RealImage& c, int j1, int j2, const IteratedFilters& filt) {
  if (j1 < 1 || j2 < 1) throw std::invalid_argument("aniso_wavelet needs j1, j2 >= 1");
  auto p1 = sample_positions(c.n, std::ldexp(1.0, j1));
  auto p2 = sample_positions(c.n, std::ldexp(1.0, j2));
  std::vector<double> out(p1.size() * p2.size());
  separable_analysis(c, filt.g.at(j1), p1, filt.h.at(j2), p2, out.data());
  return out;
}

// ---- transform ----

// exact coefficient count over N^2 for the implemented index sets
inline double dsst_redundancy(int scales, double c1, double c2) {
  double q = std::ldexp(1.0, 2 * scales);
  return 4.0 / (c1 * c2) * ((q + 2) / 3) / q;
}

inline double dsst_redundancy_limit(double c1, double c2) { return 4.0 / (3 * c1 * c2); }

struct DsstBand {
  int cone = 0;  // 0 coarse, 1 horizontal (shear along x1), 2 vertical
  int j = 0, k = 0;
  int level = 0;  // shear refinement ceil(j/2)
  int j1 = 0, j2 = 0;
  std::vector<int> pos1, pos2;
  std::size_t offset = 0;
  std::size_t count() const { return pos1.size() * pos2.size(); }
};

// Scale j uses shears k/2^ceil(j/2) and the wavelet W_{J-j, J-floor(j/2)}.
// Horizontal shears run over [-2^s, 2^s - 1] and vertical ones over
// [-2^s + 1, 2^s] so each diagonal is covered once.
class DsstPlan {
 public:
  DsstPlan(int n, int scales, double c1 = 1.0, double c2 = 0.4, const FilterPair& pair = maxflat_pair(4),
           PhiMode phi = PhiMode::delta)
      : n_(n), J_(scales), c1_(c1), c2_(c2), pair_(pair), phi_mode_(phi) {
    if (!is_pow2(n) || n < 4) throw std::invalid_argument("dsst size must be a power of two");
    if (scales < 1 || (1L << scales) > n) throw std::invalid_argument("dsst needs 1 <= J <= log2 N");
    if (!(c1 > 0 && c2 > 0)) throw std::invalid_argument("sampling constants must be positive");
    filt_ = iterated_filters(pair_, J_);
    std::size_t off = 0;
    DsstBand coarse;
    coarse.j = -1;
    coarse.j1 = coarse.j2 = J_;
    coarse.pos1 = sample_positions(n, std::ldexp(c1, J_ - 1));
    coarse.pos2 = sample_positions(n, std::ldexp(c2, J_ - 1));
    coarse.offset = off;
    off += coarse.count();
    bands_.push_back(coarse);
    for (int cone = 1; cone <= 2; ++cone)
      for (int j = 0; j < J_; ++j) {
        int s = (j + 1) / 2, q = j / 2, lim = 1 << s;
        int lo = cone == 1 ? -lim : -lim + 1, hi = cone == 1 ? lim - 1 : lim;
        auto p1 = sample_positions(n, std::ldexp(c1, J_ - j));
        auto p2 = sample_positions(n, std::ldexp(c2, J_ - q));
        for (int k = lo; k <= hi; ++k) {
          DsstBand b;
          b.cone = cone;
          b.j = j;
          b.k = k;
          b.level = s;
          b.j1 = J_ - j;
          b.j2 = J_ - q;
          b.pos1 = p1;
          b.pos2 = p2;
          b.offset = off;
          off += b.count();
          bands_.push_back(b);
        }
      }
    total_ = off;
    if (phi_mode_ == PhiMode::numeric) {
      int smax = J_ / 2;
      for (int k = -(1 << smax); k <= (1 << smax); ++k) kernels_[k] = shear_kernel(pair_, k);
    }
  }

  int n() const { return n_; }
  int scales() const { return J_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const FilterPair& pair() const { return pair_; }
  const IteratedFilters& filters() const { return filt_; }
  const std::vector<DsstBand>& bands() const { return bands_; }
  std::size_t total() const { return total_; }
  double redundancy() const { return double(total_) / (double(n_) * n_); }
  const ShearKernel* kernel(int k) const {
    if (phi_mode_ == PhiMode::delta) return nullptr;
    return &kernels_.at(k);
  }

 private:
  int n_, J_;
  double c1_, c2_;
  FilterPair pair_;
  PhiMode phi_mode_;
  IteratedFilters filt_;
  std::vector<DsstBand> bands_;
  std::size_t total_ = 0;
  std::map<int, ShearKernel> kernels_;
};

inline RVec dsst_forward(const RealImage& f, const DsstPlan& plan) {
  if (f.n != plan.n()) throw std::invalid_argument("image size does not match plan");
  RVec out(plan.total());
  const auto& filt = plan.filters();
  const auto& coarse = plan.bands()[0];
  separable_analysis(f, filt.h[coarse.j1], coarse.pos1, filt.h[coarse.j2], coarse.pos2, out.data());
  RealImage ft = transpose(f);
  std::map<std::pair<int, int>, RealImage> sheared;  // (level, k), reset per cone
  int cone = 0;
  for (const auto& b : plan.bands()) {
    if (b.cone == 0) continue;
    if (b.cone != cone) {
      sheared.clear();
      cone = b.cone;
    }
    auto key = std::make_pair(b.level, b.k);
    auto it = sheared.find(key);
    if (it == sheared.end())
      it = sheared.emplace(key, digital_shear(cone == 1 ? f : ft, b.level, b.k, filt, plan.kernel(b.k))).first;
    separable_analysis(it->second, filt.g[b.j1], b.pos1, filt.h[b.j2], b.pos2, out.data() + b.offset);
  }
  return out;
}

inline RealImage dsst_adjoint(const RVec& c, const DsstPlan& plan) {
  if (c.size() != plan.total()) throw std::invalid_argument("coefficient length does not match plan");
  int n = plan.n();
  const auto& filt = plan.filters();
  RealImage out(n), outt(n);
  const auto& coarse = plan.bands()[0];
  separable_synthesis(c.data(), filt.h[coarse.j1], coarse.pos1, filt.h[coarse.j2], coarse.pos2, out);
  // gather per (cone, level, k) before undoing the shear once
  std::map<std::tuple<int, int, int>, RealImage> acc;
  for (const auto& b : plan.bands()) {
    if (b.cone == 0) continue;
    auto key = std::make_tuple(b.cone, b.level, b.k);
    auto it = acc.find(key);
    if (it == acc.end()) it = acc.emplace(key, RealImage(n)).first;
    separable_synthesis(c.data() + b.offset, filt.g[b.j1], b.pos1, filt.h[b.j2], b.pos2, it->second);
  }
  for (const auto& [key, img] : acc) {
    auto [cone, level, k] = key;
    RealImage back = digital_shear(img, level, k, filt, plan.kernel(k), true);
    RealImage& dst = cone == 1 ? out : outt;
    for (std::size_t i = 0; i < back.data.size(); ++i) dst.data[i] += back.data[i];
  }
  RealImage t = transpose(outt);
  for (std::size_t i = 0; i < t.data.size(); ++i) out.data[i] += t.data[i];
  return out;
}

// CG on the normal equations S*S f = S*c
inline RealImage dsst_inverse_cg(const RVec& c, const DsstPlan& plan, double tol = 1e-6, int maxiter = 500,
                                 InverseInfo* info = nullptr) {
  int n = plan.n();
  auto to_c = [](const RealImage& img) {
    CVec v(img.data.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = img.data[i];
    return v;
  };
  auto to_r = [n](const CVec& v) {
    RealImage img(n);
    for (std::size_t i = 0; i < v.size(); ++i) img.data[i] = v[i].real();
    return img;
  };
  auto op = [&](const CVec& x) { return to_c(dsst_adjoint(dsst_forward(to_r(x), plan), plan)); };
  auto res = conjugate_gradient(op, to_c(dsst_adjoint(c, plan)), tol, maxiter);
  if (info) {
    info->iterations = res.iterations;
    info->rel_residual = res.rel_residual;
    info->converged = res.converged;
    info->imag_norm = 0;
  }
  return to_r(res.x);
}

class DsstTransform : public Transform {
 public:
  explicit DsstTransform(std::shared_ptr<const DsstPlan> plan) : plan_(std::move(plan)) {
    for (const auto& b : plan_->bands()) {
      BandInfo bi;
      bi.cone = b.cone;
      bi.j = b.j;
      bi.k = b.k;
      bi.rows = int(b.pos1.size());
      bi.cols = int(b.pos2.size());
      bi.offset = b.offset;
      bi.lowpass = b.cone == 0;
      bands_.push_back(bi);
    }
  }
  DsstTransform(int n, int scales, double c1 = 1.0, double c2 = 0.4)
      : DsstTransform(std::make_shared<const DsstPlan>(n, scales, c1, c2)) {}

  const DsstPlan& plan() const { return *plan_; }
  std::string name() const override { return "dsst"; }
  int size() const override { return plan_->n(); }
  const std::vector<BandInfo>& bands() const override { return bands_; }
  CVec forward(const RealImage& img) const override {
    RVec r = dsst_forward(img, *plan_);
    return CVec(r.begin(), r.end());
  }
  CImage adjoint(const CVec& c) const override { return to_complex(dsst_adjoint(real_of(c), *plan_)); }
  RealImage inverse(const CVec& c, double tol, int maxiter, InverseInfo* info) const override {
    return dsst_inverse_cg(real_of(c), *plan_, tol, maxiter, info);
  }
  // Horizontal bands see f(x1 + k 2^-s x2, x2) through a filter that keeps
  // omega2 near 0, so they match frequency directions with b/a near -k 2^-s.
  bool aligned(const BandInfo& band, double a, double b) const override {
    if (band.lowpass) return false;
    double scale = std::ldexp(1.0, (band.j + 1) / 2);
    if (band.cone == 1) return std::abs(a) >= std::abs(b) && std::abs(band.k + scale * b / a) <= 1 + 1e-9;
    return std::abs(b) >= std::abs(a) && std::abs(band.k + scale * a / b) <= 1 + 1e-9;
  }
  std::vector<int> scales() const override {
    std::vector<int> s;
    for (int j = 0; j < plan_->scales(); ++j) s.push_back(j);
    return s;
  }

 private:
  static RVec real_of(const CVec& c) {
    RVec r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i].real();
    return r;
  }
  std::shared_ptr<const DsstPlan> plan_;
  std::vector<BandInfo> bands_;
};

}  // namespace shearlet
