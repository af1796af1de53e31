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

#include "dsst.hpp"
#include "fft.hpp"

namespace shearlet {

// ---- fan filter ----

// Zero phase 2D filter passing the horizontal fan |xi2| < |xi1|.
struct FanFilter {
  int half = 0;  // taps cover -half..half in both directions
  double tau = 0;
  RVec taps;     // (2 half + 1)^2, row index along x1

  int size() const { return 2 * half + 1; }
  double tap(int a, int b) const { return taps[std::size_t(a + half) * size() + (b + half)]; }
  double response(double xi1, double xi2) const {
    double s = 0;
    for (int a = -half; a <= half; ++a) {
      double c1 = std::cos(2 * kPi * a * xi1);
      for (int b = -half; b <= half; ++b) s += tap(a, b) * c1 * std::cos(2 * kPi * b * xi2);
    }
    return s;
  }
  // the target: 1 for |xi2| <= (1 - tau)|xi1|, 0 beyond (1 + tau)|xi1|, raised cosine between
  static double ideal(double xi1, double xi2, double tau) {
    double a1 = std::abs(xi1), a2 = std::abs(xi2);
    if (a1 == 0 && a2 == 0) return 0.5;
    if (a2 <= (1 - tau) * a1) return 1;
    if (a2 >= (1 + tau) * a1) return 0;
    double t = (a2 / a1 - (1 - tau)) / (2 * tau);
    return std::pow(std::cos(kPi * t / 2), 2);
  }
  // distance of a frequency from the transition wedge
  static double transition_distance(double xi1, double xi2, double tau) {
    double a1 = std::abs(xi1), a2 = std::abs(xi2);
    double v = ideal(xi1, xi2, tau);
    if (v > 0 && v < 1 && !(a1 == 0 && a2 == 0)) return 0;
    double d = 1e300;
    for (double m : {1 - tau, 1 + tau}) d = std::min(d, std::abs(a2 - m * a1) / std::hypot(1.0, m));
    return d;
  }
};

// Frequency sampling of the ideal fan on a fine grid, inverse DFT, separable
// Hann window, symmetrization. The response is checked against the ideal on a
// 128^2 grid away from a guard band of width 2/size around the transition
// wedge (a size-tap filter cannot resolve features narrower than that).
inline FanFilter fan_filter(int size = 33, double tau = 0.15) {
  if (size < 9 || size % 2 == 0) throw std::invalid_argument("fan filter size must be odd and >= 9");
  if (!(tau > 0 && tau < 0.5)) throw std::invalid_argument("fan filter tau must lie in (0, 0.5)");
  const int grid = 512;
  CVec spec(std::size_t(grid) * grid);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      double x1 = double(a < grid / 2 ? a : a - grid) / grid, x2 = double(b < grid / 2 ? b : b - grid) / grid;
      spec[std::size_t(a) * grid + b] = FanFilter::ideal(x1, x2, tau);
    }
  fft2_inplace(spec.data(), grid, grid, +1);
  FanFilter fan;
  fan.half = (size - 1) / 2;
  fan.tau = tau;
  fan.taps.assign(std::size_t(size) * size, 0.0);
  int h = fan.half;
  auto raw = [&](int a, int b) { return spec[std::size_t((a + grid) % grid) * grid + (b + grid) % grid].real(); };
  // one quadrant, mirrored, so the symmetry is exact
  for (int a = 0; a <= h; ++a)
    for (int b = 0; b <= h; ++b) {
      double w = 0.25 * (1 + std::cos(kPi * a / (h + 1))) * (1 + std::cos(kPi * b / (h + 1)));
      double v = 0.25 * (raw(a, b) + raw(-a, b) + raw(a, -b) + raw(-a, -b)) * w / (double(grid) * grid);
      for (int sa : {-a, a})
        for (int sb : {-b, b}) fan.taps[std::size_t(sa + h) * size + (sb + h)] = v;
    }
  for (int a = 0; a < 128; ++a)
    for (int b = 0; b < 128; ++b) {
      double x1 = (a - 64) / 128.0, x2 = (b - 64) / 128.0;
      if (FanFilter::transition_distance(x1, x2, tau) < 2.0 / size) continue;
      if (std::abs(fan.response(x1, x2) - FanFilter::ideal(x1, x2, tau)) > 0.05)
        throw NumericalError("fan filter response misses the ideal fan by more than 0.05");
    }
  return fan;
}

// ---- filter bank ----

struct DnstBand {
  int cone = 0;  // 0 lowpass, 1 horizontal, 2 vertical
  int j = 0, k = 0;
  int level = 0;  // ceil(j/2)
};

// Undecimated non-separable shearlet filters on the N x N DFT grid.
// Scale j: w_j = g_{J-j} (x1) h_{J-floor(j/2)} (x2), multiplied in frequency by
// the fan dilated onto the band, P(2^{J-j-1} xi1, 2^{J-floor(j/2)-1} xi2), then
// digitally sheared by k / 2^ceil(j/2), k in [-2^s, 2^s]. Both wavelet factors
// are scaled so that the dyadic partition sums to one, the lowpass is h_J x h_J.
class DnstBank {
 public:
  DnstBank(int n, int scales, const FilterPair& pair = maxflat_pair(4), const FanFilter& fan = fan_filter())
      : n_(n), J_(scales) {
    if (!is_pow2(n) || n < 8) throw std::invalid_argument("dnst size must be a power of two >= 8");
    if (scales < 1 || (1L << scales) > n) throw std::invalid_argument("dnst needs 1 <= J <= log2 N");
    auto filt = iterated_filters(pair, J_);
    std::size_t nn = std::size_t(n) * n;
    auto freq = [n](int m) { return double(m < n / 2 ? m : m - n) / n; };
    // lowpass
    {
      CVec low(nn);
      double scale = std::ldexp(1.0, -J_);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          low[std::size_t(a) * n + b] = filt.h[J_].response(freq(a)) * filt.h[J_].response(freq(b)) * scale;
      bands_.push_back({0, -1, 0, 0});
      spectra_.push_back(std::move(low));
    }
    std::vector<std::pair<DnstBand, CVec>> vertical;
    for (int j = 0; j < J_; ++j) {
      int s = (j + 1) / 2, q = j / 2, a1 = J_ - j, b1 = J_ - q;
      double scale = std::sqrt(std::ldexp(1.0, -(a1 + b1)));
      CVec base(nn);
      CVec g1(n), h2(n);
      for (int m = 0; m < n; ++m) {
        g1[m] = filt.g[a1].response(freq(m));
        h2[m] = filt.h[b1].response(freq(m));
      }
      Eigen::MatrixXd p = fan_grid(fan, n, a1 - 1, b1 - 1);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) base[std::size_t(a) * n + b] = g1[a] * h2[b] * scale * p(a, b);
      // to space, shear, back
      fft2_inplace(base.data(), n, n, +1);
      RealImage taps(n);
      for (std::size_t i = 0; i < nn; ++i) taps.data[i] = base[i].real() / double(nn);
      for (int k = -(1 << s); k <= (1 << s); ++k) {
        RealImage sh = digital_shear(taps, s, k, filt);
        CVec spec(nn);
        for (std::size_t i = 0; i < nn; ++i) spec[i] = sh.data[i];
        fft2_inplace(spec.data(), n, n, -1);
        CVec spec_t(nn);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) spec_t[std::size_t(b) * n + a] = spec[std::size_t(a) * n + b];
        bands_.push_back({1, j, k, s});
        spectra_.push_back(std::move(spec));
        vertical.push_back({{2, j, k, s}, std::move(spec_t)});
      }
    }
    for (auto& [b, spec] : vertical) {
      bands_.push_back(b);
      spectra_.push_back(std::move(spec));
    }
    denom_.assign(nn, 0.0);
    for (const auto& spec : spectra_)
      for (std::size_t i = 0; i < nn; ++i) denom_[i] += std::norm(spec[i]);
    auto [lo, hi] = std::minmax_element(denom_.begin(), denom_.end());
    dmin_ = *lo;
    dmax_ = *hi;
    if (dmin_ < 1e-6) throw NumericalError("dual filter denominator vanishes on the DFT grid");
  }

  int n() const { return n_; }
  int scales() const { return J_; }
  const std::vector<DnstBand>& bands() const { return bands_; }
  std::size_t band_count() const { return bands_.size(); }
  const CVec& spectrum(std::size_t b) const { return spectra_.at(b); }
  // dual spectrum psi^ / D, formed on demand
  cplx dual(std::size_t b, std::size_t i) const { return spectra_[b][i] / denom_[i]; }
  const RVec& denominator() const { return denom_; }
  double denom_min() const { return dmin_; }
  double denom_max() const { return dmax_; }
  // spatial taps of band b on the periodic grid, raw(0,0) is the origin
  RealImage filter_taps(std::size_t b) const {
    CVec s = spectra_.at(b);
    fft2_inplace(s.data(), n_, n_, +1);
    RealImage out(n_);
    for (std::size_t i = 0; i < s.size(); ++i) out.data[i] = s[i].real() / (double(n_) * n_);
    return out;
  }
  int find(int cone, int j, int k) const {
    for (std::size_t b = 0; b < bands_.size(); ++b)
      if (bands_[b].cone == cone && bands_[b].j == j && bands_[b].k == k) return int(b);
    return -1;
  }

 private:
  // P(2^e1 xi1, 2^e2 xi2) on the DFT grid, as C1 taps C2^T with cosine tables
  static Eigen::MatrixXd fan_grid(const FanFilter& fan, int n, int e1, int e2) {
    int h = fan.half, sz = fan.size();
    Eigen::MatrixXd taps(sz, sz), c1(n, sz), c2(n, sz);
    for (int a = -h; a <= h; ++a)
      for (int b = -h; b <= h; ++b) taps(a + h, b + h) = fan.tap(a, b);
    for (int m = 0; m < n; ++m)
      for (int a = -h; a <= h; ++a) {
        // exact phase reduction: 2^e m a mod n
        long t1 = ((long(m) << e1) * a) % n, t2 = ((long(m) << e2) * a) % n;
        c1(m, a + h) = std::cos(2 * kPi * double(t1) / n);
        c2(m, a + h) = std::cos(2 * kPi * double(t2) / n);
      }
    return c1 * taps * c2.transpose();
  }

  int n_, J_;
  std::vector<DnstBand> bands_;
  std::vector<CVec> spectra_;
  RVec denom_;
  double dmin_ = 0, dmax_ = 0;
};

// band count in undecimated mode: 2 sum_j (2^{ceil(j/2)+1} + 1) + 1
inline std::size_t dnst_band_count(int scales) {
  std::size_t c = 1;
  for (int j = 0; j < scales; ++j) c += 2 * ((std::size_t(2) << ((j + 1) / 2)) + 1);
  return c;
}

// coefficients: band-major, N x N real arrays (correlation with each filter)
inline RVec dnst_forward(const RealImage& f, const DnstBank& bank) {
  int n = bank.n();
  if (f.n != n) throw std::invalid_argument("image size does not match filter bank");
  std::size_t nn = std::size_t(n) * n;
  CVec F = to_complex(f).data;
  fft2_inplace(F.data(), n, n, -1);
  RVec out(nn * bank.band_count());
  CVec work(nn);
  for (std::size_t b = 0; b < bank.band_count(); ++b) {
    const CVec& s = bank.spectrum(b);
    for (std::size_t i = 0; i < nn; ++i) work[i] = F[i] * std::conj(s[i]);
    fft2_inplace(work.data(), n, n, +1);
    for (std::size_t i = 0; i < nn; ++i) out[b * nn + i] = work[i].real() / double(nn);
  }
  return out;
}

namespace detail {

template <typename SpecFn>
RealImage dnst_synthesis(const RVec& c, const DnstBank& bank, SpecFn spec) {
  int n = bank.n();
  std::size_t nn = std::size_t(n) * n;
  if (c.size() != nn * bank.band_count()) throw std::invalid_argument("coefficient length does not match bank");
  CVec acc(nn, 0.0), work(nn);
  for (std::size_t b = 0; b < bank.band_count(); ++b) {
    for (std::size_t i = 0; i < nn; ++i) work[i] = c[b * nn + i];
    fft2_inplace(work.data(), n, n, -1);
    for (std::size_t i = 0; i < nn; ++i) acc[i] += work[i] * spec(b, i);
  }
  fft2_inplace(acc.data(), n, n, +1);
  RealImage out(n);
  for (std::size_t i = 0; i < nn; ++i) out.data[i] = acc[i].real() / double(nn);
  return out;
}

}  // namespace detail

inline RealImage dnst_adjoint(const RVec& c, const DnstBank& bank) {
  return detail::dnst_synthesis(c, bank, [&](std::size_t b, std::size_t i) { return bank.spectrum(b)[i]; });
}

// sum over bands of the coefficients convolved with the dual filters
inline RealImage dnst_reconstruct(const RVec& c, const DnstBank& bank) {
  return detail::dnst_synthesis(c, bank, [&](std::size_t b, std::size_t i) { return bank.dual(b, i); });
}

struct DnstDecimatedBand {
  DnstBand band;
  std::vector<int> rows, cols;  // retained sample positions
  RVec values;                  // row-major rows.size() x cols.size()
};

// Decimated export: band (j, k) keeps the samples on the grid with steps
// 2^{J-j} c1 along x1 and 2^{J-floor(j/2)} c2 along x2 (swapped in the vertical
// cone, lowpass uses 2^J c1 and 2^J c2). There is no inverse for this mode.
inline std::vector<DnstDecimatedBand> dnst_decimate(const RVec& c, const DnstBank& bank, double c1, double c2) {
  int n = bank.n(), scales = bank.scales();
  std::size_t nn = std::size_t(n) * n;
  if (c.size() != nn * bank.band_count()) throw std::invalid_argument("coefficient length does not match bank");
  if (!(c1 > 0 && c2 > 0)) throw std::invalid_argument("sampling constants must be positive");
  std::vector<DnstDecimatedBand> out;
  for (std::size_t b = 0; b < bank.band_count(); ++b) {
    const auto& band = bank.bands()[b];
    double s1, s2;
    if (band.cone == 0) {
      s1 = std::ldexp(c1, scales);
      s2 = std::ldexp(c2, scales);
    } else {
      s1 = std::ldexp(c1, scales - band.j);
      s2 = std::ldexp(c2, scales - band.j / 2);
      if (band.cone == 2) std::swap(s1, s2);
    }
    DnstDecimatedBand d{band, sample_positions(n, std::max(s1, 1.0)), sample_positions(n, std::max(s2, 1.0)), {}};
    d.values.reserve(d.rows.size() * d.cols.size());
    for (int r : d.rows)
      for (int q : d.cols) d.values.push_back(c[b * nn + std::size_t(r) * n + q]);
    out.push_back(std::move(d));
  }
  return out;
}

class DnstTransform : public Transform {
 public:
  explicit DnstTransform(std::shared_ptr<const DnstBank> bank) : bank_(std::move(bank)) {
    int n = bank_->n();
    std::size_t off = 0;
    for (const auto& b : bank_->bands()) {
      BandInfo bi;
      bi.cone = b.cone;
      bi.j = b.j;
      bi.k = b.k;
      bi.rows = bi.cols = n;
      bi.offset = off;
      bi.lowpass = b.cone == 0;
      off += bi.count();
      bands_.push_back(bi);
    }
  }
  DnstTransform(int n, int scales) : DnstTransform(std::make_shared<const DnstBank>(n, scales)) {}

  const DnstBank& bank() const { return *bank_; }
  std::string name() const override { return "dnst"; }
  int size() const override { return bank_->n(); }
  const std::vector<BandInfo>& bands() const override { return bands_; }
  CVec forward(const RealImage& img) const override {
    RVec r = dnst_forward(img, *bank_);
    return CVec(r.begin(), r.end());
  }
  CImage adjoint(const CVec& c) const override { return to_complex(dnst_adjoint(real_of(c), *bank_)); }
  // dual filters give the inverse directly; tol and maxiter are unused
  RealImage inverse(const CVec& c, double, int, InverseInfo* info) const override {
    if (info) *info = InverseInfo{};
    return dnst_reconstruct(real_of(c), *bank_);
  }
  // the filter (not the image) is sheared, so band k follows slopes b/a near k 2^-s
  bool aligned(const BandInfo& band, double a, double b) const override {
    if (band.lowpass) return false;
    double scale = std::ldexp(1.0, (band.j + 1) / 2);
    if (band.cone == 1) return std::abs(a) >= std::abs(b) && std::abs(band.k - scale * b / a) <= 1 + 1e-9;
    return std::abs(b) >= std::abs(a) && std::abs(band.k - scale * a / b) <= 1 + 1e-9;
  }
  std::vector<int> scales() const override {
    std::vector<int> s;
    for (int j = 0; j < bank_->scales(); ++j) s.push_back(j);
    return s;
  }

 private:
  static RVec real_of(const CVec& c) {
    RVec r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i].real();
    return r;
  }
  std::shared_ptr<const DnstBank> bank_;
  std::vector<BandInfo> bands_;
};

}  // namespace shearlet
