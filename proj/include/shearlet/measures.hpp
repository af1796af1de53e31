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

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <tuple>
#include <string>

#include "dnst.hpp"
#include "dsst.hpp"
#include "fdst.hpp"

namespace shearlet {

// ---- report ----

struct Curve {
  std::string name;
  RVec x, y;
};

struct MeasureReport {
  int id = 0;
  std::string title;
  std::string transform;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<Curve> curves;
  std::map<std::string, std::string> config;  // resolved settings, echoed in the output
  double seconds = 0;                         // wall clock, not part of the comparable content

  void set(const std::string& name, double v) { scalars.emplace_back(name, v); }
  double value(const std::string& name) const {
    for (const auto& [n, v] : scalars)
      if (n == name) return v;
    throw std::out_of_range("no scalar " + name);
  }
  const Curve& curve(const std::string& name) const {
    for (const auto& c : curves)
      if (c.name == name) return c;
    throw std::out_of_range("no curve " + name);
  }
};

// ---- small numerics ----

inline double ls_slope(const RVec& x, const RVec& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw std::invalid_argument("slope fit needs distinct abscissae");
  return sxy / sxx;
}

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

// Slope of the log of the smallest nonincreasing majorant, per sample step
// (log_axis: against log(1 + step), a polynomial decay exponent). Samples
// whose majorant is below 1e-15 * reference (the series maximum when
// reference <= 0) are left out of the fit. When they make up a quarter of the
// series or more, the series counts as compactly supported and the rate is
// -inf; an isolated zero at the end (a filter zero at Nyquist) does not.
inline double decay_rate(const RVec& series, double reference = 0, bool log_axis = false) {
  if (series.empty()) throw std::invalid_argument("empty series");
  RVec maj(series.size());
  double run = 0;
  for (std::size_t i = series.size(); i-- > 0;) {
    if (series[i] < 0) throw std::invalid_argument("decay series must be nonnegative");
    run = std::max(run, series[i]);
    maj[i] = run;
  }
  if (reference <= 0) reference = maj[0];
  double floor = 1e-15 * reference;
  RVec x, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (maj[i] <= floor) break;  // nonincreasing: the rest is below as well
    x.push_back(log_axis ? std::log1p(double(i)) : double(i));
    y.push_back(std::log(maj[i]));
  }
  if (x.empty() || 4 * (series.size() - x.size()) >= series.size()) return kMinusInf;
  if (x.size() == 1) return 0;
  return ls_slope(x, y);
}

inline double mean_of(const RVec& v) {
  double s = 0;
  for (double x : v) {
    if (x == kMinusInf) return kMinusInf;
    s += x;
  }
  return s / v.size();
}

// ---- test images ----

inline RealImage uniform_image(int n, std::uint64_t seed) {
  Rng g(seed);
  RealImage img(n);
  for (auto& x : img.data) x = g.uniform();
  return img;
}

inline RealImage gaussian_image(int n, double variance) {
  RealImage img(n);
  for (int u = -n / 2; u < n / 2; ++u)
    for (int v = -n / 2; v < n / 2; ++v) img.at(u, v) = std::exp(-(double(u) * u + double(v) * v) / (2 * variance));
  return img;
}

// Edge through the origin with normal (a, b), rendered through a Gaussian
// pixel spread of width blur (0 for a hard step) and multiplied by a raised
// cosine of radius window * n (0 for none). shear evaluates the picture at
// (u + shear v, v), i.e. the image composed with the shear.
inline RealImage edge_image(int n, double a, double b, double blur = 0.5, double window = 0.4, double shear = 0) {
  double len = std::hypot(a, b);
  if (len == 0) throw std::invalid_argument("edge normal must be nonzero");
  RealImage img(n);
  for (int u = -n / 2; u < n / 2; ++u)
    for (int v = -n / 2; v < n / 2; ++v) {
      double x1 = u + shear * v, x2 = v;
      double d = (a * x1 + b * x2) / len;
      double val = blur > 0 ? 0.5 * std::erfc(-d / (blur * std::sqrt(2.0))) : (d >= 0 ? 1.0 : 0.0);
      if (window > 0) {
        double r = std::hypot(x1, x2) / (window * n);
        val *= r < 1 ? std::pow(std::cos(kPi * r / 2), 2) : 0.0;
      }
      img.at(u, v) = val;
    }
  return img;
}

// slopes -1, -0.5, 0, 0.5, 1 and the transposes of the middle three
inline std::vector<std::pair<double, double>> edge_normals() {
  return {{1, 1}, {1, 0.5}, {1, 0}, {1, -0.5}, {1, -1}, {0.5, 1}, {0, 1}, {-0.5, 1}};
}

// circular shift putting the largest magnitude at the center pixel
inline RealImage center_on_peak(const RealImage& img) {
  int n = img.n;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < img.data.size(); ++i)
    if (std::abs(img.data[i]) > std::abs(img.data[arg])) arg = i;
  int dr = n / 2 - int(arg) / n, dc = n / 2 - int(arg) % n;
  RealImage out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.raw(((r + dr) % n + n) % n, ((c + dc) % n + n) % n) = img.raw(r, c);
  return out;
}

// ---- mock transform: orthonormal periodic 2D Haar ----

// Harness self-check: an exactly orthonormal transform with the same
// contract. Cone 1 is highpass along x1, cone 2 along x2, cone 3 both.
class HaarTransform : public Transform {
 public:
  HaarTransform(int n, int levels) : n_(n), levels_(levels) {
    if (!is_pow2(n) || levels < 1 || (n >> levels) < 1) throw std::invalid_argument("bad Haar configuration");
    std::size_t off = 0;
    int m = n >> levels;
    bands_.push_back(BandInfo{0, -1, 0, m, m, off, true});
    off += std::size_t(m) * m;
    for (int j = 0; j < levels; ++j, m *= 2)
      for (int cone = 1; cone <= 3; ++cone) {
        bands_.push_back(BandInfo{cone, j, 0, m, m, off, false});
        off += std::size_t(m) * m;
      }
  }
  std::string name() const override { return "haar"; }
  int size() const override { return n_; }
  const std::vector<BandInfo>& bands() const override { return bands_; }
  CVec forward(const RealImage& img) const override {
    RVec w = img.data;
    for (int m = n_; m > (n_ >> levels_); m /= 2) step(w, m, false);
    return gather(w);
  }
  CImage adjoint(const CVec& c) const override {
    RVec w = scatter(c);
    for (int m = 2 * (n_ >> levels_); m <= n_; m *= 2) step(w, m, true);
    RealImage out(n_);
    out.data = w;
    return to_complex(out);
  }
  RealImage inverse(const CVec& c, double, int, InverseInfo* info) const override {
    if (info) *info = InverseInfo{};
    return real_part(adjoint(c));
  }
  bool aligned(const BandInfo& band, double a, double b) const override {
    if (band.lowpass) return false;
    double r = std::abs(a) / std::max(std::abs(b), 1e-300);
    if (band.cone == 1) return r > 1;
    if (band.cone == 2) return r < 1;
    return r >= 0.5 && r <= 2;
  }
  std::vector<int> scales() const override {
    std::vector<int> s(levels_);
    std::iota(s.begin(), s.end(), 0);
    return s;
  }

 private:
  // one level on the top-left m x m block, rows then columns
  void step(RVec& w, int m, bool inverse) const {
    const double r2 = std::sqrt(0.5);
    RVec tmp(m);
    auto pass = [&](auto get) {
      for (int line = 0; line < m; ++line) {
        for (int i = 0; i < m / 2; ++i) {
          double x = get(line, 2 * i), y = get(line, 2 * i + 1);
          if (!inverse) {
            tmp[i] = (x + y) * r2;
            tmp[m / 2 + i] = (x - y) * r2;
          } else {
            double lo = get(line, i), hi = get(line, m / 2 + i);
            tmp[2 * i] = (lo + hi) * r2;
            tmp[2 * i + 1] = (lo - hi) * r2;
          }
        }
        for (int i = 0; i < m; ++i) get(line, i) = tmp[i];
      }
    };
    auto along_u = [&](int line, int i) -> double& { return w[std::size_t(i) * n_ + line]; };
    auto along_v = [&](int line, int i) -> double& { return w[std::size_t(line) * n_ + i]; };
    if (!inverse) {
      pass(along_u);
      pass(along_v);
    } else {
      pass(along_v);
      pass(along_u);
    }
  }
  // quadrant origin of a band inside the in-place layout
  std::pair<int, int> origin(const BandInfo& b) const {
    if (b.lowpass) return {0, 0};
    int m = b.rows;
    return {b.cone == 2 ? 0 : m, b.cone == 1 ? 0 : m};
  }
  CVec gather(const RVec& w) const {
    CVec c(coeff_count());
    for (const auto& b : bands_) {
      auto [r0, c0] = origin(b);
      for (int r = 0; r < b.rows; ++r)
        for (int q = 0; q < b.cols; ++q) c[b.offset + std::size_t(r) * b.cols + q] = w[std::size_t(r0 + r) * n_ + c0 + q];
    }
    return c;
  }
  RVec scatter(const CVec& c) const {
    if (c.size() != coeff_count()) throw std::invalid_argument("coefficient length mismatch");
    RVec w(std::size_t(n_) * n_);
    for (const auto& b : bands_) {
      auto [r0, c0] = origin(b);
      for (int r = 0; r < b.rows; ++r)
        for (int q = 0; q < b.cols; ++q) w[std::size_t(r0 + r) * n_ + c0 + q] = c[b.offset + std::size_t(r) * b.cols + q].real();
    }
    return w;
  }
  int n_, levels_;
  std::vector<BandInfo> bands_;
};

// ---- measure 1: windowing ----

// max over random grid functions of |W*W J - J| / |J|; adjoint_scale != 1
// perturbs W* for the harness self-test
inline MeasureReport m1_algebraic_exactness(const SubbandLayout& lay, int trials, std::uint64_t seed,
                                            double adjoint_scale = 1.0) {
  MeasureReport rep;
  rep.id = 1;
  rep.title = "algebraic exactness";
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    auto J = random_pparray(lay.params(), seed + t);
    auto back = window_adjoint(window_apply(J, lay), lay);
    PPArray diff(J.params);
    for (std::size_t i = 0; i < J.s1.size(); ++i) {
      diff.s1[i] = adjoint_scale * back.s1[i] - J.s1[i];
      diff.s2[i] = adjoint_scale * back.s2[i] - J.s2[i];
    }
    worst = std::max(worst, pp_norm(diff) / pp_norm(J));
  }
  rep.set("M_alg", worst);
  return rep;
}

// ---- measure 2: isometry of the weighted ppft ----

inline MeasureReport m2_isometry(const PpftPlan& ppft, const WeightTable& w, int trials, std::uint64_t seed,
                                 double cg_tol = 1e-6) {
  MeasureReport rep;
  rep.id = 2;
  rep.title = "isometry";
  int n = ppft.params().n;
  GramOperator gram(ppft, w);
  auto op = [&](const CVec& x) { return gram(x); };
  double isom1 = 0, isom3 = 0;
  for (int t = 0; t < trials; ++t) {
    auto img = to_complex(uniform_image(n, seed + t));
    isom1 = std::max(isom1, rel_diff(gram(img).data, img.data));
    // right-hand side of the normal equations for the data sqrt(w) P img
    auto res = conjugate_gradient(op, gram(img).data, cg_tol, 500);
    isom3 = std::max(isom3, rel_diff(res.x, img.data));
  }
  rep.set("M_isom1", isom1);
  rep.set("M_isom2", gram_condition(ppft, w).cond);
  rep.set("M_isom3", isom3);
  return rep;
}

// ---- measure 3: tightness and reconstruction ----

inline MeasureReport m3_parseval(const Transform& tr, int trials, std::uint64_t seed, double tol, int maxiter) {
  MeasureReport rep;
  rep.id = 3;
  rep.title = "parseval";
  rep.transform = tr.name();
  double tight1 = 0, tight2 = 0;
  for (int t = 0; t < trials; ++t) {
    auto img = uniform_image(tr.size(), seed + t);
    auto c = tr.forward(img);
    tight1 = std::max(tight1, rel_diff(real_part(tr.adjoint(c)).data, img.data));
    tight2 = std::max(tight2, rel_diff(tr.inverse(c, tol, maxiter).data, img.data));
  }
  rep.set("M_tight1", tight1);
  rep.set("M_tight2", tight2);
  return rep;
}

// ---- measure 4: space and frequency localization ----

namespace detail {

// 2n line decay rates from the center outward, along x1 for every x2 and
// along x2 for every x1
inline RVec line_decays(const RVec& mag, int n, bool log_axis) {
  double ref = *std::max_element(mag.begin(), mag.end());
  RVec rates;
  RVec series(n / 2);
  for (int v = 0; v < n; ++v) {
    for (int t = 0; t < n / 2; ++t) series[t] = mag[std::size_t(n / 2 + t) * n + v];
    rates.push_back(decay_rate(series, ref, log_axis));
  }
  for (int u = 0; u < n; ++u) {
    for (int t = 0; t < n / 2; ++t) series[t] = mag[std::size_t(u) * n + n / 2 + t];
    rates.push_back(decay_rate(series, ref, log_axis));
  }
  return rates;
}

// mean local Hoelder exponent: slope of log|f(p) - f(p0)| against log|p - p0|
// over the Chebyshev ball of the given radius; flat neighborhoods are skipped
template <typename T>
double mean_hoelder(const std::vector<T>& f, int n, int radius = 4) {
  double ref = 0;
  for (const auto& x : f) ref = std::max(ref, std::abs(x));
  double floor = 1e-15 * ref, total = 0;
  long count = 0;
  RVec lx, ly;
  for (int r0 = 0; r0 < n; ++r0)
    for (int c0 = 0; c0 < n; ++c0) {
      lx.clear();
      ly.clear();
      T f0 = f[std::size_t(r0) * n + c0];
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
          int r = r0 + dr, c = c0 + dc;
          if ((dr == 0 && dc == 0) || r < 0 || c < 0 || r >= n || c >= n) continue;
          double m = std::abs(f[std::size_t(r) * n + c] - f0);
          if (m <= floor) continue;
          lx.push_back(0.5 * std::log(double(dr * dr + dc * dc)));
          ly.push_back(std::log(m));
        }
      if (lx.size() < 3) continue;
      double mn = *std::min_element(lx.begin(), lx.end()), mx = *std::max_element(lx.begin(), lx.end());
      if (mx - mn < 1e-12) continue;
      total += ls_slope(lx, ly);
      ++count;
    }
  return count ? total / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline MeasureReport m4_space_frequency(const RealImage& element) {
  int n = element.n;
  if (n < 64) throw std::invalid_argument("space-frequency measure needs N >= 64");
  MeasureReport rep;
  rep.id = 4;
  rep.title = "space-frequency localization";
  std::size_t nn = std::size_t(n) * n;
  RVec mag(nn);
  for (std::size_t i = 0; i < nn; ++i) mag[i] = std::abs(element.data[i]);
  rep.set("M_decay1", mean_of(detail::line_decays(mag, n, false)));
  rep.set("M_decay1_loglog", mean_of(detail::line_decays(mag, n, true)));
  // spectrum with the zero frequency moved to the center pixel
  CVec spec(nn);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) spec[std::size_t(r) * n + c] = element.raw((r + n / 2) % n, (c + n / 2) % n);
  fft2_inplace(spec.data(), n, n, -1);
  CVec centered(nn);
  RVec smag(nn);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      centered[std::size_t((r + n / 2) % n) * n + (c + n / 2) % n] = spec[std::size_t(r) * n + c];
    }
  for (std::size_t i = 0; i < nn; ++i) smag[i] = std::abs(centered[i]);
  double top = *std::max_element(smag.begin(), smag.end()), low = 0;
  for (int u = -3; u <= 3; ++u)
    for (int v = -3; v <= 3; ++v) low = std::max(low, smag[std::size_t(n / 2 + u) * n + n / 2 + v]);
  rep.set("M_supp", low / top);
  rep.set("M_decay2", mean_of(detail::line_decays(smag, n, false)));
  rep.set("M_decay2_loglog", mean_of(detail::line_decays(smag, n, true)));
  rep.set("M_smooth1", detail::mean_hoelder(element.data, n));
  rep.set("M_smooth2", detail::mean_hoelder(centered, n));
  rep.config["decay2_normalization"] = "mean";
  return rep;
}

// analyzing element used by measure 4: slope 0 at scale min(4, finest),
// both halves of the first cone for FDST, the horizontal k = 0 band otherwise
// image of the unit coefficient in the middle of band (cone, j, k)
inline CImage analyzing_element(const Transform& tr, int cone, int j, int k) {
  if (auto f = dynamic_cast<const FdstTransform*>(&tr)) return shearlet_image(f->plan(), cone, j, k);
  for (const auto& band : tr.bands())
    if (!band.lowpass && band.cone == cone && band.j == j && band.k == k) {
      CVec c(tr.coeff_count());
      c[band.offset + std::size_t(band.rows / 2) * band.cols + band.cols / 2] = 1.0;
      return tr.adjoint(c);
    }
  throw std::invalid_argument("transform has no band (cone " + std::to_string(cone) + ", j " + std::to_string(j) +
                              ", k " + std::to_string(k) + ")");
}

inline RealImage measure_element(const Transform& tr) {
  int finest = tr.scales().back(), j = std::min(4, finest);
  if (auto f = dynamic_cast<const FdstTransform*>(&tr)) {
    auto a = shearlet_image(f->plan(), 11, j, 0), b = shearlet_image(f->plan(), 12, j, 0);
    RealImage out(a.n);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = (a.data[i] + b.data[i]).real();
    return out;
  }
  return center_on_peak(real_part(analyzing_element(tr, 1, j, 0)));
}

// ---- measure 5: shear invariance (FDST) ----

// Compares band (j, k) of the sheared edge with band (j, k + 2^j s) of the
// edge, in the cones whose pseudo-polar sector the shear maps onto itself.
inline MeasureReport m5_shear_invariance(const FdstPlan& plan, double s, double blur = 0.5, double window = 0.4) {
  if (std::abs(s) > 1) throw std::invalid_argument("shear must lie in [-1, 1]");
  MeasureReport rep;
  rep.id = 5;
  rep.title = "shear invariance";
  rep.transform = "fdst";
  const auto& lay = plan.layout();
  int n = plan.params().n;
  auto img = edge_image(n, 1, 0, blur, window), sheared = edge_image(n, 1, 0, blur, window, s);
  auto c = fdst_forward(img, plan), cs = fdst_forward(sheared, plan);
  double norm = norm2(img.data);
  Curve curve{"M_shear", {}, {}};
  for (int j = 1; j <= lay.jh(); ++j) {
    double shift = std::ldexp(s, j);
    if (shift != std::round(shift)) continue;
    int dk = int(shift), lim = 1 << j;
    double worst = 0;
    for (int cone : {21, 22})
      for (int k = -lim + 1; k < lim; ++k) {
        if (k + dk <= -lim || k + dk >= lim) continue;
        const auto& b1 = lay.bands()[lay.find(cone, j, k)];
        const auto& b2 = lay.bands()[lay.find(cone, j, k + dk)];
        if (b1.count() != b2.count()) throw std::logic_error("interior bands differ in size");
        double e = 0;
        for (std::size_t i = 0; i < b1.count(); ++i) e += std::norm(cs[b1.offset + i] - c[b2.offset + i]);
        worst = std::max(worst, std::sqrt(e) / norm);
      }
    curve.x.push_back(j);
    curve.y.push_back(worst);
  }
  rep.curves.push_back(curve);
  return rep;
}

// ---- measure 6: speed ----

namespace detail {

// median over repeats of the mean time of fn, looping until 20 ms have passed
template <typename Fn>
double time_median(Fn&& fn, int repeats) {
  using clock = std::chrono::steady_clock;
  RVec runs;
  for (int r = 0; r < repeats; ++r) {
    int loops = 0;
    auto t0 = clock::now();
    double dt = 0;
    do {
      fn();
      ++loops;
      dt = std::chrono::duration<double>(clock::now() - t0).count();
    } while (dt < 0.02);
    runs.push_back(dt / loops);
  }
  std::sort(runs.begin(), runs.end());
  return runs[runs.size() / 2];
}

}  // namespace detail

using TransformFactory = std::function<std::shared_ptr<const Transform>(int n)>;

inline MeasureReport m6_speed(const TransformFactory& make, const std::vector<int>& exponents, std::uint64_t seed,
                              int repeats = 3) {
  if (exponents.size() < 2) throw std::invalid_argument("speed measure needs two or more sizes");
  MeasureReport rep;
  rep.id = 6;
  rep.title = "speed";
  Curve times{"seconds", {}, {}}, ffts{"fft_seconds", {}, {}};
  RVec logs;
  for (int e : exponents) {
    int n = 1 << e;
    auto tr = make(n);
    rep.transform = tr->name();
    auto img = random_image(n, seed + e);
    double s = detail::time_median([&] { volatile auto c = tr->forward(img).size(); (void)c; }, repeats);
    CVec buf = to_complex(img).data;
    double f = detail::time_median(
        [&] {
          CVec w = buf;
          fft2_inplace(w.data(), n, n, -1);
        },
        repeats);
    times.x.push_back(e);
    times.y.push_back(s);
    ffts.x.push_back(e);
    ffts.y.push_back(f);
    logs.push_back(std::log(s));
  }
  double d = ls_slope(times.x, logs) / (2 * std::log(2.0));
  double c2 = 0, c3 = 0;
  for (std::size_t i = 0; i < times.x.size(); ++i) {
    c2 += times.y[i] / std::pow(std::ldexp(1.0, 2 * int(times.x[i])), d);
    c3 += times.y[i] / ffts.y[i];
  }
  rep.set("M_speed1", d);
  rep.set("M_speed2", c2 / times.x.size());
  rep.set("M_speed3", c3 / times.x.size());
  rep.curves = {times, ffts};
  return rep;
}

// ---- measure 7: geometric exactness ----

// Per scale, the mean over the edge suite of the largest coefficient in the
// aligned bands and in all other bands; M_geo are log slopes over scale.
// transposed swaps every normal, the same suite seen through the other cone.
inline MeasureReport m7_geometric(const Transform& tr, int min_scale = 1, double blur = 0.5, double window = 0.4,
                                  bool transposed = false) {
  MeasureReport rep;
  rep.id = 7;
  rep.title = "geometric exactness";
  rep.transform = tr.name();
  std::vector<int> scales;
  for (int j : tr.scales())
    if (j >= min_scale) scales.push_back(j);
  if (scales.size() < 2) throw std::invalid_argument("geometric measure needs two or more scales");
  auto normals = edge_normals();
  RVec hit(scales.size()), miss(scales.size());
  for (auto [a, b] : normals) {
    if (transposed) std::swap(a, b);
    auto c = tr.forward(edge_image(tr.size(), a, b, blur, window));
    for (std::size_t s = 0; s < scales.size(); ++s) {
      double h = 0, m = 0;
      for (const auto& band : tr.bands()) {
        if (band.lowpass || band.j != scales[s]) continue;
        double top = 0;
        for (std::size_t i = 0; i < band.count(); ++i) top = std::max(top, std::abs(c[band.offset + i]));
        double& slot = tr.aligned(band, a, b) ? h : m;
        slot = std::max(slot, top);
      }
      if (h == 0 || m == 0) throw NumericalError("edge suite left a scale without aligned or other bands");
      hit[s] += h / normals.size();
      miss[s] += m / normals.size();
    }
  }
  Curve sig{"significant", {}, {}}, insig{"insignificant", {}, {}};
  RVec lh, lm;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    sig.x.push_back(scales[s]);
    sig.y.push_back(hit[s]);
    insig.x.push_back(scales[s]);
    insig.y.push_back(miss[s]);
    lh.push_back(std::log(hit[s]));
    lm.push_back(std::log(miss[s]));
  }
  rep.set("M_geo1", ls_slope(sig.x, lh));
  rep.set("M_geo2", ls_slope(insig.x, lm));
  rep.curves = {sig, insig};
  return rep;
}

// ---- measure 8: stability under thresholding ----

inline CVec keep_largest(const CVec& c, double fraction) {
  std::size_t keep = std::min(c.size(), std::size_t(std::ceil(fraction * c.size())));
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + keep, idx.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(c[x]) > std::abs(c[y]); });
  CVec out(c.size());
  for (std::size_t i = 0; i < keep; ++i) out[idx[i]] = c[idx[i]];
  return out;
}

inline CVec hard_threshold(const CVec& c, double thr) {
  CVec out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) >= thr) out[i] = c[i];
  return out;
}

inline MeasureReport m8_stability(const Transform& tr, double variance, double tol, int maxiter) {
  MeasureReport rep;
  rep.id = 8;
  rep.title = "stability";
  rep.transform = tr.name();
  auto img = gaussian_image(tr.size(), variance);
  auto c = tr.forward(img);
  auto err = [&](const CVec& kept) { return rel_diff(tr.inverse(kept, tol, maxiter).data, img.data); };
  rep.set("keep_all", err(c));
  Curve t1{"thres1", {}, {}}, t2{"thres2", {}, {}};
  for (int p1 = 2; p1 <= 10; p1 += 2) {
    t1.x.push_back(p1);
    t1.y.push_back(err(keep_largest(c, std::ldexp(1.0, -p1))));
  }
  double m = 0;
  for (auto v : c) m = std::max(m, std::abs(v));
  for (double p2 : {0.001, 0.011, 0.021, 0.031, 0.041}) {
    t2.x.push_back(p2);
    t2.y.push_back(err(hard_threshold(c, m * (1 - std::pow(2.0, -p2)))));
  }
  rep.curves = {t1, t2};
  return rep;
}

// ---- configuration and dispatch ----

struct MeasureConfig {
  std::string method = "fdst";  // fdst | dsst | dnst | haar
  int size = 64;
  std::uint64_t seed = 42;
  int trials = 5;
  int oversampling = 8;
  int weights = 1;
  int scales = 3;
  double c1 = 1, c2 = 0.4;
  double tol = 1e-6;
  int maxiter = 500;
  double shear = 0.5;
  double blur = 0.5, window = 0.4;
  int min_scale = 1;
  double variance = 256;
  int repeats = 3;
  std::vector<int> exponents;  // empty: 5..9, 7..9 for dnst

  std::map<std::string, std::string> echo() const {
    std::map<std::string, std::string> m;
    auto num = [](double v) {
      std::ostringstream s;
      s.precision(17);
      s << v;
      return s.str();
    };
    m["method"] = method;
    m["size"] = std::to_string(size);
    m["seed"] = std::to_string(seed);
    m["trials"] = std::to_string(trials);
    m["oversampling"] = std::to_string(oversampling);
    m["weights"] = std::to_string(weights);
    m["scales"] = std::to_string(scales);
    m["c1"] = num(c1);
    m["c2"] = num(c2);
    m["tol"] = num(tol);
    m["maxiter"] = std::to_string(maxiter);
    m["shear"] = num(shear);
    m["blur"] = num(blur);
    m["window"] = num(window);
    m["min_scale"] = std::to_string(min_scale);
    m["variance"] = num(variance);
    m["repeats"] = std::to_string(repeats);
    return m;
  }
};

// fitted FDST plans are reused within a process (weight fitting dominates)
inline std::shared_ptr<const FdstPlan> fdst_plan_cached(int n, int r, int choice) {
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const FdstPlan>> cache;
  auto& p = cache[{n, r, choice}];
  if (!p) p = std::make_shared<const FdstPlan>(PPGridParams(n, r), choice);
  return p;
}

inline std::shared_ptr<const Transform> make_transform(const MeasureConfig& cfg, int n) {
  if (cfg.method == "fdst") return std::make_shared<FdstTransform>(fdst_plan_cached(n, cfg.oversampling, cfg.weights));
  if (cfg.method == "dsst") return std::make_shared<DsstTransform>(n, cfg.scales, cfg.c1, cfg.c2);
  if (cfg.method == "dnst") return std::make_shared<DnstTransform>(n, cfg.scales);
  if (cfg.method == "haar") return std::make_shared<HaarTransform>(n, cfg.scales);
  throw std::invalid_argument("unknown method " + cfg.method);
}

inline MeasureReport run_measure(int id, const MeasureConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  auto fdst_only = [&] {
    if (cfg.method != "fdst") throw std::invalid_argument("measure " + std::to_string(id) + " is defined for fdst only");
    return fdst_plan_cached(cfg.size, cfg.oversampling, cfg.weights);
  };
  MeasureReport rep;
  switch (id) {
    case 1:
      rep = m1_algebraic_exactness(fdst_only()->layout(), cfg.trials, cfg.seed);
      break;
    case 2: {
      auto plan = fdst_only();
      rep = m2_isometry(plan->ppft(), plan->weights(), cfg.trials, cfg.seed, cfg.tol);
      break;
    }
    case 3:
      rep = m3_parseval(*make_transform(cfg, cfg.size), cfg.trials, cfg.seed, cfg.tol, cfg.maxiter);
      break;
    case 4:
      rep = m4_space_frequency(measure_element(*make_transform(cfg, cfg.size)));
      break;
    case 5:
      rep = m5_shear_invariance(*fdst_only(), cfg.shear, cfg.blur, cfg.window);
      break;
    case 6: {
      auto exps = cfg.exponents;
      if (exps.empty()) exps = cfg.method == "dnst" ? std::vector<int>{7, 8, 9} : std::vector<int>{5, 6, 7, 8, 9};
      rep = m6_speed([&](int n) { return make_transform(cfg, n); }, exps, cfg.seed, cfg.repeats);
      break;
    }
    case 7:
      rep = m7_geometric(*make_transform(cfg, cfg.size), cfg.min_scale, cfg.blur, cfg.window);
      break;
    case 8:
      rep = m8_stability(*make_transform(cfg, cfg.size), cfg.variance, cfg.tol, cfg.maxiter);
      break;
    default:
      throw std::invalid_argument("measure id must be 1..8");
  }
  rep.transform = cfg.method;
  auto echo = cfg.echo();
  rep.config.insert(echo.begin(), echo.end());
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace shearlet
