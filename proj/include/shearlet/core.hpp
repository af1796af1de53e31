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

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace shearlet {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;

// thrown when an iteration or a fit breaks down (cli exit code 2)
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// square image, row-major, rows and columns indexed -n/2..n/2-1
template <typename T>
struct Image {
  int n = 0;
  std::vector<T> data;

  Image() = default;
  explicit Image(int side) : n(side), data(std::size_t(side) * side) {
    if (side <= 0 || side % 2) throw std::invalid_argument("image side must be even and positive");
  }
  T& at(int u, int v) { return data[std::size_t(u + n / 2) * n + (v + n / 2)]; }
  const T& at(int u, int v) const { return data[std::size_t(u + n / 2) * n + (v + n / 2)]; }
  // raw storage index (row, col) in 0..n-1
  T& raw(int r, int c) { return data[std::size_t(r) * n + c]; }
  const T& raw(int r, int c) const { return data[std::size_t(r) * n + c]; }
};

using RealImage = Image<double>;
using CImage = Image<cplx>;

inline CImage to_complex(const RealImage& a) {
  CImage out(a.n);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i];
  return out;
}

inline RealImage real_part(const CImage& a) {
  RealImage out(a.n);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i].real();
  return out;
}

inline RealImage transpose(const RealImage& a) {
  RealImage out(a.n);
  for (int r = 0; r < a.n; ++r)
    for (int c = 0; c < a.n; ++c) out.raw(c, r) = a.raw(r, c);
  return out;
}

// e^{-2 pi i t} with t reduced mod 1 first
inline cplx turn(double t) {
  t -= std::round(t);
  return std::polar(1.0, -2.0 * kPi * t);
}

inline bool is_pow2(long x) { return x > 0 && (x & (x - 1)) == 0; }

inline int ilog2(long x) {
  int r = 0;
  while ((1L << r) < x) ++r;
  return r;
}

// ---- vector helpers ----

template <typename V>
double norm2(const V& x) {
  double s = 0;
  for (const auto& e : x) s += std::norm(e);
  return std::sqrt(s);
}

inline cplx dot(const CVec& x, const CVec& y) {  // sum x * conj(y)
  cplx s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::conj(y[i]);
  return s;
}

template <typename V>
double rel_diff(const V& a, const V& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---- pseudo-polar grid ----

struct PPGridParams {
  int n = 0;  // image side N
  int r = 8;  // radial oversampling R

  PPGridParams() = default;
  PPGridParams(int n_, int r_) : n(n_), r(r_) { validate(); }

  void validate() const {
    if (n <= 0 || n % 2 || r <= 0 || r % 2) throw std::invalid_argument("N and R must be even and positive");
  }
  int rows() const { return r * n + 1; }  // n in [-RN/2, RN/2]
  int cols() const { return n + 1; }      // l in [-N/2, N/2]
  int half_rows() const { return r * n / 2; }
  // m0 = num/den
  long m0_num() const { return 2L * (long(r) * n + 1); }
  long m0_den() const { return r; }
  double m0() const { return double(m0_num()) / double(m0_den()); }
  std::size_t sector_size() const { return std::size_t(rows()) * cols(); }
  std::size_t index(int nn, int l) const {
    return std::size_t(nn + half_rows()) * cols() + std::size_t(l + n / 2);
  }
  bool operator==(const PPGridParams&) const = default;
};

struct PPArray {
  PPGridParams params;
  CVec s1, s2;

  PPArray() = default;
  explicit PPArray(const PPGridParams& p) : params(p), s1(p.sector_size()), s2(p.sector_size()) {}

  CVec& sector(int s) { return s == 1 ? s1 : s2; }
  const CVec& sector(int s) const { return s == 1 ? s1 : s2; }
  cplx& at(int s, int nn, int l) { return sector(s)[params.index(nn, l)]; }
  const cplx& at(int s, int nn, int l) const { return sector(s)[params.index(nn, l)]; }

  std::size_t size() const { return s1.size() + s2.size(); }
  // both sectors as one vector (sector 1 first)
  CVec flat() const {
    CVec v(s1);
    v.insert(v.end(), s2.begin(), s2.end());
    return v;
  }
  static PPArray from_flat(const PPGridParams& p, const CVec& v) {
    PPArray a(p);
    if (v.size() != a.size()) throw std::invalid_argument("flat size mismatch");
    std::copy(v.begin(), v.begin() + a.s1.size(), a.s1.begin());
    std::copy(v.begin() + a.s1.size(), v.end(), a.s2.begin());
    return a;
  }
};

inline void check_index(const PPGridParams& p, int sector, int nn, int l) {
  if ((sector != 1 && sector != 2) || std::abs(nn) > p.half_rows() || std::abs(l) > p.n / 2)
    throw std::out_of_range("pseudo-polar index out of range");
}

inline std::pair<double, double> grid_point(const PPGridParams& p, int sector, int nn, int l) {
  check_index(p, sector, nn, l);
  double rad = 2.0 * nn / p.r;
  double ang = -rad * (2.0 * l / p.n);
  return sector == 1 ? std::make_pair(ang, rad) : std::make_pair(rad, ang);
}

// grid point times R*N, exact in integers
inline std::pair<long, long> grid_point_scaled(const PPGridParams& p, int sector, int nn, int l) {
  check_index(p, sector, nn, l);
  long rad = 2L * nn * p.n;
  long ang = -4L * nn * l;
  return sector == 1 ? std::make_pair(ang, rad) : std::make_pair(rad, ang);
}

struct PointClass {
  bool center = false;
  bool seam = false;
  bool boundary = false;
  bool interior() const { return !center && !seam && !boundary; }
};

inline PointClass classify_point(const PPGridParams& p, int sector, int nn, int l) {
  check_index(p, sector, nn, l);
  PointClass c;
  c.center = nn == 0;
  c.seam = !c.center && std::abs(l) == p.n / 2;
  c.boundary = std::abs(nn) == p.half_rows();
  return c;
}

inline int multiplicity(const PPGridParams& p, int nn, int l) {
  if (nn == 0) return 2 * (p.n + 1);
  if (std::abs(l) == p.n / 2) return 2;
  return 1;
}

// multiplicity table laid out like one sector (identical for both)
inline RVec multiplicity_table(const PPGridParams& p) {
  RVec m(p.sector_size());
  for (int nn = -p.half_rows(); nn <= p.half_rows(); ++nn)
    for (int l = -p.n / 2; l <= p.n / 2; ++l) m[p.index(nn, l)] = multiplicity(p, nn, l);
  return m;
}

// <x,y> on the grid counting every distinct point once
inline cplx pp_dot(const PPArray& x, const PPArray& y) {
  const auto& p = x.params;
  cplx s = 0;
  for (int sec = 1; sec <= 2; ++sec)
    for (int nn = -p.half_rows(); nn <= p.half_rows(); ++nn)
      for (int l = -p.n / 2; l <= p.n / 2; ++l) {
        auto i = p.index(nn, l);
        s += x.sector(sec)[i] * std::conj(y.sector(sec)[i]) / double(multiplicity(p, nn, l));
      }
  return s;
}

inline double pp_norm(const PPArray& x) { return std::sqrt(pp_dot(x, x).real()); }

// ---- random numbers ----

// splitmix64, constants from Steele, Lea and Flood
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // open interval (0,1)
  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() {
    static const boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(std_normal, uniform());
  }

 private:
  std::uint64_t state_;
};

inline RealImage random_image(int n, std::uint64_t seed) {
  Rng g(seed);
  RealImage img(n);
  for (auto& x : img.data) x = g.normal();
  return img;
}

inline CVec random_cvec(std::size_t len, std::uint64_t seed) {
  Rng g(seed);
  CVec v(len);
  for (auto& x : v) {
    double re = g.normal();
    x = cplx(re, g.normal());
  }
  return v;
}

inline PPArray random_pparray(const PPGridParams& p, std::uint64_t seed) {
  return PPArray::from_flat(p, random_cvec(2 * p.sector_size(), seed));
}

}  // namespace shearlet
