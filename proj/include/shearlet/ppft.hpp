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

#include "frft.hpp"

namespace shearlet {

class PpftPlan {
 public:
  explicit PpftPlan(const PPGridParams& p) : p_(p) {
    p_.validate();
    long len = long(p_.r) * p_.n + 1;
    for (int k = 0; k <= p_.half_rows(); ++k) frft_.emplace_back(p_.n + 1, -2.0 * k / (double(len) * p_.n));
  }

  const PPGridParams& params() const { return p_; }
  double alpha(int k) const { return -2.0 * k / ((double(p_.r) * p_.n + 1) * p_.n); }

  // frft along the angular axis for radial index k, or its adjoint
  void angular(int k, cplx* data, cplx* work, bool adjoint) const {
    const auto& f = frft_[std::abs(k)];
    bool neg = (k < 0) != adjoint;
    if (neg)
      f.apply_adjoint(data, data, work);
    else
      f.apply(data, data, work);
  }
  int work_size() const { return frft_[0].work_size(); }

 private:
  PPGridParams p_;
  std::vector<FrftPlan> frft_;
};

namespace detail {

// Sector computation: DFT of length RN+1 along axis b, frft along axis a.
// Sector 1 has (a,b) = (u,v), sector 2 has (a,b) = (v,u).
inline void ppft_sector(const CImage& img, const PpftPlan& plan, bool swap, CVec& out) {
  const auto& p = plan.params();
  int n = p.n, len = p.rows(), h = p.half_rows(), cols = p.cols();
  CVec line(len), spec(len), buf(len), work(plan.work_size());
  out.assign(p.sector_size(), 0.0);
  for (int a = -n / 2; a < n / 2; ++a) {
    std::fill(line.begin(), line.end(), cplx(0));
    for (int b = -n / 2; b < n / 2; ++b) line[b + h] = swap ? img.at(b, a) : img.at(a, b);
    centered_dft(line.data(), spec.data(), len, FFTW_FORWARD, buf.data());
    for (int k = -h; k <= h; ++k) out[std::size_t(k + h) * cols + (a + n / 2)] = spec[k + h];
  }
  for (int k = -h; k <= h; ++k) plan.angular(k, out.data() + std::size_t(k + h) * cols, work.data(), false);
}

inline void ppft_sector_adjoint(const CVec& in, const PpftPlan& plan, bool swap, CImage& img) {
  const auto& p = plan.params();
  int n = p.n, len = p.rows(), h = p.half_rows(), cols = p.cols();
  CVec tmp(in), line(len), spec(len), buf(len), work(plan.work_size());
  for (int k = -h; k <= h; ++k) plan.angular(k, tmp.data() + std::size_t(k + h) * cols, work.data(), true);
  for (int a = -n / 2; a < n / 2; ++a) {
    for (int k = -h; k <= h; ++k) line[k + h] = tmp[std::size_t(k + h) * cols + (a + n / 2)];
    centered_dft(line.data(), spec.data(), len, FFTW_BACKWARD, buf.data());
    for (int b = -n / 2; b < n / 2; ++b) (swap ? img.at(b, a) : img.at(a, b)) += spec[b + h];
  }
}

}  // namespace detail

inline PPArray ppft_fast(const CImage& img, const PpftPlan& plan) {
  if (img.n != plan.params().n) throw std::invalid_argument("image size does not match plan");
  PPArray out(plan.params());
  detail::ppft_sector(img, plan, false, out.s1);
  detail::ppft_sector(img, plan, true, out.s2);
  return out;
}

inline PPArray ppft_fast(const RealImage& img, const PpftPlan& plan) { return ppft_fast(to_complex(img), plan); }

// adjoint with respect to the plain sum over every stored entry
inline CImage ppft_adjoint(const PPArray& a, const PpftPlan& plan) {
  if (!(a.params == plan.params())) throw std::invalid_argument("array does not match plan");
  CImage img(plan.params().n);
  detail::ppft_sector_adjoint(a.s1, plan, false, img);
  detail::ppft_sector_adjoint(a.s2, plan, true, img);
  return img;
}

// O(N^4) evaluation of the sum at every grid point, phases reduced exactly
inline PPArray ppft_direct(const CImage& img, const PPGridParams& p) {
  if (img.n != p.n) throw std::invalid_argument("image size does not match params");
  // phase (u X + v Y) / (2N(RN+1)) with (X,Y) the grid point scaled by RN
  long den = 2L * p.n * (long(p.r) * p.n + 1);
  CVec table(den);
  for (long t = 0; t < den; ++t) table[t] = std::polar(1.0, -2.0 * kPi * double(t) / double(den));
  PPArray out(p);
  int n = p.n;
  for (int s = 1; s <= 2; ++s)
    for (int k = -p.half_rows(); k <= p.half_rows(); ++k)
      for (int l = -n / 2; l <= n / 2; ++l) {
        auto [x, y] = grid_point_scaled(p, s, k, l);
        cplx acc = 0;
        for (int u = -n / 2; u < n / 2; ++u)
          for (int v = -n / 2; v < n / 2; ++v) {
            long ph = ((u * x + v * y) % den + den) % den;
            acc += img.at(u, v) * table[ph];
          }
        out.at(s, k, l) = acc;
      }
  return out;
}

inline PPArray ppft_direct(const RealImage& img, const PPGridParams& p) { return ppft_direct(to_complex(img), p); }

}  // namespace shearlet
