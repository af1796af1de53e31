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

// Fractional Fourier transform of odd length m = 2h+1:
//   out(k) = sum_{j=-h..h} c(j) e^{-2 pi i j k alpha},  k = -h..h.
// Chirp-z: jk = (j^2 + k^2 - (k-j)^2)/2 turns the sum into a convolution.
class FrftPlan {
 public:
  FrftPlan(int length, double alpha) : m_(length), alpha_(alpha) {
    if (length <= 0 || length % 2 == 0) throw std::invalid_argument("frft length must be odd");
    int h = m_ / 2;
    p_ = 1;
    while (p_ < 2 * m_ - 1) p_ <<= 1;
    chirp_.resize(m_);
    for (int j = -h; j <= h; ++j) chirp_[j + h] = turn(0.5 * alpha_ * double(j) * j);
    kernel_.assign(p_, 0.0);
    for (int d = -2 * h; d <= 2 * h; ++d) kernel_[(d + p_) % p_] = std::conj(turn(0.5 * alpha_ * double(d) * d));
    fft_inplace(kernel_.data(), p_, FFTW_FORWARD);
  }

  int length() const { return m_; }
  double alpha() const { return alpha_; }

  // in and out may alias; work must hold p entries
  void apply(const cplx* in, cplx* out, cplx* work) const {
    std::fill(work, work + p_, cplx(0));
    for (int j = 0; j < m_; ++j) work[j] = in[j] * chirp_[j];
    fft_inplace(work, p_, FFTW_FORWARD);
    for (int i = 0; i < p_; ++i) work[i] *= kernel_[i];
    fft_inplace(work, p_, FFTW_BACKWARD);
    double scale = 1.0 / p_;
    for (int k = 0; k < m_; ++k) out[k] = work[k] * chirp_[k] * scale;
  }

  // frft with -alpha, via conjugation
  void apply_adjoint(const cplx* in, cplx* out, cplx* work) const {
    std::fill(work, work + p_, cplx(0));
    for (int j = 0; j < m_; ++j) work[j] = std::conj(in[j]) * chirp_[j];
    fft_inplace(work, p_, FFTW_FORWARD);
    for (int i = 0; i < p_; ++i) work[i] *= kernel_[i];
    fft_inplace(work, p_, FFTW_BACKWARD);
    double scale = 1.0 / p_;
    for (int k = 0; k < m_; ++k) out[k] = std::conj(work[k] * chirp_[k] * scale);
  }

  int work_size() const { return p_; }

  CVec operator()(const CVec& c) const {
    check(c);
    CVec out(m_), work(p_);
    apply(c.data(), out.data(), work.data());
    return out;
  }
  CVec adjoint(const CVec& c) const {
    check(c);
    CVec out(m_), work(p_);
    apply_adjoint(c.data(), out.data(), work.data());
    return out;
  }

 private:
  void check(const CVec& c) const {
    if (int(c.size()) != m_) throw std::invalid_argument("frft length mismatch");
  }
  int m_, p_;
  double alpha_;
  CVec chirp_, kernel_;
};

inline CVec frft(const CVec& c, double alpha) {
  if (c.size() % 2 == 0) throw std::invalid_argument("frft length must be odd");
  return FrftPlan(int(c.size()), alpha)(c);
}

inline CVec frft_adjoint(const CVec& c, double alpha) {
  if (c.size() % 2 == 0) throw std::invalid_argument("frft length must be odd");
  return FrftPlan(int(c.size()), alpha).adjoint(c);
}

// zero padding from even length n (indices -n/2..n/2-1) to odd m (-(m-1)/2..(m-1)/2)
inline CVec pad(const CVec& c, int m) {
  int n = int(c.size());
  if (n % 2 || m % 2 == 0 || m <= n) throw std::invalid_argument("pad needs even n < odd m");
  CVec out(m);
  int off = (m - 1) / 2 - n / 2;
  std::copy(c.begin(), c.end(), out.begin() + off);
  return out;
}

inline CVec pad_adjoint(const CVec& c, int n) {
  int m = int(c.size());
  if (n % 2 || m % 2 == 0 || m <= n) throw std::invalid_argument("pad_adjoint needs even n < odd m");
  int off = (m - 1) / 2 - n / 2;
  return CVec(c.begin() + off, c.begin() + off + n);
}

}  // namespace shearlet
