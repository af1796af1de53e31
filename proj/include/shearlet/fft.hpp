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

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "core.hpp"

namespace shearlet {

// In-place complex FFTs through FFTW. sign -1: sum x e^{-2 pi i jk/n};
// sign +1: the same with +i, no normalization.
namespace detail {

class PlanCache {
 public:
  static PlanCache& get() {
    static PlanCache c;
    return c;
  }
  fftw_plan plan(int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lk(mu_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t len = std::size_t(rows) * cols;
    auto* buf = fftw_alloc_complex(len);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = rows == 1 ? fftw_plan_dft_1d(cols, buf, buf, sign, flags)
                            : fftw_plan_dft_2d(rows, cols, buf, buf, sign, flags);
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace detail

inline void fft_inplace(cplx* data, int n, int sign) {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(detail::PlanCache::get().plan(1, n, sign), d, d);
}

inline void fft2_inplace(cplx* data, int rows, int cols, int sign) {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(detail::PlanCache::get().plan(rows, cols, sign), d, d);
}

// Centered DFT of odd length L = 2K+1: out(k) = sum_j in(j) e^{sign 2 pi i jk/L},
// both indexed -K..K and stored at offset K. buf must hold L entries.
inline void centered_dft(const cplx* in, cplx* out, int len, int sign, cplx* buf) {
  int half = len / 2;
  for (int j = -half; j <= half; ++j) buf[(j + len) % len] = in[j + half];
  fft_inplace(buf, len, sign);
  for (int k = -half; k <= half; ++k) out[k + half] = buf[(k + len) % len];
}

}  // namespace shearlet
