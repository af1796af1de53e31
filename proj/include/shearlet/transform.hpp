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

#include <string>

#include "core.hpp"

namespace shearlet {

// one block of coefficients in a flat coefficient vector
struct BandInfo {
  int cone = 0;  // transform specific cone/orientation code; 0 for lowpass
  int j = 0, k = 0;
  int rows = 0, cols = 0;
  std::size_t offset = 0;
  bool lowpass = false;
  std::size_t count() const { return std::size_t(rows) * cols; }
};

struct InverseInfo {
  int iterations = 0;
  double rel_residual = 0;
  bool converged = true;
  double imag_norm = 0;
};

// Common contract used by the measures and the command line tool.
class Transform {
 public:
  virtual ~Transform() = default;
  virtual std::string name() const = 0;
  virtual int size() const = 0;
  virtual const std::vector<BandInfo>& bands() const = 0;
  std::size_t coeff_count() const {
    const auto& b = bands();
    return b.empty() ? 0 : b.back().offset + b.back().count();
  }
  virtual CVec forward(const RealImage& img) const = 0;
  virtual CImage adjoint(const CVec& c) const = 0;
  virtual RealImage inverse(const CVec& c, double tol, int maxiter, InverseInfo* info = nullptr) const = 0;
  // the band (cone, j, k) whose elements follow an edge with normal (a, b),
  // used for the geometric measure; returns true when band is aligned
  virtual bool aligned(const BandInfo& band, double a, double b) const = 0;
  // scale index used to group coefficients, finest scale last
  virtual std::vector<int> scales() const = 0;
};

}  // namespace shearlet
