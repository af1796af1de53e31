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

#include <gtest/gtest.h>

#include "shearlet/windows.hpp"

using namespace shearlet;

TEST(Windows, Ramp) {
  EXPECT_EQ(nu(0.0), 0.0);
  EXPECT_NEAR(nu(1.0), 1.0, 1e-15);
  EXPECT_EQ(nu(-0.5), 0.0);
  EXPECT_EQ(nu(1.5), 1.0);
  for (double x : {0.1, 0.25, 0.7}) EXPECT_NEAR(nu(x) + nu(1 - x), 1.0, 1e-14);
}

TEST(Windows, PartitionIdentities) {
  WindowSpec s;
  EXPECT_EQ(s.w0(0), 1.0);
  EXPECT_NEAR(s.w0(1), 0.0, 1e-15);
  for (double x : {0.3, 0.8, 1.0}) EXPECT_NEAR(s.w0(x) * s.w0(x) + s.w(x) * s.w(x), 1.0, 1e-14);
  for (double x : {-0.5, 0.0, 0.9}) {
    double a = s.v(x - 1), b = s.v(x), c = s.v(x + 1);
    EXPECT_NEAR(a * a + b * b + c * c, 1.0, 1e-14);
  }
  // continuity at the knots
  for (double k : {0.25, 1.0, 4.0}) {
    EXPECT_NEAR(s.w(k - 1e-12), s.w(k + 1e-12), 1e-10);
    EXPECT_NEAR(s.w0(k - 1e-12), s.w0(k + 1e-12), 1e-10);
  }
  EXPECT_NEAR(s.w(0.25), 0.0, 1e-15);
  EXPECT_NEAR(s.w(4.0), 0.0, 1e-15);
  EXPECT_NEAR(s.v(1.0), 0.0, 1e-15);
  EXPECT_EQ(window_values(s, Window::V0, 0.3), 1.0);
  EXPECT_EQ(window_values(s, Window::W, 2.0), s.w(2.0));
}

TEST(Windows, TelescopingAndShearPartition) {
  PPGridParams p(64, 8);
  SubbandLayout lay(p);
  WindowSpec s;
  for (int n = 0; n <= p.half_rows(); ++n) {
    double xi = 2.0 * n / p.r;
    double w0 = s.w0(std::ldexp(xi, -2 * lay.jl()));
    double sum = w0 * w0;
    for (int j = lay.jl(); j <= lay.jh(); ++j) sum += std::pow(s.w(std::ldexp(xi, -2 * j)), 2);
    EXPECT_NEAR(sum, 1.0, 1e-13) << n;
  }
  for (int j = 0; j <= lay.jh(); ++j)
    for (int l = -32; l <= 32; ++l) {
      double sum = 0;
      for (int k = -(1 << j); k <= (1 << j); ++k) sum += std::pow(s.v(k - std::ldexp(l, j + 1) / 64.0), 2);
      EXPECT_NEAR(sum, 1.0, 1e-13);
    }
}

TEST(Windows, LayoutSizes) {
  SubbandLayout lay(PPGridParams(16, 8));
  EXPECT_EQ(lay.jl(), -1);
  EXPECT_EQ(lay.jh(), 2);
  for (const auto& b : lay.bands()) {
    if (b.scaling()) {
      EXPECT_EQ(b.rows, 3);
      EXPECT_EQ(b.cols, 17);
      continue;
    }
    if (b.j > lay.jl() && b.j < lay.jh()) {
      EXPECT_EQ(b.rows, int(std::ldexp(1.0, 2 * (b.j - 1)) * 15 * 8 / 2) + 1);
    }
    if (b.j == lay.jl()) {
      EXPECT_EQ(b.rows, 4);
    }
    if (b.j == lay.jh()) {
      EXPECT_EQ(b.rows, 64 - 16 + 1);
    }
    int want = b.j < 0 ? 17 : (std::abs(b.k) == (1 << b.j) ? (16 >> b.j) / 2 + 1 : (16 >> b.j) + 1);
    EXPECT_EQ(b.cols, want);
  }
  // bands: 2 scaling + 4 cones * (1 + 3 + 5 + 9)
  EXPECT_EQ(lay.bands().size(), 2u + 4u * 18u);
  EXPECT_THROW(SubbandLayout(PPGridParams(16, 4)), std::invalid_argument);
  EXPECT_THROW(SubbandLayout(PPGridParams(12, 8)), std::invalid_argument);
}

TEST(Windows, Redundancy) {
  SubbandLayout lay(PPGridParams(256, 8));
  RecordProperty("redundancy", std::to_string(lay.redundancy()));
  EXPECT_NEAR(lay.redundancy(), 71.0, 0.15 * 71.0);
  std::size_t sum = 0;
  for (const auto& b : lay.bands()) sum += b.count();
  EXPECT_EQ(sum, lay.total());
}

class WindowOps : public ::testing::TestWithParam<BandPhase> {};

TEST_P(WindowOps, MatchesInnerProducts) {
  PPGridParams p(16, 8);
  SubbandLayout lay(p, GetParam());
  auto J = random_pparray(p, 5);
  auto c = window_apply(J, lay);
  auto flat = J.flat();
  double worst = 0, scale = 0;
  for (std::size_t bi = 0; bi < lay.bands().size(); ++bi) {
    const auto& b = lay.bands()[bi];
    for (auto [r1, r2] : {std::pair{0, 0}, {b.rows - 1, b.cols - 1}, {b.rows / 2, 1 % b.cols}, {1 % b.rows, b.cols / 2}}) {
      auto sigma = shearlet_values(lay, int(bi), r1, r2);
      cplx direct = dot(flat, sigma.flat());
      cplx fast = c[b.offset + std::size_t(r1) * b.cols + r2];
      worst = std::max(worst, std::abs(direct - fast));
      scale = std::max(scale, std::abs(direct));
    }
  }
  EXPECT_LE(worst, 1e-12 * scale);
}

TEST_P(WindowOps, SupportOfElements) {
  PPGridParams p(16, 8);
  SubbandLayout lay(p, GetParam());
  int bi = lay.find(21, 1, 1);
  const auto& b = lay.bands()[bi];
  auto sigma = shearlet_values(lay, bi, 2, 3);
  for (int n = -p.half_rows(); n <= p.half_rows(); ++n)
    for (int l = -8; l <= 8; ++l) {
      bool inside = n >= b.rad_start && n < b.rad_start + b.rows && l >= b.ang_start && l < b.ang_start + b.cols;
      if (!inside) {
        EXPECT_EQ(sigma.at(2, n, l), cplx(0));
      }
      EXPECT_EQ(sigma.at(1, n, l), cplx(0));
    }
  // seam entries carry the 1/sqrt 2 factor
  int top = lay.find(21, 1, 2);
  auto s2 = shearlet_values(lay, top, 0, 0);
  const auto& tb = lay.bands()[top];
  int n = 20;
  double full = tb.rad_win[n - tb.rad_start] * tb.ang_win[tb.cols - 1] / std::sqrt(double(tb.count()));
  EXPECT_NEAR(std::abs(s2.at(2, n, 8)), full / std::sqrt(2.0), 1e-15);
}

TEST_P(WindowOps, ParsevalAndAdjoint) {
  PPGridParams p(64, 8);
  SubbandLayout lay(p, GetParam());
  for (int t = 0; t < 3; ++t) {
    auto J = random_pparray(p, 40 + t);
    auto c = window_apply(J, lay);
    double e = std::pow(norm2(c), 2), ej = std::pow(pp_norm(J), 2);
    EXPECT_LE(std::abs(e - ej), 1e-12 * ej);
    auto back = window_adjoint(c, lay);
    EXPECT_LE(rel_diff(back.flat(), J.flat()), 1e-12);
    auto y = random_cvec(lay.total(), 50 + t);
    cplx lhs = dot(c, y);
    cplx rhs = dot(J.flat(), window_adjoint_stored(y, lay).flat());
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm2(J.flat()) * norm2(y));
    cplx rhs2 = pp_dot(J, window_adjoint(y, lay));
    EXPECT_LE(std::abs(lhs - rhs2), 1e-12 * norm2(J.flat()) * norm2(y));
  }
  for (auto v : window_apply(PPArray(p), lay)) EXPECT_EQ(v, cplx(0));
}

TEST_P(WindowOps, OneHotGivesElement) {
  PPGridParams p(16, 8);
  SubbandLayout lay(p, GetParam());
  for (int bi : {0, 1, lay.find(12, 0, 1), lay.find(22, 2, -4)}) {
    const auto& b = lay.bands()[bi];
    CVec c(lay.total());
    c[b.offset + 1] = 1.0;
    auto a = window_adjoint_stored(c, lay);
    auto sigma = shearlet_values(lay, bi, 0, 1);
    EXPECT_LT(rel_diff(a.flat(), sigma.flat()), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Phase, WindowOps, ::testing::Values(BandPhase::relative, BandPhase::absolute));
