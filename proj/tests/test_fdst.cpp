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

#include "shearlet/fdst.hpp"

using namespace shearlet;

namespace {

const FdstPlan& plan_for(int n) {
  static std::map<int, std::unique_ptr<FdstPlan>> cache;
  auto& p = cache[n];
  if (!p) p = std::make_unique<FdstPlan>(PPGridParams(n, 8), 1);
  return *p;
}

}  // namespace

TEST(Fdst, ZeroAndLinear) {
  const auto& plan = plan_for(32);
  for (auto v : fdst_forward(RealImage(32), plan)) EXPECT_EQ(v, cplx(0));
  for (auto v : fdst_adjoint(CVec(plan.layout().total()), plan).data) EXPECT_EQ(v, cplx(0));
  auto a = random_image(32, 1), b = random_image(32, 2);
  RealImage m(32);
  for (int i = 0; i < 32 * 32; ++i) m.data[i] = 2 * a.data[i] - 0.5 * b.data[i];
  auto ca = fdst_forward(a, plan), cb = fdst_forward(b, plan), cm = fdst_forward(m, plan);
  CVec comb(ca.size());
  for (std::size_t i = 0; i < ca.size(); ++i) comb[i] = 2.0 * ca[i] - 0.5 * cb[i];
  EXPECT_LT(rel_diff(cm, comb), 1e-12);
}

TEST(Fdst, EnergyMatchesWeightedPpft) {
  const auto& plan = plan_for(32);
  auto img = random_image(32, 3);
  auto c = fdst_forward(img, plan);
  auto a = apply_weights(ppft_fast(img, plan.ppft()), plan.weights(), WeightMode::sqrt);
  double e1 = std::pow(norm2(c), 2), e2 = std::pow(pp_norm(a), 2);
  EXPECT_LE(std::abs(e1 - e2), 1e-12 * e2);
}

TEST(Fdst, AdjointIdentity) {
  const auto& plan = plan_for(32);
  for (int t = 0; t < 3; ++t) {
    CImage x(32);
    x.data = random_cvec(32 * 32, 10 + t);
    auto y = random_cvec(plan.layout().total(), 20 + t);
    cplx lhs = dot(fdst_forward(x, plan), y), rhs = dot(x.data, fdst_adjoint(y, plan).data);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm2(x.data) * norm2(y));
  }
}

RealImage uniform_image(int n, std::uint64_t seed) {
  Rng g(seed);
  RealImage img(n);
  for (auto& x : img.data) x = g.uniform();
  return img;
}

TEST(Fdst, NearIsometryRoundTrip) {
  // adjoint round trip error shrinks with N; 5e-3 is reached from N = 128
  for (auto [n, tol] : {std::pair{32, 1e-2}, {64, 1e-2}, {128, 5e-3}}) {
    const auto& plan = plan_for(n);
    auto img = uniform_image(n, 30 + n);
    auto c = fdst_forward(img, plan);
    auto back = fdst_adjoint(c, plan);
    double err = rel_diff(back.data, to_complex(img).data);
    RecordProperty("round_trip_" + std::to_string(n), std::to_string(err));
    EXPECT_LE(err, tol) << n;
    double ratio = std::pow(norm2(c), 2) / std::pow(norm2(img.data), 2);
    EXPECT_LE(std::abs(ratio - 1), tol);
  }
}

TEST(Fdst, ConjugateGradientInverse) {
  const auto& plan = plan_for(64);
  auto img = random_image(64, 7);
  auto c = fdst_forward(img, plan);
  InverseInfo info;
  auto rec = fdst_inverse_cg(c, plan, 1e-8, 200, &info);
  EXPECT_TRUE(info.converged);
  EXPECT_LE(info.iterations, 25);
  EXPECT_LE(rel_diff(rec.data, img.data), 1e-6);
  InverseInfo loose;
  fdst_inverse_cg(c, plan, 1e-1, 200, &loose);
  EXPECT_LT(loose.iterations, info.iterations);
  EXPECT_GT(loose.rel_residual, info.rel_residual);
}

TEST(Fdst, CgResidualsDecrease) {
  const auto& plan = plan_for(32);
  GramOperator g(plan.ppft(), plan.weights());
  auto b = random_cvec(32 * 32, 9);
  auto res = conjugate_gradient([&](const CVec& x) { return g(x); }, b, 1e-10, 100);
  ASSERT_TRUE(res.converged);
  for (std::size_t i = 1; i < res.history.size(); ++i) EXPECT_LT(res.history[i], res.history[i - 1] * 1.0001);
  auto gx = g(res.x);
  for (std::size_t i = 0; i < b.size(); ++i) gx[i] -= b[i];
  EXPECT_LE(norm2(gx), 1e-10 * norm2(b));
}

TEST(Fdst, ShearletImages) {
  const auto& plan = plan_for(256);
  auto a = shearlet_image(plan, 11, 4, 0), b = shearlet_image(plan, 12, 4, 0);
  double re = 0, im = 0;
  CImage s(256);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    s.data[i] = a.data[i] + b.data[i];
    re += std::norm(s.data[i].real());
    im += std::norm(s.data[i].imag());
  }
  EXPECT_LE(std::sqrt(im), 1e-10 * std::sqrt(re));
  // slope 0 in cone 1 oscillates along v and is elongated along u
  double inside = 0, total = 0;
  for (int u = -128; u < 128; ++u)
    for (int v = -128; v < 128; ++v) {
      double e = std::norm(s.at(u, v));
      total += e;
      if (std::abs(v) < 16) inside += e;
    }
  EXPECT_GT(inside / total, 0.5);
  // a unit coefficient maps to an image of norm at most one, and the
  // weighted ppft of that image keeps its norm
  double na = norm2(a.data);
  EXPECT_LE(na, 1.0);
  EXPECT_GT(na, 0.1);
  auto wa = apply_weights(ppft_fast(a, plan.ppft()), plan.weights(), WeightMode::sqrt);
  EXPECT_NEAR(pp_norm(wa) / na, 1.0, 0.1);
}
