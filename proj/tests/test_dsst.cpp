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

#include "oracles.hpp"
#include "shearlet/dsst.hpp"

using namespace shearlet;
using namespace shearlet::oracle;

namespace {

double inner(const RVec& a, const RVec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RVec random_rvec(std::size_t n, std::uint64_t seed) {
  Rng g(seed);
  RVec v(n);
  for (auto& x : v) x = g.normal();
  return v;
}

const DsstPlan& plan_for(int n, int scales, double c2) {
  static std::map<std::tuple<int, int, double>, std::unique_ptr<DsstPlan>> cache;
  auto& p = cache[{n, scales, c2}];
  if (!p) p = std::make_unique<DsstPlan>(n, scales, 1.0, c2);
  return *p;
}

}  // namespace

TEST(Maxflat, EndpointsAndHalfband) {
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(maxflat_magnitude(k, k, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(maxflat_magnitude(k, 3, 0.5), 0.0, 1e-15);
    for (int i = 0; i < 64; ++i) {
      double xi = i / 64.0;
      EXPECT_NEAR(maxflat_magnitude(k, k, xi) + maxflat_magnitude(k, k, xi + 0.5), 1.0, 1e-12);
    }
  }
}

TEST(Maxflat, LaurentCoefficientsMatchFormula) {
  for (auto [k, l] : {std::pair{2, 2}, {4, 4}, {3, 5}}) {
    RVec r = maxflat_coefficients(k, l);
    EXPECT_EQ(int(r.size()), 2 * (k + l - 1) + 1);
    for (int i = 0; i < 50; ++i) {
      double xi = i / 97.0, s = 0;
      for (int m = 0; m < int(r.size()); ++m) s += r[m] * std::cos(2 * kPi * (m - int(r.size()) / 2) * xi);
      EXPECT_NEAR(s, maxflat_magnitude(k, l, xi), 1e-13);
    }
  }
}

TEST(SpectralFactor, Trivial) {
  auto h = spectral_factorize({1.0});
  ASSERT_EQ(h.size(), 1);
  EXPECT_DOUBLE_EQ(h.v[0], 1.0);
}

TEST(SpectralFactor, RecoversMinimumPhaseFilter) {
  // zeros at -0.5 and 0.25 +- 0.3i, all inside the unit circle
  Taps h0;
  h0.v = {1.0, 0.0, 0.0, 0.0};
  std::vector<cplx> c{1.0};
  for (cplx r : {cplx(-0.5, 0), cplx(0.25, 0.3), cplx(0.25, -0.3)}) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = next;
  }
  for (int i = 0; i < 4; ++i) h0.v[i] = 0.7 * c[i].real();
  RVec mag2(7, 0.0);
  for (int m = -3; m <= 3; ++m)
    for (int i = 0; i < 4; ++i) mag2[m + 3] += h0(i) * h0(i + m);
  auto h = spectral_factorize(mag2);
  ASSERT_EQ(h.size(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(h.v[i], h0.v[i], 1e-12);
}

TEST(SpectralFactor, RejectsNegativeMagnitude) {
  EXPECT_THROW(spectral_factorize({0.6, -0.5, 0.6}), NumericalError);
}

TEST(FilterPair, MaxflatFourIsOrthonormal) {
  auto p = maxflat_pair(4);
  ASSERT_EQ(p.h.size(), 8);
  // the classical 8-tap Daubechies minimum phase lowpass
  EXPECT_NEAR(p.h.v[0], 0.2303778133088964, 1e-12);
  EXPECT_NEAR(p.h.v[7], -0.0105974017850690, 1e-12);
  double sum = std::accumulate(p.h.v.begin(), p.h.v.end(), 0.0);
  EXPECT_NEAR(sum, std::sqrt(2.0), 1e-13);
  for (int i = 0; i < 256; ++i) {
    double xi = i / 256.0;
    EXPECT_NEAR(std::norm(p.h.response(xi)), 2 * maxflat_magnitude(4, 4, xi), 1e-8);
  }
  for (int m = -3; m <= 3; ++m) {
    double hh = 0, gg = 0, hg = 0;
    for (int n = -10; n < 12; ++n) {
      hh += p.h(n) * p.h(n + 2 * m);
      gg += p.g(n) * p.g(n + 2 * m);
      hg += p.h(n) * p.g(n + 2 * m);
    }
    EXPECT_NEAR(hh, m == 0, 1e-12);
    EXPECT_NEAR(gg, m == 0, 1e-12);
    EXPECT_NEAR(hg, 0.0, 1e-12);
  }
  EXPECT_NEAR(std::abs(p.g.response(0.0)), 0.0, 1e-13);
  for (int n = p.g.start; n < p.g.stop(); ++n) EXPECT_DOUBLE_EQ(p.g(n), (n % 2 ? -1.0 : 1.0) * p.h(1 - n));
}

TEST(IteratedFilters, ProductsAndLengths) {
  auto p = maxflat_pair(4);
  auto f = iterated_filters(p, 4);
  EXPECT_EQ(f.h[1].v, p.h.v);
  EXPECT_EQ(f.g[1].v, p.g.v);
  EXPECT_EQ(f.g[1].start, p.g.start);
  for (int j = 1; j <= 4; ++j) {
    EXPECT_EQ(f.h[j].size(), (p.h.size() - 1) * ((1 << j) - 1) + 1);
    EXPECT_EQ(f.g[j].size(), (p.h.size() - 1) * ((1 << j) - 1) + 1);
  }
  for (int i = 0; i < 512; ++i) {
    double xi = i / 512.0;
    cplx h2 = p.h.response(xi) * p.h.response(2 * xi);
    cplx g2 = p.h.response(xi) * p.g.response(2 * xi);
    EXPECT_LT(std::abs(f.h[2].response(xi) - h2), 1e-12);
    EXPECT_LT(std::abs(f.g[2].response(xi) - g2), 1e-12);
  }
}

TEST(DigitalShear, ZeroShearIsIdentity) {
  auto f = iterated_filters(maxflat_pair(4), 4);
  auto img = random_image(32, 5);
  for (int level = 0; level <= 3; ++level) {
    auto out = digital_shear(img, level, 0, f);
    EXPECT_LT(rel_diff(out.data, img.data), 1e-10) << "level " << level;
  }
}

TEST(DigitalShear, ShearsAVerticalLine) {
  auto f = iterated_filters(maxflat_pair(4), 2);
  int n = 32;
  RealImage line(n);
  for (int c = 0; c < n; ++c) line.raw(0, c) = 1.0;
  auto out = digital_shear(line, 1, 1, f);
  for (int c = -n / 4; c < n / 4; c += 2) {
    int col = (c + n) % n, best = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(out.raw(r, col)) > std::abs(out.raw(best, col))) best = r;
    // the line moves to x1 = -k x2 / 2
    EXPECT_EQ(best, ((-c / 2) % n + n) % n) << "column " << c;
  }
}

TEST(DigitalShear, LinearAndAdjoint) {
  auto pair = maxflat_pair(4);
  auto f = iterated_filters(pair, 3);
  auto ker = shear_kernel(pair, 2);
  auto a = random_image(16, 1), b = random_image(16, 2), y = random_image(16, 3);
  RealImage m(16);
  for (int i = 0; i < 256; ++i) m.data[i] = 3 * a.data[i] - b.data[i];
  for (const ShearKernel* phi : std::vector<const ShearKernel*>{nullptr, &ker}) {
    auto sa = digital_shear(a, 2, 2, f, phi), sb = digital_shear(b, 2, 2, f, phi), sm = digital_shear(m, 2, 2, f, phi);
    RVec comb(256);
    for (int i = 0; i < 256; ++i) comb[i] = 3 * sa.data[i] - sb.data[i];
    EXPECT_LT(rel_diff(sm.data, comb), 1e-12);
    auto ty = digital_shear(y, 2, 2, f, phi, true);
    double lhs = inner(sa.data, y.data), rhs = inner(a.data, ty.data);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm2(a.data) * norm2(y.data));
  }
  // with the delta kernel the adjoint is the opposite shear
  auto ty = digital_shear(y, 2, 2, f, nullptr, true);
  EXPECT_LT(rel_diff(digital_shear(y, 2, -2, f).data, ty.data), 1e-14);
  EXPECT_THROW(digital_shear(a, 1, 3, f), std::out_of_range);
}

TEST(DigitalShear, CascadeKernelNearDeltaWithoutShear) {
  auto ker = shear_kernel(maxflat_pair(4), 0);
  EXPECT_NEAR(ker.at(0, 0), 1.0, 1e-3);
  double off = 0;
  for (int a = ker.start1; a < ker.start1 + ker.rows; ++a)
    for (int b = ker.start2; b < ker.start2 + ker.cols; ++b)
      if (a || b) off = std::max(off, std::abs(ker.at(a, b)));
  EXPECT_LT(off, 1e-3);
}

TEST(AnisoWavelet, MatchesDirectSum) {
  auto f = iterated_filters(maxflat_pair(4), 3);
  auto c = random_image(16, 8);
  auto w = aniso_wavelet(c, 2, 1, f);
  ASSERT_EQ(w.size(), 4u * 8u);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 8; ++b) {
      double s = 0;
      for (int m1 = 0; m1 < 16; ++m1)
        for (int m2 = 0; m2 < 16; ++m2)
          s += periodized(f.g[2], m1 - 4 * a, 16) * periodized(f.h[1], m2 - 2 * b, 16) * c.raw(m1, m2);
      EXPECT_NEAR(w[a * 8 + b], s, 1e-12);
    }
  RealImage flat(16);
  for (auto& x : flat.data) x = 2.5;
  for (double v : aniso_wavelet(flat, 2, 1, f)) EXPECT_NEAR(v, 0.0, 1e-12);
  // x2 stage first, then x1
  auto t = transpose(c);
  std::vector<int> p1{0, 4, 8, 12}, p2{0, 2, 4, 6, 8, 10, 12, 14};
  RVec swapped(32);
  separable_analysis(t, f.h[1], p2, f.g[2], p1, swapped.data());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 8; ++b) EXPECT_NEAR(swapped[b * 4 + a], w[a * 8 + b], 1e-12);
}

TEST(Dsst, MatchesMonolithicOracle) {
  for (double c2 : {1.0, 0.4}) {
    const auto& plan = plan_for(16, 2, c2);
    auto img = random_image(16, 21);
    auto c = dsst_forward(img, plan);
    for (const auto& b : plan.bands()) {
      auto direct = direct_band(img, plan, b);
      RVec got(c.begin() + b.offset, c.begin() + b.offset + b.count());
      double scale = norm2(direct);
      for (std::size_t i = 0; i < got.size(); ++i)
        ASSERT_NEAR(got[i], direct[i], 1e-10 * std::max(1.0, scale))
            << "cone " << b.cone << " j " << b.j << " k " << b.k << " c2 " << c2;
    }
  }
}

TEST(Dsst, ZeroImage) {
  const auto& plan = plan_for(32, 3, 0.4);
  for (double v : dsst_forward(RealImage(32), plan)) EXPECT_EQ(v, 0.0);
  for (double v : dsst_adjoint(RVec(plan.total()), plan).data) EXPECT_EQ(v, 0.0);
}

TEST(Dsst, BandLayout) {
  const auto& plan = plan_for(32, 3, 1.0);
  // scale j: 2^(ceil(j/2)+1) shears per cone
  std::map<std::pair<int, int>, std::vector<int>> shears;
  for (const auto& b : plan.bands())
    if (b.cone) shears[{b.cone, b.j}].push_back(b.k);
  EXPECT_EQ((shears[{1, 0}]), (std::vector<int>{-1, 0}));
  EXPECT_EQ((shears[{2, 0}]), (std::vector<int>{0, 1}));
  EXPECT_EQ((shears[{1, 2}]), (std::vector<int>{-2, -1, 0, 1}));
  EXPECT_EQ((shears[{2, 1}]), (std::vector<int>{-1, 0, 1, 2}));
  EXPECT_THROW(DsstPlan(32, 3, 1.0, 0.3), std::invalid_argument);
}

TEST(Dsst, RedundancyMatchesCount) {
  const auto& plan = plan_for(64, 5, 0.4);
  EXPECT_EQ(plan.total(), 13680u);
  EXPECT_DOUBLE_EQ(plan.redundancy(), dsst_redundancy(5, 1.0, 0.4));
  EXPECT_NEAR(plan.redundancy(), 10.0 / 3.0, 0.05 * 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(dsst_redundancy_limit(1.0, 0.4), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(dsst_redundancy_limit(1.0, 1.0), 4.0 / 3.0);
  EXPECT_NEAR(dsst_redundancy(5, 1.0, 0.4), 10.0 * 1026 / (3.0 * 1024), 1e-14);
  for (int scales = 1; scales <= 4; ++scales)
    EXPECT_DOUBLE_EQ(DsstPlan(32, scales, 1.0, 1.0).redundancy(), dsst_redundancy(scales, 1.0, 1.0));
}

TEST(Dsst, AdjointIdentity) {
  const auto& plan = plan_for(32, 3, 0.4);
  for (int t = 0; t < 20; ++t) {
    auto x = random_image(32, 100 + t);
    auto y = random_rvec(plan.total(), 200 + t);
    double lhs = inner(dsst_forward(x, plan), y), rhs = inner(x.data, dsst_adjoint(y, plan).data);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm2(x.data) * norm2(y));
  }
}

TEST(Dsst, NumericShearKernelKeepsAdjoint) {
  DsstPlan plan(16, 3, 1.0, 1.0, maxflat_pair(4), PhiMode::numeric);
  auto x = random_image(16, 4);
  auto y = random_rvec(plan.total(), 5);
  double lhs = inner(dsst_forward(x, plan), y), rhs = inner(x.data, dsst_adjoint(y, plan).data);
  EXPECT_LE(std::abs(lhs - rhs), 1e-12 * norm2(x.data) * norm2(y));
}

TEST(Dsst, ConjugateGradientRoundTrip) {
  const auto& plan = plan_for(64, 3, 0.4);
  auto img = random_image(64, 31);
  InverseInfo info;
  auto rec = dsst_inverse_cg(dsst_forward(img, plan), plan, 1e-9, 1000, &info);
  EXPECT_TRUE(info.converged);
  EXPECT_LT(rel_diff(rec.data, img.data), 1e-6);
}

TEST(Dsst, AlignedShearCarriesTheEdge) {
  int n = 64, scales = 3;
  const auto& plan = plan_for(n, scales, 1.0);
  DsstTransform tr(std::make_shared<DsstPlan>(n, scales, 1.0, 1.0));
  // edge with normal (a, b), b/a = -k / 2^s for k = 1 at the finest scale
  double a = 2, b = -1;
  RealImage img(n);
  for (int u = -n / 2; u < n / 2; ++u)
    for (int v = -n / 2; v < n / 2; ++v) {
      double r = std::hypot(u, v) / (0.4 * n);
      double bump = r < 1 ? std::pow(std::cos(kPi * r / 2), 2) : 0.0;
      img.at(u, v) = (a * u + b * v > 0 ? 1.0 : 0.0) * bump;
    }
  auto c = dsst_forward(img, plan);
  double hit = 0, miss = 0;
  for (const auto& band : tr.bands()) {
    if (band.lowpass || band.j != scales - 1) continue;
    double m = 0;
    for (std::size_t i = 0; i < band.count(); ++i) m = std::max(m, std::abs(c[band.offset + i]));
    (tr.aligned(band, a, b) ? hit : miss) = std::max(tr.aligned(band, a, b) ? hit : miss, m);
  }
  // db4 bands overlap heavily in angle: the aligned band wins by about 1.4x
  EXPECT_GT(hit, 1.3 * miss);
}
