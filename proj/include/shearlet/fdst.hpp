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

#include <memory>

#include "transform.hpp"
#include "weights.hpp"
#include "windows.hpp"

namespace shearlet {

class FdstPlan {
 public:
  FdstPlan(const PPGridParams& p, WeightTable w, BandPhase phase = BandPhase::relative)
      : ppft_(p), weights_(std::move(w)), layout_(p, phase) {
    if (!(weights_.params == p)) throw std::invalid_argument("weight table does not match grid");
    sqrt_w_.resize(weights_.values.size());
    for (std::size_t i = 0; i < sqrt_w_.size(); ++i) sqrt_w_[i] = std::sqrt(weights_.values[i]);
  }
  FdstPlan(const PPGridParams& p, int choice, BandPhase phase = BandPhase::relative)
      : FdstPlan(p, fit_weights(choice, p), phase) {}

  const PPGridParams& params() const { return ppft_.params(); }
  const PpftPlan& ppft() const { return ppft_; }
  const WeightTable& weights() const { return weights_; }
  const SubbandLayout& layout() const { return layout_; }

  void scale_sqrt(PPArray& a) const {
    for (std::size_t i = 0; i < sqrt_w_.size(); ++i) {
      a.s1[i] *= sqrt_w_[i];
      a.s2[i] *= sqrt_w_[i];
    }
  }

 private:
  PpftPlan ppft_;
  WeightTable weights_;
  SubbandLayout layout_;
  RVec sqrt_w_;
};

inline CVec fdst_forward(const CImage& img, const FdstPlan& plan) {
  auto a = ppft_fast(img, plan.ppft());
  plan.scale_sqrt(a);
  return window_apply(a, plan.layout());
}

inline CVec fdst_forward(const RealImage& img, const FdstPlan& plan) { return fdst_forward(to_complex(img), plan); }

// exact adjoint of fdst_forward for the Euclidean inner products
inline CImage fdst_adjoint(const CVec& c, const FdstPlan& plan) {
  auto a = window_adjoint_stored(c, plan.layout());
  plan.scale_sqrt(a);
  return ppft_adjoint(a, plan.ppft());
}

// solves P* w P x = S* c; S* S equals the weighted Gram operator
inline RealImage fdst_inverse_cg(const CVec& c, const FdstPlan& plan, double tol = 1e-6, int maxiter = 200,
                                 InverseInfo* info = nullptr) {
  GramOperator g(plan.ppft(), plan.weights());
  auto b = fdst_adjoint(c, plan).data;
  auto res = conjugate_gradient([&](const CVec& x) { return g(x); }, b, tol, maxiter);
  CImage x(plan.params().n);
  x.data = res.x;
  if (info) {
    info->iterations = res.iterations;
    info->rel_residual = res.rel_residual;
    info->converged = res.converged;
    double im = 0;
    for (auto v : res.x) im += v.imag() * v.imag();
    info->imag_norm = std::sqrt(im);
  }
  return real_part(x);
}

// image of one analyzing element (position index 0) through the adjoint
inline CImage shearlet_image(const FdstPlan& plan, int cone, int j, int k) {
  int b = plan.layout().find(cone, j, k);
  if (b < 0) throw std::out_of_range("no such band");
  CVec c(plan.layout().total());
  c[plan.layout().bands()[b].offset] = 1.0;
  return fdst_adjoint(c, plan);
}

class FdstTransform : public Transform {
 public:
  explicit FdstTransform(std::shared_ptr<const FdstPlan> plan) : plan_(std::move(plan)) {
    for (const auto& b : plan_->layout().bands()) {
      BandInfo bi;
      bi.cone = b.cone;
      bi.j = b.j;
      bi.k = b.k;
      bi.rows = b.rows;
      bi.cols = b.cols;
      bi.offset = b.offset;
      bi.lowpass = b.scaling();
      bands_.push_back(bi);
    }
  }
  FdstTransform(int n, int r = 8, int choice = 1)
      : FdstTransform(std::make_shared<const FdstPlan>(PPGridParams(n, r), choice)) {}

  const FdstPlan& plan() const { return *plan_; }
  std::string name() const override { return "fdst"; }
  int size() const override { return plan_->params().n; }
  const std::vector<BandInfo>& bands() const override { return bands_; }
  CVec forward(const RealImage& img) const override { return fdst_forward(img, *plan_); }
  CImage adjoint(const CVec& c) const override { return fdst_adjoint(c, *plan_); }
  RealImage inverse(const CVec& c, double tol, int maxiter, InverseInfo* info) const override {
    return fdst_inverse_cg(c, *plan_, tol, maxiter, info);
  }
  // Cones 2x carry directions with |omega2| <= |omega1|; the band (j,k) covers
  // slopes omega2/omega1 near -k 2^-j. For a direction (a,b) in frequency
  // the matching band has |k + 2^j b/a| < 1.
  bool aligned(const BandInfo& band, double a, double b) const override {
    if (band.lowpass || band.j < 0) return false;
    double scale = std::ldexp(1.0, band.j);
    if (band.cone / 10 == 2) return std::abs(a) >= std::abs(b) && std::abs(band.k + scale * b / a) <= 1 + 1e-9;
    return std::abs(b) >= std::abs(a) && std::abs(band.k + scale * a / b) <= 1 + 1e-9;
  }
  std::vector<int> scales() const override {
    std::vector<int> s;
    for (int j = plan_->layout().jl(); j <= plan_->layout().jh(); ++j) s.push_back(j);
    return s;
  }

 private:
  std::shared_ptr<const FdstPlan> plan_;
  std::vector<BandInfo> bands_;
};

}  // namespace shearlet
