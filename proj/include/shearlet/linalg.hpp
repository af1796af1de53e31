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

#include <Eigen/Dense>

#include <functional>

#include "core.hpp"

namespace shearlet {

struct CgResult {
  CVec x;
  int iterations = 0;
  double rel_residual = 0;
  bool converged = false;
  RVec history;  // relative residual after each step
};

// Conjugate gradients for a Hermitian positive definite operator.
template <typename Op>
CgResult conjugate_gradient(Op&& apply, const CVec& b, double tol, int maxiter, const CVec* x0 = nullptr) {
  CgResult res;
  std::size_t n = b.size();
  res.x = x0 ? *x0 : CVec(n, 0.0);
  double bnorm = norm2(b);
  if (bnorm == 0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  CVec r = b;
  if (x0) {
    CVec ax = apply(res.x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
  }
  CVec p = r;
  double rr = std::pow(norm2(r), 2);
  res.rel_residual = std::sqrt(rr) / bnorm;
  while (res.rel_residual > tol && res.iterations < maxiter) {
    CVec ap = apply(p);
    double pap = dot(ap, p).real();
    if (!(pap > 0)) throw NumericalError("operator is not positive definite in CG");
    double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr_new = std::pow(norm2(r), 2);
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++res.iterations;
    res.rel_residual = std::sqrt(rr) / bnorm;
    res.history.push_back(res.rel_residual);
  }
  res.converged = res.rel_residual <= tol;
  return res;
}

struct Extremes {
  double lmax = 0, lmin = 0, cond = 0;
  int iterations = 0;
  bool converged = false;
};

// Extreme eigenvalues of a Hermitian operator by Lanczos with full
// reorthogonalization. Stops when both end Ritz pairs have residual
// bound below tol times the Ritz value.
template <typename Op>
Extremes lanczos_extremes(Op&& apply, std::size_t dim, std::uint64_t seed, double tol = 1e-4,
                          int maxiter = 500) {
  Extremes out;
  std::vector<CVec> basis;
  std::vector<double> alpha, beta;
  CVec q = random_cvec(dim, seed);
  double qn = norm2(q);
  for (auto& e : q) e /= qn;
  int cap = int(std::min<std::size_t>(maxiter, dim));
  for (int k = 0; k < cap; ++k) {
    basis.push_back(q);
    CVec w = apply(q);
    double a = dot(w, q).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) {
        cplx c = dot(w, v);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * v[i];
      }
    double b = norm2(w);
    int m = k + 1;
    Eigen::VectorXd d(m), e(std::max(m - 1, 1));
    for (int i = 0; i < m; ++i) d[i] = alpha[i];
    for (int i = 0; i + 1 < m; ++i) e[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e.head(std::max(m - 1, 0)), Eigen::ComputeEigenvectors);
    const auto& ev = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    out.lmin = ev[0];
    out.lmax = ev[m - 1];
    out.iterations = m;
    double rmin = std::abs(b * vecs(m - 1, 0)), rmax = std::abs(b * vecs(m - 1, m - 1));
    bool exhausted = b <= 1e-13 * std::abs(out.lmax) || m == int(dim);
    if (m >= 2 && (exhausted || (rmin <= tol * std::abs(out.lmin) && rmax <= tol * std::abs(out.lmax)))) {
      out.converged = true;
      break;
    }
    if (exhausted) break;
    beta.push_back(b);
    for (auto& x : w) x /= b;
    q = std::move(w);
  }
  out.cond = out.lmax / out.lmin;
  return out;
}

}  // namespace shearlet
