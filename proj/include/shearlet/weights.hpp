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
#include <sstream>

#include "linalg.hpp"
#include "ppft.hpp"

namespace shearlet {

// A weight basis is a family of nonnegative functions on the grid that are
// invariant under sign changes and the coordinate swap. Such a function only
// depends on (|n|, |l|), so the basis is described by a map from (|n|, |l|)
// to (function index, value); index -1 means no function covers the point.
struct WeightBasis {
  int choice = 0;  // 1, 2 or 0 for a custom basis
  PPGridParams params;
  int count = 0;
  std::function<std::pair<int, double>(int, int)> member;

  // values of basis function j laid out like a sector (both sectors agree)
  RVec table(int j) const {
    RVec t(params.sector_size());
    for (int k = -params.half_rows(); k <= params.half_rows(); ++k)
      for (int l = -params.n / 2; l <= params.n / 2; ++l) {
        auto [idx, val] = member(std::abs(k), std::abs(l));
        if (idx == j) t[params.index(k, l)] = val;
      }
    return t;
  }
};

inline WeightBasis basis_choice1(const PPGridParams& p) {
  WeightBasis b{1, p, 5, {}};
  int edge = p.half_rows(), seam = p.n / 2;
  b.member = [edge, seam](int k, int l) -> std::pair<int, double> {
    if (k == 0) return {0, 1.0};
    if (k == edge) return {l == seam ? 1 : 2, 1.0};
    return {l == seam ? 3 : 4, double(k)};
  };
  return b;
}

// radial lines indexed by |l|; the rings |n| = 1 and |n| = RN/2 are folded
// into the line through them
inline WeightBasis basis_choice2(const PPGridParams& p) {
  WeightBasis b{2, p, p.n / 2 + 2, {}};
  b.member = [](int k, int l) -> std::pair<int, double> {
    if (k == 0) return {0, 1.0};
    return {l + 1, double(k)};
  };
  return b;
}

inline WeightBasis make_basis(int choice, const PPGridParams& p) {
  if (choice == 1) return basis_choice1(p);
  if (choice == 2) return basis_choice2(p);
  throw std::invalid_argument("weight choice must be 1 or 2");
}

struct WeightTable {
  PPGridParams params;
  int choice = 0;
  std::vector<double> coeffs;
  RVec values;            // w at each stored index, same for both sectors
  double residual = 0;    // max abs deviation over the isometry equations
  double lsq_residual = 0;

  double at(int k, int l) const { return values[params.index(k, l)]; }

  static WeightTable unit(const PPGridParams& p) {
    WeightTable w;
    w.params = p;
    w.values.assign(p.sector_size(), 1.0);
    return w;
  }
};

namespace detail {

// cos(2 pi t / den) for integer t, via a table
struct CosTable {
  long den;
  RVec c;
  explicit CosTable(long d) : den(d), c(d) {
    for (long t = 0; t < d; ++t) c[t] = std::cos(2.0 * kPi * double(t) / double(d));
  }
  double operator()(long t) const { return c[((t % den) + den) % den]; }
};

// Nonnegative least squares on the normal equations G x = r (Lawson-Hanson).
inline Eigen::VectorXd nnls_normal(const Eigen::MatrixXd& G, const Eigen::VectorXd& r) {
  int n = int(r.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> active(n, false);
  double tol = 1e-12 * r.cwiseAbs().maxCoeff();
  for (int outer = 0; outer < 10 * n + 10; ++outer) {
    Eigen::VectorXd w = r - G * x;
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (!active[j] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    if (best < 0) break;
    active[best] = true;
    for (int inner = 0; inner < 10 * n + 10; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j)
        if (active[j]) idx.push_back(j);
      int m = int(idx.size());
      Eigen::MatrixXd gp(m, m);
      Eigen::VectorXd rp(m);
      for (int a = 0; a < m; ++a) {
        rp[a] = r[idx[a]];
        for (int b = 0; b < m; ++b) gp(a, b) = G(idx[a], idx[b]);
      }
      Eigen::VectorXd z = gp.ldlt().solve(rp);
      if (!z.allFinite()) throw NumericalError("singular normal equations in weight fit");
      if (z.minCoeff() > 0) {
        x.setZero();
        for (int a = 0; a < m; ++a) x[idx[a]] = z[a];
        break;
      }
      double step = 1.0;
      for (int a = 0; a < m; ++a)
        if (z[a] <= 0) step = std::min(step, x[idx[a]] / (x[idx[a]] - z[a]));
      for (int a = 0; a < m; ++a) {
        int j = idx[a];
        x[j] += step * (z[a] - x[j]);
        if (x[j] <= 1e-300) {
          x[j] = 0;
          active[j] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace detail

// Tables T_j(u,v), u,v in [0,N-1], of the isometry condition
//   sum over distinct points of w(w1,w2) cos(2 pi u w1/m0) cos(2 pi v w2/m0) = delta(u,v)
// for each basis function. Points are grouped in orbits of the 8 symmetries.
inline std::vector<Eigen::MatrixXd> isometry_tables(const WeightBasis& basis) {
  const auto& p = basis.params;
  int n = p.n, half = p.half_rows();
  long den = long(n) * (long(p.r) * n + 1);
  detail::CosTable ct(den);
  std::vector<Eigen::MatrixXd> tab(basis.count, Eigen::MatrixXd::Zero(n, n));
  // center
  {
    auto [idx, val] = basis.member(0, 0);
    if (idx >= 0) tab[idx].array() += val;
  }
  Eigen::MatrixXd ca(n, half);
  std::vector<Eigen::MatrixXd> bsum(basis.count, Eigen::MatrixXd::Zero(n, half));
  std::vector<bool> used(basis.count, false);
  for (int k = 1; k <= half; ++k) {
    for (int u = 0; u < n; ++u) ca(u, k - 1) = ct(long(u) * k * n);
    for (int l = 0; l <= n / 2; ++l) {
      auto [idx, val] = basis.member(k, l);
      if (idx < 0 || val == 0) continue;
      used[idx] = true;
      double f = (l == 0 || l == n / 2) ? 0.5 : 1.0;
      for (int v = 0; v < n; ++v) bsum[idx](v, k - 1) += f * val * ct(2L * v * l * k);
    }
  }
  for (int j = 0; j < basis.count; ++j) {
    if (!used[j]) continue;
    Eigen::MatrixXd prod = ca * bsum[j].transpose();
    tab[j] += 4.0 * (prod + prod.transpose());
  }
  return tab;
}

inline WeightTable fit_weights(const WeightBasis& basis) {
  const auto& p = basis.params;
  int n = p.n, nb = basis.count;
  auto tab = isometry_tables(basis);
  // equations for (u,v) and (+-u, +-v) coincide: weight 2 per nonzero coordinate
  Eigen::MatrixXd mult = Eigen::MatrixXd::Constant(n, n, 4.0);
  mult.row(0) /= 2;
  mult.col(0) /= 2;
  Eigen::MatrixXd gram(nb, nb);
  Eigen::VectorXd rhs(nb);
  for (int a = 0; a < nb; ++a) {
    rhs[a] = tab[a](0, 0);
    for (int b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = (mult.array() * tab[a].array() * tab[b].array()).sum();
  }
  Eigen::VectorXd scale(nb);
  for (int a = 0; a < nb; ++a) {
    if (!(gram(a, a) > 0)) {
      std::ostringstream os;
      os << "weight basis function " << a << " has no support";
      throw NumericalError(os.str());
    }
    scale[a] = 1.0 / std::sqrt(gram(a, a));
  }
  Eigen::MatrixXd gs = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::VectorXd rs = scale.asDiagonal() * rhs;
  Eigen::VectorXd c = detail::nnls_normal(gs, rs).cwiseProduct(scale);

  WeightTable w;
  w.params = p;
  w.choice = basis.choice;
  w.coeffs.assign(c.data(), c.data() + nb);
  Eigen::MatrixXd fit = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < nb; ++a) fit += c[a] * tab[a];
  fit(0, 0) -= 1.0;
  w.residual = fit.cwiseAbs().maxCoeff();
  w.lsq_residual = std::sqrt((mult.array() * fit.array().square()).sum());
  w.values.assign(p.sector_size(), 0.0);
  for (int k = -p.half_rows(); k <= p.half_rows(); ++k)
    for (int l = -n / 2; l <= n / 2; ++l) {
      auto [idx, val] = basis.member(std::abs(k), std::abs(l));
      double v = idx >= 0 ? c[idx] * val : 0.0;
      if (v < 0) {
        std::ostringstream os;
        os << "negative fitted weight " << v << " at (" << k << "," << l << ")";
        throw NumericalError(os.str());
      }
      w.values[p.index(k, l)] = v;
    }
  return w;
}

inline WeightTable fit_weights(int choice, const PPGridParams& p) { return fit_weights(make_basis(choice, p)); }

enum class WeightMode { sqrt, full };

inline PPArray apply_weights(const PPArray& a, const WeightTable& w, WeightMode mode) {
  if (!(a.params == w.params)) throw std::invalid_argument("weight table does not match array");
  PPArray out(a);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    double f = mode == WeightMode::sqrt ? std::sqrt(w.values[i]) : w.values[i];
    out.s1[i] *= f;
    out.s2[i] *= f;
  }
  return out;
}

// x -> P^* diag(w / multiplicity) P x, the weighted Gram operator on images
class GramOperator {
 public:
  GramOperator(const PpftPlan& plan, const WeightTable& w) : plan_(plan), scale_(w.values) {
    auto m = multiplicity_table(plan.params());
    for (std::size_t i = 0; i < scale_.size(); ++i) scale_[i] /= m[i];
  }
  CImage operator()(const CImage& x) const {
    auto a = ppft_fast(x, plan_);
    for (std::size_t i = 0; i < scale_.size(); ++i) {
      a.s1[i] *= scale_[i];
      a.s2[i] *= scale_[i];
    }
    return ppft_adjoint(a, plan_);
  }
  CVec operator()(const CVec& x) const {
    CImage img(plan_.params().n);
    img.data = x;
    return (*this)(img).data;
  }

 private:
  const PpftPlan& plan_;
  RVec scale_;
};

inline Extremes gram_condition(const PpftPlan& plan, const WeightTable& w, double tol = 1e-4, int maxiter = 500,
                               std::uint64_t seed = 1) {
  GramOperator g(plan, w);
  int n = plan.params().n;
  auto e = lanczos_extremes([&](const CVec& x) { return g(x); }, std::size_t(n) * n, seed, tol, maxiter);
  if (!e.converged) throw NumericalError("eigenvalue iteration did not converge");
  return e;
}

}  // namespace shearlet
