// Copyright 2026 The lqscreen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "lqscreen/errors.hpp"

namespace lqscreen {

template <typename Scalar = double>
struct Tolerance {
  Scalar abs_x = Scalar(1e-10);
  Scalar abs_f = Scalar(1e-12);
  int max_iter = 200;

  void validate() const {
    if (!(abs_x > Scalar(0)) || !(abs_f > Scalar(0)) || max_iter < 1)
      throw DomainError("tolerance fields must be strictly positive");
  }
};

template <typename Scalar = double>
struct Bracket {
  Scalar lo;
  Scalar hi;
};

template <typename Scalar = double>
struct Maximum {
  Scalar argmax;
  Scalar value;
};

template <typename Scalar = double>
struct FixedPointResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  int iterations = 0;
  Scalar residual = Scalar(0);
};

template <typename Scalar = double>
struct OdePath {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
};

/// Root of f on a sign-changing bracket. Regula falsi steps, with a bisection
/// step whenever the previous step failed to halve the bracket.
template <typename Scalar, typename F>
Scalar find_root(F&& f, Bracket<Scalar> bracket,
                 const Tolerance<Scalar>& tol = Tolerance<Scalar>()) {
  using std::abs;
  tol.validate();
  if (!(bracket.lo < bracket.hi)) throw BracketError("bracket requires lo < hi");
  Scalar a = bracket.lo, b = bracket.hi;
  Scalar fa = f(a), fb = f(b);
  if (!std::isfinite(double(fa)) || !std::isfinite(double(fb)))
    throw DomainError("non-finite function value at bracket end");
  if (abs(fa) <= tol.abs_f) return a;
  if (abs(fb) <= tol.abs_f) return b;
  if ((fa > 0) == (fb > 0)) throw BracketError("no sign change on bracket");

  Scalar last_width = b - a;
  bool bisect = false;
  for (int it = 0; it < tol.max_iter; ++it) {
    Scalar x = a + (b - a) / Scalar(2);
    if (!bisect) {
      Scalar s = b - fb * (b - a) / (fb - fa);
      if (s > a && s < b) x = s;
    }
    Scalar fx = f(x);
    if (!std::isfinite(double(fx)))
      throw DomainError("non-finite function value inside bracket");
    if (abs(fx) <= tol.abs_f) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    Scalar width = b - a;
    if (width <= tol.abs_x) return abs(fa) <= abs(fb) ? a : b;
    bisect = width > last_width / Scalar(2);
    last_width = width;
  }
  throw ConvergenceError("find_root: iteration budget exhausted");
}

/// Maximum of f on [lo, hi]: a coarse scan locates the best grid cell, then
/// golden-section search refines inside its neighbours. Ties keep the
/// smallest argument.
template <typename Scalar, typename F>
Maximum<Scalar> maximize_scalar(F&& f, Scalar lo, Scalar hi,
                                const Tolerance<Scalar>& tol = Tolerance<Scalar>(),
                                int scan_points = 64) {
  tol.validate();
  if (!(lo < hi)) throw DomainError("maximize_scalar requires lo < hi");
  if (scan_points < 3) throw DomainError("scan needs at least 3 points");

  const Scalar step = (hi - lo) / Scalar(scan_points - 1);
  auto grid = [&](int k) { return k == scan_points - 1 ? hi : lo + step * Scalar(k); };
  Maximum<Scalar> best{lo, f(lo)};
  int best_k = 0;
  for (int k = 1; k < scan_points; ++k) {
    Scalar x = grid(k);
    Scalar v = f(x);
    if (v > best.value) {
      best = {x, v};
      best_k = k;
    }
  }

  Scalar a = grid(best_k > 0 ? best_k - 1 : 0);
  Scalar b = grid(best_k < scan_points - 1 ? best_k + 1 : scan_points - 1);
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = b - inv_phi * (b - a);
  Scalar x2 = a + inv_phi * (b - a);
  Scalar f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < tol.max_iter && (b - a) > tol.abs_x; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

/// Damped iteration x <- (1-d) x + d g(x) until ||x - g(x)||_inf <= abs_f.
template <typename Scalar, typename G>
FixedPointResult<Scalar> fixed_point(
    G&& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
    Scalar damping = Scalar(0.5),
    const Tolerance<Scalar>& tol = Tolerance<Scalar>()) {
  tol.validate();
  if (!(damping > Scalar(0)) || damping > Scalar(1))
    throw DomainError("damping must lie in (0, 1]");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = x0;
  for (int it = 0; it <= tol.max_iter; ++it) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gx = g(x);
    Scalar r = (x - gx).template lpNorm<Eigen::Infinity>();
    if (!std::isfinite(double(r))) throw DomainError("fixed_point: non-finite map value");
    if (r <= tol.abs_f) return {x, it, r};
    if (it == tol.max_iter) break;
    x = (Scalar(1) - damping) * x + damping * gx;
  }
  throw ConvergenceError("fixed_point: iteration budget exhausted",
                         x.template cast<double>());
}

/// Composite Simpson rule with an even number of panels.
template <typename Scalar, typename F>
Scalar integrate(F&& f, Scalar lo, Scalar hi, int n_panels = 512) {
  if (lo > hi) throw DomainError("integrate requires lo <= hi");
  if (n_panels < 2 || n_panels % 2 != 0)
    throw DomainError("Simpson rule needs an even panel count");
  if (lo == hi) return Scalar(0);
  const Scalar h = (hi - lo) / Scalar(n_panels);
  Scalar odd = 0, even = 0;
  for (int k = 1; k < n_panels; ++k) {
    Scalar v = f(lo + h * Scalar(k));
    if (k % 2) odd += v; else even += v;
  }
  return h / Scalar(3) * (f(lo) + f(hi) + Scalar(4) * odd + Scalar(2) * even);
}

/// Classic fixed-step RK4 from t0 to t1 (t1 < t0 integrates backward).
template <typename Scalar, typename Rhs>
OdePath<Scalar> integrate_ode(Rhs&& rhs, Scalar t0, Scalar y0, Scalar t1, int steps) {
  if (steps < 1) throw DomainError("integrate_ode needs at least one step");
  OdePath<Scalar> path;
  path.t.resize(steps + 1);
  path.y.resize(steps + 1);
  const Scalar h = (t1 - t0) / Scalar(steps);
  auto eval = [&](Scalar t, Scalar y) {
    Scalar v = rhs(t, y);
    if (!std::isfinite(double(v)))
      throw SingularityError("integrate_ode: non-finite derivative", double(t));
    return v;
  };
  Scalar y = y0;
  path.t[0] = t0;
  path.y[0] = y0;
  for (int k = 0; k < steps; ++k) {
    Scalar t = t0 + h * Scalar(k);
    Scalar k1 = eval(t, y);
    Scalar k2 = eval(t + h / 2, y + h / 2 * k1);
    Scalar k3 = eval(t + h / 2, y + h / 2 * k2);
    Scalar k4 = eval(t + h, y + h * k3);
    y += h / Scalar(6) * (k1 + 2 * k2 + 2 * k3 + k4);
    path.t[k + 1] = (k + 1 == steps) ? t1 : t0 + h * Scalar(k + 1);
    path.y[k + 1] = y;
  }
  return path;
}

}  // namespace lqscreen
