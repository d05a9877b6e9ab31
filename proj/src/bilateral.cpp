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

#include "lqscreen/bilateral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ψ·f written so that a vanishing density does not produce inf·0.
double weighted_virtual_surplus(const EconomyPrimitives& econ, double t, double phi, double b1) {
  const auto& d = econ.dist();
  return (econ.V(t) - econ.c(t) - phi) * d.pdf(t) - b1 * econ.mu_prime(t) * d.survival(t);
}

// Central difference of f at x on [lo, hi], one-sided at the ends.
template <typename F>
double clamped_derivative(F&& f, double x, double lo, double hi, double h) {
  double x0 = std::max(lo, x - h), x1 = std::min(hi, x + h);
  if (!(x1 > x0)) return 0.0;
  return (f(x1) - f(x0)) / (x1 - x0);
}

}  // namespace

const char* to_string(BoundaryFlag flag) {
  switch (flag) {
    case BoundaryFlag::interior: return "interior";
    case BoundaryFlag::corner_b1_zero: return "corner_b1_zero";
    case BoundaryFlag::corner_a_zero: return "corner_a_zero";
    case BoundaryFlag::corner_b1_cap: return "corner_b1_cap";
    case BoundaryFlag::empty_set: return "empty_set";
  }
  return "unknown";
}

const char* to_string(CutoffStatus status) {
  switch (status) {
    case CutoffStatus::interior: return "interior";
    case CutoffStatus::full: return "full";
    case CutoffStatus::empty: return "empty";
  }
  return "unknown";
}

double binding_ir_advance(const EconomyPrimitives& econ, double b1, double b0) {
  if (b1 < 0.0 || b0 < 0.0) throw DomainError("contract instruments must be non-negative");
  const double lo = econ.lowest(), K = econ.K();
  const double need = econ.c(lo) - b0 - b1 * econ.mu(lo);
  auto gap = [&](double a) { return a - need - econ.phi(K - a); };
  if (gap(0.0) >= 0.0) return 0.0;
  if (gap(K) <= 0.0) return K;
  Tolerance<double> tol{1e-14, 1e-15, 400};
  return find_root(gap, Bracket<double>{0.0, K}, tol);
}

double ir_slope_at_advance(const EconomyPrimitives& econ, double advance) {
  return -econ.mu(econ.lowest()) / (1.0 + econ.phi_ell(econ.K() - advance));
}

IrSlope ir_slope(const EconomyPrimitives& econ, double b1) {
  double a = binding_ir_advance(econ, b1);
  return {ir_slope_at_advance(econ, a), a <= 0.0 || a >= econ.K()};
}

double virtual_surplus(const EconomyPrimitives& econ, double theta, double a, double b1) {
  double h = econ.dist().hazard(theta);
  double rent = b1 * econ.mu_prime(theta);
  return econ.V(theta) - econ.c(theta) - econ.phi(econ.K() - a) - (rent == 0.0 ? 0.0 : rent * h);
}

Cutoff cutoff(const EconomyPrimitives& econ, double a, double b1, double shift,
              const Tolerance<double>& tol) {
  const double lo = econ.lowest(), hi = econ.highest();
  // A massless type has ψ = −∞ under a positive rent; only its sign matters.
  auto psi = [&](double t) {
    double v = virtual_surplus(econ, t, a, b1) + shift;
    return std::isinf(v) ? std::copysign(1.0, v) : v;
  };
  if (psi(lo) >= 0.0) return {lo, CutoffStatus::full};
  if (psi(hi) < 0.0) return {hi, CutoffStatus::empty};
  return {find_root(psi, Bracket<double>{lo, hi}, tol), CutoffStatus::interior};
}

ContractValue evaluate_contract(const EconomyPrimitives& econ, double a, double b1, int panels) {
  ContractValue out;
  out.contract = {a, 0.0, b1};
  out.cutoff = cutoff(econ, a, b1);
  if (out.cutoff.status == CutoffStatus::empty) return out;
  const auto& d = econ.dist();
  const double lo = out.cutoff.theta, hi = econ.highest();
  const double phi = econ.phi(econ.K() - a);
  auto& dec = out.decomposition;
  dec.productive_surplus = integrate(
      [&](double t) { return (econ.V(t) - econ.c(t)) * d.pdf(t); }, lo, hi, panels);
  dec.aggregate_financing_cost = phi * d.survival(lo);
  dec.aggregate_information_rent =
      b1 == 0.0 ? 0.0
                : integrate([&](double t) { return b1 * econ.mu_prime(t) * d.survival(t); },
                            lo, hi, panels);
  dec.advance_outlay = a;
  out.value = integrate([&](double t) { return weighted_virtual_surplus(econ, t, phi, b1); },
                        lo, hi, panels) -
              a;
  return out;
}

ContractValue principal_value(const EconomyPrimitives& econ, double b1, int panels) {
  return evaluate_contract(econ, binding_ir_advance(econ, b1), b1, panels);
}

double rent_schedule(const EconomyPrimitives& econ, double b1, double theta, int panels) {
  const double lo = econ.lowest();
  if (theta < lo || theta > econ.highest()) throw DomainError("type outside support");
  return integrate([&](double s) { return b1 * econ.mu_prime(s) - econ.c_prime(s); }, lo,
                   theta, panels);
}

double slope_upper_bound(const EconomyPrimitives& econ, double cap) {
  const double lo = econ.lowest();
  const double mu_lo = econ.mu(lo);
  if (!(mu_lo > 0.0)) return cap;
  return std::max(0.0, (econ.c(lo) + econ.phi(econ.K())) / mu_lo);
}

BilateralSolution solve_optimal(const EconomyPrimitives& econ, const SolveOptions& opts) {
  BilateralSolution sol;
  const double b_hi = slope_upper_bound(econ, opts.slope_cap);
  sol.slope_upper = b_hi;
  auto W = [&](double b1) { return principal_value(econ, b1, opts.panels).value; };

  double b1 = 0.0;
  if (b_hi > 0.0) b1 = maximize_scalar(W, 0.0, b_hi, opts.tol, opts.scan_points).argmax;

  ContractValue best = principal_value(econ, b1, opts.panels);
  sol.contract = best.contract;
  sol.cutoff = best.cutoff;
  sol.value = best.value;
  sol.decomposition = best.decomposition;

  const double edge = 1e-9 * std::max(1.0, b_hi);
  const bool capped = !(econ.mu(econ.lowest()) > 0.0);
  if (best.cutoff.status == CutoffStatus::empty)
    sol.boundary_flag = BoundaryFlag::empty_set;
  else if (b1 <= edge)
    sol.boundary_flag = BoundaryFlag::corner_b1_zero;
  else if (b1 >= b_hi - edge)
    sol.boundary_flag = capped ? BoundaryFlag::corner_b1_cap : BoundaryFlag::corner_a_zero;
  else if (best.contract.advance <= 0.0)
    sol.boundary_flag = BoundaryFlag::corner_a_zero;
  else
    sol.boundary_flag = BoundaryFlag::interior;

  auto rent = [&](double b) {
    return principal_value(econ, b, opts.panels).decomposition.aggregate_information_rent;
  };
  const double drent = clamped_derivative(rent, b1, 0.0, b_hi, opts.fd_step);
  const double da = ir_slope_at_advance(econ, sol.contract.advance);
  const double drent_da = da != 0.0 ? drent / da : kNaN;
  sol.foc_residual = econ.phi_ell(econ.K() - sol.contract.advance) - drent_da;
  sol.stationarity_residual = clamped_derivative(W, b1, 0.0, b_hi, opts.fd_step);
  return sol;
}

double closed_form_ell_star(double R) {
  if (R < 0.0 || !std::isfinite(R)) throw DomainError("tightness must be finite and >= 0");
  if (R <= 1e-12) return 1.0;
  // Rationalised form of (−1 + √(1 + 2R))/R, stable as R → 0.
  return 2.0 / (1.0 + std::sqrt(1.0 + 2.0 * R));
}

double closed_form_advance(double R, double K) {
  // ℓ solves ℓ + (R/2)ℓ² = K; scale by K for general working capital.
  if (K <= 0.0) throw DomainError("K must be positive");
  return K - K * closed_form_ell_star(R * K);
}

double pure_advance_value(const EconomyPrimitives& econ, int panels) {
  const double lo = econ.lowest(), hi = econ.highest(), K = econ.K();
  if (econ.V(hi) <= K) return 0.0;
  double start = lo;
  if (econ.V(lo) < K) {
    Tolerance<double> tol{1e-14, 1e-15, 400};
    start = find_root([&](double t) { return econ.V(t) - K; }, Bracket<double>{lo, hi}, tol);
  }
  const auto& d = econ.dist();
  return integrate([&](double t) { return (econ.V(t) - K) * d.pdf(t); }, start, hi, panels);
}

PureContingent pure_contingent_value(const EconomyPrimitives& econ, const SolveOptions& opts) {
  const double lo = econ.lowest(), mu_lo = econ.mu(lo);
  const double b_min =
      mu_lo > 0.0 ? std::max(0.0, (econ.c(lo) + econ.phi(econ.K())) / mu_lo) : 0.0;
  const double b_max = b_min + opts.slope_cap;
  auto W = [&](double b1) { return evaluate_contract(econ, 0.0, b1, opts.panels).value; };
  Maximum<double> m = maximize_scalar(W, b_min, b_max, opts.tol, opts.scan_points);
  ContractValue v = evaluate_contract(econ, 0.0, m.argmax, opts.panels);
  return {v.value, m.argmax, v.cutoff};
}

double crossing_threshold(const EconomyPrimitives& econ, const SolveOptions& opts) {
  const double wa = pure_advance_value(econ, opts.panels);
  auto gap = [&](double R) {
    return pure_contingent_value(econ.with_tightness(R), opts).value - wa;
  };
  if (!(gap(0.0) > 0.0))
    throw NotFoundError("contingent value does not exceed advance value at R = 0");
  double hi = 1.0;
  while (gap(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw NotFoundError("no crossing of contingent and advance values");
  }
  return find_root(gap, Bracket<double>{0.0, hi}, opts.tol);
}

double conditional_signal_mean(const EconomyPrimitives& econ, const Cutoff& cut, int panels) {
  if (cut.status == CutoffStatus::empty) return kNaN;
  const auto& d = econ.dist();
  double mass = d.survival(cut.theta);
  if (!(mass > 0.0)) return kNaN;
  return integrate([&](double t) { return econ.mu(t) * d.pdf(t); }, cut.theta,
                   econ.highest(), panels) /
         mass;
}

double cash_intensity(const EconomyPrimitives& econ, const Contract& k, const Cutoff& cut) {
  if (cut.status == CutoffStatus::empty) return kNaN;
  double paid = k.advance + (k.slope == 0.0 ? 0.0 : k.slope * conditional_signal_mean(econ, cut));
  if (!(paid > 0.0)) return kNaN;
  return k.advance / paid;
}

Sweep sweep_R(const EconomyPrimitives& econ, const std::vector<double>& R_grid,
              const SolveOptions& opts) {
  Sweep out;
  const double lo = econ.lowest(), hi = econ.highest();
  const double spread = (econ.V(hi) - econ.c(hi)) - (econ.V(lo) - econ.c(lo));
  for (double R : R_grid) {
    EconomyPrimitives e = econ.with_tightness(R);
    BilateralSolution sol = solve_optimal(e, opts);
    SweepRow row;
    row.R = R;
    row.a_star = sol.contract.advance;
    row.ell_star = e.K() - row.a_star;
    row.b1_star = sol.contract.slope;
    row.cutoff = sol.cutoff;
    row.flag = sol.boundary_flag;
    row.beta_star = cash_intensity(e, sol.contract, sol.cutoff);
    row.phi_share = e.phi(row.ell_star) / spread;
    row.W_M = sol.value;
    row.W_A = pure_advance_value(e, opts.panels);
    row.W_C = pure_contingent_value(e, opts).value;
    out.rows.push_back(row);
  }
  auto& diag = out.diagnostics;
  const auto& rows = out.rows;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    double s = (rows[k].a_star - rows[k - 1].a_star) / (rows[k].R - rows[k - 1].R);
    diag.first_differences.push_back(s);
    if (!(s > 0.0)) diag.advance_increasing = false;
  }
  for (std::size_t k = 1; k < diag.first_differences.size(); ++k) {
    double d2 = diag.first_differences[k] - diag.first_differences[k - 1];
    diag.second_differences.push_back(d2);
    if (!(d2 < 0.0)) diag.advance_concave = false;
  }
  return out;
}

SufficientStatistics sufficient_statistics(const EconomyPrimitives& econ,
                                           const BilateralSolution& sol,
                                           const SolveOptions& opts) {
  SufficientStatistics out;
  const double a = sol.contract.advance;
  out.marginal_financing_cost = econ.phi_ell(econ.K() - a);
  out.marginal_screening_return = out.marginal_financing_cost - sol.foc_residual;
  out.corner = sol.boundary_flag != BoundaryFlag::interior;
  (void)opts;
  return out;
}

InterceptComparison drop_intercept(const EconomyPrimitives& econ, double b0, double b1,
                                   int panels) {
  InterceptComparison out;
  const double a = binding_ir_advance(econ, b1, b0);
  if (a + b0 > econ.K()) throw DomainError("advance plus intercept exceeds working capital");
  out.original = {a, b0, b1};
  out.transformed = {a + b0, 0.0, b1};
  ContractValue v0 = evaluate_contract(econ, a, b1, panels);
  out.original_value = v0.cutoff.status == CutoffStatus::empty ? 0.0 : v0.value - b0;
  out.transformed_value = evaluate_contract(econ, a + b0, b1, panels).value;
  const double lo = econ.lowest();
  out.participation_slack =
      a + b0 + b1 * econ.mu(lo) - econ.c(lo) - econ.phi(econ.K() - a - b0);
  return out;
}

Contract calibrated_contract(const EconomyPrimitives& econ, double target,
                             const SolveOptions& opts) {
  if (!(target > 0.0)) throw DomainError("target cash intensity must be positive");
  const double b_hi = slope_upper_bound(econ, opts.slope_cap);
  auto beta = [&](double b1) {
    ContractValue v = principal_value(econ, b1, opts.panels);
    double x = cash_intensity(econ, v.contract, v.cutoff);
    return std::isfinite(x) ? x : -1.0;
  };
  auto make = [&](double b1) { return Contract{binding_ir_advance(econ, b1), 0.0, b1}; };
  if (beta(0.0) <= target) return make(0.0);
  if (beta(b_hi) >= target) return make(b_hi);
  Tolerance<double> tol{1e-12, 1e-14, 400};
  double b1 = find_root([&](double b) { return beta(b) - target; },
                        Bracket<double>{0.0, b_hi}, tol);
  return make(b1);
}

}  // namespace lqscreen
