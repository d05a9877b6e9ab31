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


#include "lqscreen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqscreen/errors.hpp"
#include "lqscreen/numerics.hpp"

namespace lqscreen {
namespace {

// Plain bisection on the lowest type's IR, kept apart from the solver's root
// finder. Returns the advance and the residual left after clamping.
struct IrPoint {
  double a;
  double residual;
};
IrPoint bisect_ir(const EconomyPrimitives& econ, double b1) {
  const double lo = econ.lowest(), K = econ.K();
  auto gap = [&](double a) {
    return a + b1 * econ.mu(lo) - econ.c(lo) - econ.phi(K - a);
  };
  double g0 = gap(0.0);
  if (g0 >= 0.0) return {0.0, g0};
  double gK = gap(K);
  if (gK <= 0.0) return {K, -gK};
  double x0 = 0.0, x1 = K;
  for (int it = 0; it < 200 && x1 - x0 > 1e-15; ++it) {
    double m = 0.5 * (x0 + x1);
    if (gap(m) < 0.0) x0 = m; else x1 = m;
  }
  double a = 0.5 * (x0 + x1);
  return {a, std::abs(gap(a))};
}

int count_sign_changes(const std::vector<double>& d, double zero) {
  int changes = 0, last = 0;
  for (double x : d) {
    int s = x > zero ? 1 : (x < -zero ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

double oracle_value(const EconomyPrimitives& econ, double a, double b1, int panels) {
  if (panels < 1) throw DomainError("oracle_value needs at least one panel");
  const auto& d = econ.dist();
  const double lo = econ.lowest(), hi = econ.highest();
  const double phi = econ.phi(econ.K() - a);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  bool any = false;
  for (int k = 0; k < panels; ++k) {
    double t = lo + (k + 0.5) * h;
    double g = (econ.V(t) - econ.c(t) - phi) * d.pdf(t) - b1 * econ.mu_prime(t) * d.survival(t);
    if (g >= 0.0) {
      sum += g * h;
      any = true;
    }
  }
  return any ? sum - a : 0.0;
}

GridSearchResult grid_search_optimal(const EconomyPrimitives& econ, int na, int nb, int panels) {
  if (na < 2 || nb < 2) throw DomainError("grid search needs at least two points per axis");
  const double lo = econ.lowest(), K = econ.K();
  const double mu_lo = econ.mu(lo);
  GridSearchResult out;
  const double top = mu_lo > 0.0 ? (econ.c(lo) + econ.phi(K)) / mu_lo : 10.0;
  out.b1_max = std::min(2.0 * std::max(top, 0.0), 10.0);
  out.best_W = -std::numeric_limits<double>::infinity();

  auto consider = [&](double a, double b1) {
    double w = oracle_value(econ, a, b1, panels);
    ++out.feasible_points;
    if (w > out.best_W) out = {a, b1, w, out.b1_max, out.feasible_points};
  };

  for (int j = 0; j < nb; ++j) {
    double b1 = out.b1_max * j / (nb - 1);
    IrPoint p = bisect_ir(econ, b1);
    if (p.residual <= 1e-6) consider(p.a, b1);
  }
  if (mu_lo > 0.0) {
    for (int i = 0; i < na; ++i) {
      double a = K * i / (na - 1);
      double b1 = (econ.c(lo) + econ.phi(K - a) - a) / mu_lo;
      if (b1 >= 0.0 && b1 <= out.b1_max) consider(a, b1);
    }
  }
  if (out.feasible_points == 0) throw NotFoundError("no IR-feasible grid point");
  return out;
}

void DiscreteMechanism::validate() const {
  const auto n = types.size();
  if (n == 0) throw DomainError("mechanism has no types");
  if (allocation.size() != n || advances.size() != n || slopes.size() != n)
    throw DomainError("mechanism fields must share the type grid");
  if (rents.size() != 0 && rents.size() != n) throw DomainError("rents must match the grid");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && !(types[i] > types[i - 1])) throw DomainError("types must be ascending");
    if (allocation[i] != 0 && allocation[i] != 1) throw DomainError("allocation must be 0/1");
    if (advances[i] < 0.0 || slopes[i] < 0.0) throw DomainError("limited liability violated");
  }
}

DiscreteMechanism uniform_mechanism(const EconomyPrimitives& econ, const Contract& k,
                                    const Cutoff& cut, int n) {
  if (n < 1) throw DomainError("mechanism needs at least one type");
  DiscreteMechanism m;
  const double lo = econ.lowest(), hi = econ.highest();
  if (n == 1)
    m.types = Eigen::VectorXd::Constant(1, lo);
  else
    m.types = Eigen::VectorXd::LinSpaced(n, lo, hi);
  m.allocation.resize(n);
  for (int i = 0; i < n; ++i) {
    bool on = cut.status == CutoffStatus::full ||
              (cut.status == CutoffStatus::interior && m.types[i] >= cut.theta);
    m.allocation[i] = on ? 1 : 0;
  }
  m.advances = Eigen::VectorXd::Constant(n, k.advance);
  m.slopes = Eigen::VectorXd::Constant(n, k.slope);
  return m;
}

double misreport_payoff(const DiscreteMechanism& mech, const EconomyPrimitives& econ, int i,
                        int j) {
  if (mech.allocation[j] == 0) return 0.0;
  const double t = mech.types[i];
  return mech.advances[j] + mech.slopes[j] * econ.mu(t) - econ.c(t) -
         econ.phi(econ.K() - mech.advances[j]);
}

IcReport ic_verify(const DiscreteMechanism& mech, const EconomyPrimitives& econ, double slack) {
  mech.validate();
  const int n = mech.size();
  Eigen::VectorXd own(n);
  for (int i = 0; i < n; ++i) own[i] = misreport_payoff(mech, econ, i, i);
  IcReport rep;
  for (int i = 0; i < n; ++i) {
    if (mech.allocation[i] == 1 && -own[i] > rep.worst_ir) rep.worst_ir = -own[i];
    for (int j = 0; j < n; ++j) {
      // Reporting an excluded type is the outside option; that is IR's job.
      if (j == i || mech.allocation[j] == 0) continue;
      double gain = misreport_payoff(mech, econ, i, j) - own[i];
      if (gain > rep.worst_violation) {
        rep.worst_violation = gain;
        rep.true_index = i;
        rep.report_index = j;
      }
    }
  }
  rep.ok = rep.worst_violation <= slack;
  rep.ir_ok = rep.worst_ir <= slack;
  return rep;
}

RentIdentity rent_identity_check(const EconomyPrimitives& econ, double a, double b1,
                                 double theta_hat, int panels) {
  const double lo = econ.lowest(), hi = econ.highest(), K = econ.K();
  if (theta_hat < lo || theta_hat > hi) throw DomainError("cutoff outside support");
  if (panels % 2) ++panels;
  const auto& d = econ.dist();
  const double base_b1 = b1 * econ.mu(lo);
  const double base = a + base_b1 - econ.c(lo) - econ.phi(K - a);
  const int inner = std::max(2, panels / 2 + (panels / 2) % 2);

  // U(θ) and its slope part, each by its own quadrature from θ̲.
  auto U = [&](double t) {
    return base + integrate([&](double s) { return b1 * econ.mu_prime(s) - econ.c_prime(s); },
                            lo, t, inner);
  };
  auto U_b1 = [&](double t) {
    return base_b1 + integrate([&](double s) { return b1 * econ.mu_prime(s); }, lo, t, inner);
  };

  RentIdentity r;
  r.direct = integrate([&](double t) { return U(t) * d.pdf(t); }, theta_hat, hi, panels);
  r.direct_b1 = integrate([&](double t) { return U_b1(t) * d.pdf(t); }, theta_hat, hi, panels);

  const int fine = 8 * panels;
  const double tail = d.survival(theta_hat);
  r.hazard_form = integrate(
      [&](double t) { return (b1 * econ.mu_prime(t) - econ.c_prime(t)) * d.survival(t); },
      theta_hat, hi, fine);
  r.boundary_term = tail * U(theta_hat);
  r.gap = r.direct - r.hazard_form - r.boundary_term;
  r.hazard_b1 =
      integrate([&](double t) { return b1 * econ.mu_prime(t) * d.survival(t); }, theta_hat, hi,
                fine) +
      tail * U_b1(theta_hat);
  return r;
}

ConcavityProfile difference_profile(std::vector<double> x, std::vector<double> values) {
  if (x.size() != values.size() || x.size() < 3)
    throw DomainError("difference profile needs at least three matched points");
  ConcavityProfile p;
  p.b1 = std::move(x);
  p.values = std::move(values);
  for (std::size_t k = 1; k < p.values.size(); ++k)
    p.first_differences.push_back(p.values[k] - p.values[k - 1]);
  for (std::size_t k = 1; k < p.first_differences.size(); ++k)
    p.second_differences.push_back(p.first_differences[k] - p.first_differences[k - 1]);
  double scale = 0.0;
  for (double v : p.values) scale = std::max(scale, std::abs(v));
  const double zero = 1e-12 * std::max(1.0, scale);
  p.first_sign_changes = count_sign_changes(p.first_differences, zero);
  p.second_sign_changes = count_sign_changes(p.second_differences, zero);
  p.decreasing = std::all_of(p.first_differences.begin(), p.first_differences.end(),
                             [&](double v) { return v <= zero; });
  return p;
}

ConcavityProfile concavity_probe(const EconomyPrimitives& econ, const std::vector<double>& b1_grid,
                                 int panels) {
  std::vector<double> w;
  w.reserve(b1_grid.size());
  for (double b : b1_grid) w.push_back(principal_value(econ, b, panels).value);
  return difference_profile(b1_grid, std::move(w));
}

namespace {

int lowest_positive(const Eigen::VectorXd& weights) {
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) return static_cast<int>(i);
  throw DegeneracyError("posterior has no positive mass");
}

void check_grid(const Eigen::VectorXd& grid, const Eigen::VectorXd& weights) {
  if (grid.size() == 0 || grid.size() != weights.size())
    throw DomainError("grid and weights must be non-empty and matched");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be ascending");
    if (weights[i] < 0.0) throw DomainError("weights must be non-negative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw DomainError("weights must sum to 1");
}

double discrete_ir_advance(const EconomyPrimitives& econ, double t, double b1) {
  const double K = econ.K();
  auto gap = [&](double a) { return a + b1 * econ.mu(t) - econ.c(t) - econ.phi(K - a); };
  if (gap(0.0) >= 0.0) return 0.0;
  if (gap(K) <= 0.0) return K;
  return find_root(gap, Bracket<double>{0.0, K}, Tolerance<double>{1e-14, 1e-15, 400});
}

}  // namespace

double discrete_value(const EconomyPrimitives& econ, const Eigen::VectorXd& grid,
                      const Eigen::VectorXd& weights, double a, double b1, int* cutoff_index) {
  const int n = static_cast<int>(grid.size());
  const double phi = econ.phi(econ.K() - a);
  // Suffix sums of w_i ψ_i; the best upper set maximises them.
  double tail_mass = 0.0, suffix = 0.0, best = 0.0;
  int best_k = n;
  for (int i = n - 1; i >= 0; --i) {
    double w = weights[i];
    if (w > 0.0) {
      double rent = 0.0;
      if (i + 1 < n && tail_mass > 0.0)
        rent = b1 * (econ.mu(grid[i + 1]) - econ.mu(grid[i])) * tail_mass / w;
      suffix += w * (econ.V(grid[i]) - econ.c(grid[i]) - phi - rent);
      if (suffix >= best) {
        best = suffix;
        best_k = i;
      }
    }
    tail_mass += w;
  }
  if (cutoff_index) *cutoff_index = best_k;
  return best_k < n ? best - a : 0.0;
}

DiscreteSolution solve_discrete(const EconomyPrimitives& econ, const Eigen::VectorXd& grid,
                                const Eigen::VectorXd& weights, const SolveOptions& opts) {
  check_grid(grid, weights);
  const int n = static_cast<int>(grid.size());
  const double t_lo = grid[lowest_positive(weights)];
  const double mu_lo = econ.mu(t_lo);
  const double b_hi =
      mu_lo > 0.0 ? std::max(0.0, (econ.c(t_lo) + econ.phi(econ.K())) / mu_lo) : opts.slope_cap;

  auto W = [&](double b1) {
    return discrete_value(econ, grid, weights, discrete_ir_advance(econ, t_lo, b1), b1, nullptr);
  };
  double b1 = 0.0;
  if (b_hi > 0.0)
    b1 = maximize_scalar(W, 0.0, b_hi, opts.tol, std::max(opts.scan_points, 257)).argmax;

  DiscreteSolution sol;
  sol.contract = {discrete_ir_advance(econ, t_lo, b1), 0.0, b1};
  sol.value = discrete_value(econ, grid, weights, sol.contract.advance, b1, &sol.cutoff_index);
  sol.cutoff = sol.cutoff_index < n ? grid[sol.cutoff_index] : grid[n - 1];

  const double edge = 1e-9 * std::max(1.0, b_hi);
  if (sol.cutoff_index >= n)
    sol.boundary_flag = BoundaryFlag::empty_set;
  else if (b1 <= edge)
    sol.boundary_flag = BoundaryFlag::corner_b1_zero;
  else if (b1 >= b_hi - edge)
    sol.boundary_flag = mu_lo > 0.0 ? BoundaryFlag::corner_a_zero : BoundaryFlag::corner_b1_cap;
  else if (sol.contract.advance <= 0.0)
    sol.boundary_flag = BoundaryFlag::corner_a_zero;
  else
    sol.boundary_flag = BoundaryFlag::interior;
  return sol;
}

}  // namespace lqscreen
