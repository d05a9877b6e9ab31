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

#include "lqscreen/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tight inner roots so the outer iteration can reach its own tolerance.
const Tolerance<double> kCutoffTol{1e-14, 1e-15, 400};

double survival_at(const EconomyPrimitives& e, double theta) {
  return e.dist().survival(theta);
}

// Σ_{k≠i} δ_ik (1 − F_k(θ_k)).
Eigen::VectorXd coupling(const PortfolioEconomy& port, const Eigen::VectorXd& theta) {
  const int n = port.size();
  Eigen::VectorXd s(n);
  for (int k = 0; k < n; ++k) s[k] = survival_at(port.economies[k], theta[k]);
  return port.complementarity * s;
}

struct MapResult {
  Eigen::VectorXd theta;
  std::vector<CutoffStatus> status;
};

MapResult cutoff_map(const PortfolioEconomy& port, const std::vector<Contract>& k,
                     const Eigen::VectorXd& theta) {
  const int n = port.size();
  Eigen::VectorXd shift = coupling(port, theta);
  MapResult out{Eigen::VectorXd(n), std::vector<CutoffStatus>(n)};
  for (int i = 0; i < n; ++i) {
    Cutoff c = cutoff(port.economies[i], k[i].advance, k[i].slope, shift[i], kCutoffTol);
    out.theta[i] = c.theta;
    out.status[i] = c.status;
  }
  return out;
}

Eigen::VectorXd iterate_from(const PortfolioEconomy& port, const std::vector<Contract>& k,
                             const Eigen::VectorXd& start, const PortfolioOptions& opts,
                             int* iterations) {
  auto g = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    return cutoff_map(port, k, th).theta;
  };
  FixedPointResult<double> r = fixed_point(g, start, opts.damping, opts.tol);
  if (iterations) *iterations = r.iterations;
  return r.x;
}

double relationship_own_value(const EconomyPrimitives& e, const Contract& k, double theta,
                              int panels) {
  if (theta >= e.highest()) return 0.0;
  const auto& d = e.dist();
  const double phi = e.phi(e.K() - k.advance);
  return integrate(
             [&](double t) {
               return (e.V(t) - e.c(t) - phi) * d.pdf(t) -
                      k.slope * e.mu_prime(t) * d.survival(t);
             },
             theta, e.highest(), panels) -
         k.advance;
}

double psi_prime(const EconomyPrimitives& e, const Contract& k, double theta) {
  const double lo = e.lowest(), hi = e.highest(), h = 1e-6;
  double t0 = std::max(lo, theta - h), t1 = std::min(hi, theta + h);
  return (virtual_surplus(e, t1, k.advance, k.slope) -
          virtual_surplus(e, t0, k.advance, k.slope)) /
         (t1 - t0);
}

}  // namespace

const char* to_string(ContractRule rule) {
  switch (rule) {
    case ContractRule::solved: return "solved";
    case ContractRule::calibrated: return "calibrated";
    case ContractRule::fixed: return "fixed";
  }
  return "unknown";
}

PortfolioEconomy PortfolioEconomy::symmetric(const EconomyPrimitives& econ, int n, double delta) {
  if (n < 2) throw DomainError("portfolio needs at least two relationships");
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, delta);
  d.diagonal().setZero();
  return network(econ, d);
}

PortfolioEconomy PortfolioEconomy::network(const EconomyPrimitives& econ, Eigen::MatrixXd delta) {
  PortfolioEconomy p;
  p.economies.assign(delta.rows(), econ);
  p.complementarity = std::move(delta);
  p.validate();
  return p;
}

void PortfolioEconomy::validate() const {
  const int n = size();
  if (n < 2) throw DomainError("portfolio needs at least two relationships");
  if (complementarity.rows() != n || complementarity.cols() != n)
    throw DomainError("complementarity matrix must be n x n");
  for (int i = 0; i < n; ++i) {
    if (complementarity(i, i) != 0.0) throw DomainError("complementarity diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      double d = complementarity(i, j);
      if (!(d >= 0.0) || !std::isfinite(d))
        throw DomainError("complementarity entries must be finite and >= 0");
      if (std::abs(d - complementarity(j, i)) > 1e-12)
        throw DomainError("complementarity matrix must be symmetric");
    }
  }
  if (!contracts.empty() && static_cast<int>(contracts.size()) != n)
    throw DomainError("held contracts must match the number of relationships");
}

PortfolioEconomy PortfolioEconomy::with_tightness(int j, double R) const {
  PortfolioEconomy p = *this;
  p.economies.at(j) = p.economies[j].with_tightness(R);
  return p;
}

PortfolioEconomy PortfolioEconomy::with_common_tightness(double R) const {
  PortfolioEconomy p = *this;
  for (auto& e : p.economies) e = e.with_tightness(R);
  return p;
}

double benchmark_cash_intensity(double R) {
  static const double kR[] = {0.5, 1.0, 2.0, 3.0, 5.0};
  static const double kBeta[] = {0.21, 0.34, 0.47, 0.55, 0.63};
  if (R <= kR[0]) return kBeta[0];
  for (int k = 1; k < 5; ++k)
    if (R <= kR[k])
      return kBeta[k - 1] + (kBeta[k] - kBeta[k - 1]) * (R - kR[k - 1]) / (kR[k] - kR[k - 1]);
  return kBeta[4];
}

Contract pin_contract(const EconomyPrimitives& econ, ContractRule rule, const Contract& held,
                      const SolveOptions& opts) {
  switch (rule) {
    case ContractRule::solved: return solve_optimal(econ, opts).contract;
    case ContractRule::calibrated:
      return calibrated_contract(econ, benchmark_cash_intensity(econ.R()), opts);
    case ContractRule::fixed: return held;
  }
  return held;
}

std::vector<Contract> pin_contracts(const PortfolioEconomy& port, const PortfolioOptions& opts) {
  if (opts.rule == ContractRule::fixed && port.contracts.empty())
    throw DomainError("fixed contract rule needs held contracts");
  std::vector<Contract> out;
  for (int i = 0; i < port.size(); ++i)
    out.push_back(pin_contract(port.economies[i], opts.rule,
                               port.contracts.empty() ? Contract() : port.contracts[i],
                               opts.bilateral));
  return out;
}

PortfolioSolution solve_cutoffs(const PortfolioEconomy& port, const PortfolioOptions& opts) {
  return solve_cutoffs(port, pin_contracts(port, opts), opts);
}

PortfolioSolution solve_cutoffs(const PortfolioEconomy& port,
                                const std::vector<Contract>& contracts,
                                const PortfolioOptions& opts) {
  port.validate();
  const int n = port.size();
  if (static_cast<int>(contracts.size()) != n)
    throw DomainError("one contract per relationship required");
  PortfolioSolution sol;
  sol.contracts = contracts;

  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i)
    start[i] = cutoff(port.economies[i], contracts[i].advance, contracts[i].slope, 0.0,
                      kCutoffTol)
                   .theta;
  sol.cutoffs = iterate_from(port, contracts, start, opts, &sol.iterations);

  if (opts.check_multiplicity) {
    Eigen::VectorXd lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = port.economies[i].lowest();
      hi[i] = port.economies[i].highest();
    }
    for (const auto& s : {lo, hi}) {
      Eigen::VectorXd other = iterate_from(port, contracts, s, opts, nullptr);
      if ((other - sol.cutoffs).lpNorm<Eigen::Infinity>() > 1e-6) sol.multiple_fixed_points = true;
    }
  }

  MapResult m = cutoff_map(port, contracts, sol.cutoffs);
  sol.status = m.status;
  Eigen::VectorXd shift = coupling(port, sol.cutoffs);
  sol.residuals.resize(n);
  for (int i = 0; i < n; ++i) {
    double r = virtual_surplus(port.economies[i], sol.cutoffs[i], contracts[i].advance,
                               contracts[i].slope) +
               shift[i];
    switch (m.status[i]) {
      case CutoffStatus::interior: sol.residuals[i] = std::abs(r); break;
      case CutoffStatus::full: sol.residuals[i] = std::max(0.0, -r); break;
      case CutoffStatus::empty: sol.residuals[i] = std::max(0.0, r); break;
    }
  }

  PortfolioValue v = portfolio_value(port, contracts, sol.cutoffs, opts.bilateral.panels);
  sol.total_value = v.total;
  sol.per_relationship_value = v.per_relationship;

  sol.centralities = Eigen::VectorXd::Zero(n);
  if (opts.compute_centralities) {
    PortfolioOptions inner = opts;
    inner.compute_centralities = false;
    inner.check_multiplicity = false;
    for (int j = 0; j < n; ++j) sol.centralities[j] = contagion_centrality(port, j, inner);
  }
  return sol;
}

SymmetricCutoff symmetric_cutoff(double a, double b1, double delta) {
  const double den = 1.0 + b1 - delta;
  if (!(den > 1e-9)) throw DegeneracyError("symmetric cutoff denominator is not positive");
  double t = (a + b1 - delta) / den;
  double c = std::clamp(t, 0.0, 1.0);
  return {c, c != t};
}

PortfolioValue portfolio_value(const PortfolioEconomy& port, const std::vector<Contract>& contracts,
                               const Eigen::VectorXd& cutoffs, int panels) {
  const int n = port.size();
  PortfolioValue out;
  out.per_relationship = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) {
    const auto& e = port.economies[i];
    out.per_relationship[i] = relationship_own_value(e, contracts[i], cutoffs[i], panels);
    s[i] = survival_at(e, cutoffs[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double pair = port.complementarity(i, j) * s[i] * s[j];
      out.per_relationship[i] += 0.5 * pair;
      out.per_relationship[j] += 0.5 * pair;
    }
  out.total = out.per_relationship.sum();
  return out;
}

namespace {

// Re-pinned contracts and re-solved portfolio at R_j = R.
PortfolioSolution resolve_at(const PortfolioEconomy& port, int j, double R,
                             const PortfolioOptions& opts) {
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  return solve_cutoffs(port.with_tightness(j, R), inner);
}

// ∂ψ_j(θ)/∂R_j with the contract re-pinned, at fixed θ.
double psi_tightness_derivative(const PortfolioEconomy& port, int j, double theta,
                                const PortfolioOptions& opts) {
  const auto& e = port.economies[j];
  const double R = e.R(), h = opts.fd_step;
  const double r0 = std::max(0.0, R - h), r1 = R + h;
  Contract held = port.contracts.empty() ? Contract() : port.contracts[j];
  auto psi = [&](double r) {
    EconomyPrimitives er = e.with_tightness(r);
    Contract k = pin_contract(er, opts.rule, held, opts.bilateral);
    return virtual_surplus(er, theta, k.advance, k.slope);
  };
  return (psi(r1) - psi(r0)) / (r1 - r0);
}

Eigen::VectorXd implicit_sensitivity(const PortfolioEconomy& port, const PortfolioSolution& sol,
                                     int j, const PortfolioOptions& opts) {
  const int n = port.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (sol.status[i] != CutoffStatus::interior) {
      J(i, i) = 1.0;
      continue;
    }
    J(i, i) = psi_prime(port.economies[i], sol.contracts[i], sol.cutoffs[i]);
    for (int k = 0; k < n; ++k)
      if (k != i) J(i, k) = -port.complementarity(i, k) * port.economies[k].dist().pdf(sol.cutoffs[k]);
  }
  if (sol.status[j] == CutoffStatus::interior)
    rhs[j] = -psi_tightness_derivative(port, j, sol.cutoffs[j], opts);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  if (!(std::abs(lu.determinant()) > 1e-14))
    throw DegeneracyError("cutoff fixed point has a singular Jacobian");
  return lu.solve(rhs);
}

}  // namespace

CutoffSensitivity cutoff_sensitivities(const PortfolioEconomy& port, int j,
                                       const PortfolioOptions& opts) {
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  PortfolioSolution sol = solve_cutoffs(port, inner);
  CutoffSensitivity out;
  out.implicit = implicit_sensitivity(port, sol, j, inner);
  const double R = port.economies[j].R(), h = opts.fd_step;
  const double r0 = std::max(0.0, R - h), r1 = R + h;
  out.differenced =
      (resolve_at(port, j, r1, inner).cutoffs - resolve_at(port, j, r0, inner).cutoffs) / (r1 - r0);
  return out;
}

double contagion_centrality(const PortfolioEconomy& port, int j, const PortfolioOptions& opts) {
  const int n = port.size();
  if (j < 0 || j >= n) throw DomainError("relationship index out of range");
  if (port.complementarity.row(j).isZero() && port.complementarity.col(j).isZero()) return 0.0;
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  PortfolioSolution sol = solve_cutoffs(port, inner);
  Eigen::VectorXd s = implicit_sensitivity(port, sol, j, inner);
  double c = 0.0;
  for (int i = 0; i < n; ++i)
    if (i != j) c += port.complementarity(i, j) * s[i];
  return c;
}

ContagionDecomposition contagion_derivative(const PortfolioEconomy& port, int j,
                                            const PortfolioOptions& opts) {
  const int n = port.size();
  if (j < 0 || j >= n) throw DomainError("relationship index out of range");
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  PortfolioSolution sol = solve_cutoffs(port, inner);
  const auto& ej = port.economies[j];
  const double R = ej.R(), h = opts.fd_step;
  const double r0 = std::max(0.0, R - h), r1 = R + h;

  ContagionDecomposition out;
  out.total = (resolve_at(port, j, r1, inner).total_value -
               resolve_at(port, j, r0, inner).total_value) /
              (r1 - r0);

  const Contract& kj = sol.contracts[j];
  const double tj = sol.cutoffs[j];
  const bool implemented = sol.status[j] != CutoffStatus::empty;
  out.direct_financing =
      implemented ? -ej.phi_R(ej.K() - kj.advance) * survival_at(ej, tj) : 0.0;
  Contract held = port.contracts.empty() ? Contract() : port.contracts[j];
  auto own = [&](double r) {
    EconomyPrimitives er = ej.with_tightness(r);
    Contract k = pin_contract(er, opts.rule, held, opts.bilateral);
    return relationship_own_value(er, k, tj, opts.bilateral.panels);
  };
  const double own_partial = (own(r1) - own(r0)) / (r1 - r0);
  out.instrument_adjustment = own_partial - out.direct_financing;

  Eigen::VectorXd s = implicit_sensitivity(port, sol, j, inner);
  Eigen::VectorXd shift = coupling(port, sol.cutoffs);
  double cutoff_effect = 0.0;
  for (int i = 0; i < n; ++i) {
    if (sol.status[i] != CutoffStatus::interior) continue;
    const auto& ei = port.economies[i];
    const double fi = ei.dist().pdf(sol.cutoffs[i]);
    const double psi =
        virtual_surplus(ei, sol.cutoffs[i], sol.contracts[i].advance, sol.contracts[i].slope);
    cutoff_effect += -fi * (psi + shift[i]) * s[i];
    if (i != j) out.screening_spillover += port.complementarity(i, j) * (-psi * fi) * s[i];
  }
  out.complementarity_adjustment = cutoff_effect - out.screening_spillover;
  if (opts.rule == ContractRule::solved) {
    BilateralSolution b = solve_optimal(ej, opts.bilateral);
    out.approximate = b.boundary_flag != BoundaryFlag::interior;
  }
  return out;
}

ContagionThreshold contagion_threshold(const EconomyPrimitives& econ, const PortfolioOptions& opts,
                                       const std::vector<double>& delta_grid) {
  ContagionThreshold out;
  out.contract = pin_contract(econ, opts.rule, Contract(), opts.bilateral);
  Cutoff c = cutoff(econ, out.contract.advance, out.contract.slope);
  out.cutoff = c.theta;
  const double b1 = out.contract.slope, ell = econ.K() - out.contract.advance;
  if (!(b1 > 0.0)) throw DegeneracyError("benchmark degeneracy: zero contingent slope");
  const double tail = econ.highest() - c.theta;
  if (c.status == CutoffStatus::empty || !(tail > 0.0))
    throw DegeneracyError("empty implementation set");
  out.formula = ell * (1.0 + b1) / (b1 * tail) * econ.phi_R(ell);

  std::vector<double> grid = delta_grid;
  if (grid.empty())
    for (int k = 0; k <= 50; ++k) grid.push_back(0.05 * k);
  out.empirical = kNaN;
  for (double d : grid) {
    PortfolioEconomy port = PortfolioEconomy::symmetric(econ, 2, d);
    if (opts.rule == ContractRule::fixed) port.contracts.assign(2, out.contract);
    if (contagion_derivative(port, 0, opts).total > 0.0) {
      out.empirical = d;
      break;
    }
  }
  return out;
}

HumpScan hump_scan(const EconomyPrimitives& econ, const std::vector<double>& R_grid, double delta,
                   const PortfolioOptions& opts) {
  HumpScan out;
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  PortfolioEconomy base = PortfolioEconomy::symmetric(econ, 2, delta);
  for (double R : R_grid) {
    out.R.push_back(R);
    out.value.push_back(solve_cutoffs(base.with_common_tightness(R), inner).total_value);
  }
  for (std::size_t k = 1; k < out.R.size(); ++k) {
    double s = (out.value[k] - out.value[k - 1]) / (out.R[k] - out.R[k - 1]);
    out.slope.push_back(s);
    if (s > 0.0) {
      if (!out.rising_intervals.empty() && out.rising_intervals.back().second == out.R[k - 1])
        out.rising_intervals.back().second = out.R[k];
      else
        out.rising_intervals.emplace_back(out.R[k - 1], out.R[k]);
    }
  }
  if (!out.value.empty()) {
    auto it = std::max_element(out.value.begin(), out.value.end());
    std::size_t k = std::size_t(it - out.value.begin());
    out.has_interior_peak = k > 0 && k + 1 < out.value.size();
    out.peak_R = out.R[k];
  }
  return out;
}

BreadthComparison breadth_comparison(const PortfolioEconomy& port, const PortfolioOptions& opts) {
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  PortfolioSolution sol = solve_cutoffs(port, inner);
  const auto& e = port.economies[0];
  const Contract& k = sol.contracts[0];
  BreadthComparison out;
  out.dual_value = sol.total_value;
  out.single_value = evaluate_contract(e, k.advance, k.slope, opts.bilateral.panels).value;
  out.prefer_single = 2.0 * out.single_value > out.dual_value + 1e-12;
  return out;
}

Eigen::VectorXd uniform_subsidy_effect(const PortfolioEconomy& port, double R, double dR,
                                       const PortfolioOptions& opts) {
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  if (!(dR > 0.0) || dR > R) throw DomainError("subsidy must satisfy 0 < dR <= R");
  PortfolioSolution before = solve_cutoffs(port.with_common_tightness(R), inner);
  PortfolioSolution after = solve_cutoffs(port.with_common_tightness(R - dR), inner);
  return after.per_relationship_value - before.per_relationship_value;
}

double value_change_vs_independent(const PortfolioEconomy& port, const PortfolioOptions& opts) {
  PortfolioOptions inner = opts;
  inner.compute_centralities = false;
  inner.check_multiplicity = false;
  PortfolioSolution sol = solve_cutoffs(port, inner);
  const int n = port.size();
  Eigen::VectorXd indep(n);
  for (int i = 0; i < n; ++i)
    indep[i] = cutoff(port.economies[i], sol.contracts[i].advance, sol.contracts[i].slope, 0.0,
                      kCutoffTol)
                   .theta;
  double cf = portfolio_value(port, sol.contracts, indep, opts.bilateral.panels).total;
  if (sol.total_value == 0.0) return kNaN;
  return (cf - sol.total_value) / std::abs(sol.total_value);
}

double contagion_share(const EconomyPrimitives& econ, const std::vector<double>& delta_grid,
                       const PortfolioOptions& opts) {
  if (delta_grid.empty()) throw DomainError("empty delta grid");
  int hits = 0;
  Contract held = pin_contract(econ, opts.rule, Contract(), opts.bilateral);
  for (double d : delta_grid) {
    PortfolioEconomy port = PortfolioEconomy::symmetric(econ, 2, d);
    if (opts.rule == ContractRule::fixed) port.contracts.assign(2, held);
    if (contagion_derivative(port, 0, opts).total > 0.0) ++hits;
  }
  return double(hits) / double(delta_grid.size());
}

}  // namespace lqscreen
