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


#include "lqscreen/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqscreen/errors.hpp"
#include "lqscreen/numerics.hpp"
#include "lqscreen/rng.hpp"

namespace lqscreen {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Oracle default: twice the largest slope with a non-negative IR advance,
// capped at 10.
double default_slope_max(const EconomyPrimitives& econ) {
  const double lo = econ.lowest(), mu_lo = econ.mu(lo);
  if (!(mu_lo > 0.0)) return 10.0;
  return std::min(2.0 * std::max(0.0, (econ.c(lo) + econ.phi(econ.K())) / mu_lo), 10.0);
}

}  // namespace

// ---------------------------------------------------------------- learning

PosteriorState PosteriorState::from_distribution(const TypeDistribution& dist, int n) {
  if (n < 1) throw DomainError("posterior grid needs at least one point");
  PosteriorState p;
  if (n == 1) {
    p.grid = Eigen::VectorXd::Constant(1, 0.5 * (dist.lower() + dist.upper()));
    p.weights = Eigen::VectorXd::Ones(1);
    return p;
  }
  p.grid = Eigen::VectorXd::LinSpaced(n, dist.lower(), dist.upper());
  p.weights.resize(n);
  for (int i = 0; i < n; ++i) p.weights[i] = dist.pdf(p.grid[i]);
  const double total = p.weights.sum();
  if (!(total > 0.0)) throw DegeneracyError("density vanishes on the grid");
  p.weights /= total;
  return p;
}

PosteriorState PosteriorState::point_mass(Eigen::VectorXd grid, int index) {
  if (index < 0 || index >= grid.size()) throw DomainError("point-mass index off the grid");
  PosteriorState p;
  p.weights = Eigen::VectorXd::Zero(grid.size());
  p.weights[index] = 1.0;
  p.grid = std::move(grid);
  p.validate();
  return p;
}

void PosteriorState::validate() const {
  if (grid.size() == 0 || grid.size() != weights.size())
    throw DomainError("posterior grid and weights must be non-empty and matched");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("posterior grid must ascend");
    if (!(weights[i] >= 0.0)) throw DomainError("posterior weights must be non-negative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw DomainError("posterior weights must sum to 1");
}

double PosteriorState::hazard(int i) const {
  if (i < 0 || i >= size()) throw DomainError("hazard index off the grid");
  const double tail = weights.tail(size() - i - 1).sum();
  if (weights[i] > 0.0) return tail / weights[i];
  return tail > 0.0 ? kInf : 0.0;
}

double signal_likelihood(const PosteriorState& post, int i, int x) {
  if (x != 0 && x != 1) throw DomainError("signal outcome must be 0 or 1");
  const int n = post.size();
  const double p1 = n == 1 ? 0.5 : (post.grid[i] - post.grid[0]) / (post.grid[n - 1] - post.grid[0]);
  return x == 1 ? p1 : 1.0 - p1;
}

PosteriorState bayes_update(const PosteriorState& post, int x) {
  post.validate();
  PosteriorState out = post;
  for (int i = 0; i < post.size(); ++i) out.weights[i] *= signal_likelihood(post, i, x);
  const double total = out.weights.sum();
  if (!(total > 0.0)) throw DegeneracyError("signal has zero likelihood under the posterior");
  out.weights /= total;
  return out;
}

bool hazard_shrink_check(const PosteriorState& before, const PosteriorState& after) {
  if (before.grid.size() != after.grid.size() || before.grid != after.grid)
    throw DomainError("hazard comparison needs a shared grid");
  for (int i = 1; i + 1 < before.size(); ++i) {
    if (!(before.weights[i] > 0.0) || !(after.weights[i] > 0.0)) continue;
    const double hb = before.hazard(i), ha = after.hazard(i);
    if (ha > hb + 1e-12 * std::max(1.0, hb)) return false;
  }
  return true;
}

DynamicPath dynamic_path(const EconomyPrimitives& econ, const PosteriorState& prior,
                         double true_theta, int periods, std::uint64_t seed,
                         const SolveOptions& opts) {
  prior.validate();
  if (periods < 0) throw DomainError("period count must be non-negative");
  const int n = prior.size();
  const double p1 =
      n == 1 ? 0.5
             : std::clamp((true_theta - prior.grid[0]) / (prior.grid[n - 1] - prior.grid[0]), 0.0,
                          1.0);
  CounterRng rng(seed);
  DynamicPath path;
  PosteriorState post = prior;
  path.steps.push_back({0, -1, solve_discrete(econ, post.grid, post.weights, opts), post, true});
  for (int t = 1; t <= periods; ++t) {
    const int x = rng.uniform() < p1 ? 1 : 0;
    PosteriorState next = bayes_update(post, x);
    DynamicStep step{t, x, solve_discrete(econ, next.grid, next.weights, opts), next,
                     hazard_shrink_check(post, next)};
    if (step.hazard_shrink_ok) {
      ++path.shrink_steps;
      const Contract& prev = path.steps.back().solution.contract;
      if (step.solution.contract.advance < prev.advance - 1e-9)
        path.advance_monotone_on_shrink = false;
      if (step.solution.contract.slope > prev.slope + 1e-9) path.slope_monotone_on_shrink = false;
    }
    path.steps.push_back(std::move(step));
    post = std::move(next);
  }
  return path;
}

// -------------------------------------------------------------- monitoring

void MonitoringConfig::validate() const {
  if (!(kappa0 >= 0.0) || !std::isfinite(kappa0)) throw DomainError("kappa0 must be >= 0");
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max))
    throw DomainError("sigma_max must be positive");
}

EconomyPrimitives with_monitoring(const EconomyPrimitives& econ, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("monitoring intensity must be >= 0");
  Primitives fns = econ.functions();
  const ScalarFn mu = fns.signal_mean, dmu = fns.signal_slope;
  const double base = mu(econ.lowest()), g = 1.0 + sigma;
  fns.signal_mean = [mu, base, g](double t) { return base + g * (mu(t) - base); };
  fns.signal_slope = [dmu, g](double t) { return g * dmu(t); };
  return econ.with_functions(std::move(fns));
}

namespace {

struct FocPoint {
  double value;
  BilateralSolution solution;
};

FocPoint foc_at(const EconomyPrimitives& econ, const MonitoringConfig& cfg, double sigma,
                const SolveOptions& opts) {
  BilateralSolution sol = solve_optimal(with_monitoring(econ, sigma), opts);
  double tail = 0.0;
  if (sol.cutoff.status != CutoffStatus::empty) {
    const auto& d = econ.dist();
    // ∂μ′_σ/∂σ is the base slope μ′.
    tail = integrate([&](double t) { return econ.mu_prime(t) * d.survival(t); },
                     sol.cutoff.theta, econ.highest(), opts.panels);
  }
  return {sol.contract.slope * tail - cfg.marginal_cost(sigma), std::move(sol)};
}

}  // namespace

double monitoring_foc(const EconomyPrimitives& econ, const MonitoringConfig& cfg, double sigma,
                      const SolveOptions& opts) {
  cfg.validate();
  return foc_at(econ, cfg, sigma, opts).value;
}

MonitoringResult solve_monitoring(const EconomyPrimitives& econ, const MonitoringConfig& cfg,
                                  const SolveOptions& opts) {
  cfg.validate();
  MonitoringResult out;
  FocPoint at0 = foc_at(econ, cfg, 0.0, opts);
  if (at0.value <= 0.0) {
    out = {0.0, at0.value, true, std::move(at0.solution)};
    return out;
  }
  // Quadratic scan so that small roots (large κ0) are still bracketed.
  const int scan = 40;
  double lo = 0.0, hi = -1.0;
  for (int k = 1; k <= scan; ++k) {
    double s = cfg.sigma_max * double(k * k) / double(scan * scan);
    if (foc_at(econ, cfg, s, opts).value <= 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0.0) {
    FocPoint top = foc_at(econ, cfg, cfg.sigma_max, opts);
    out = {cfg.sigma_max, top.value, true, std::move(top.solution)};
    return out;
  }
  // The first sub-interval may still hold a root far below its width.
  if (lo == 0.0) {
    while (hi > 1e-300 && foc_at(econ, cfg, hi / 16.0, opts).value <= 0.0) hi /= 16.0;
    lo = hi / 16.0;
  }
  auto g = [&](double s) { return foc_at(econ, cfg, s, opts).value; };
  const double sigma =
      find_root(g, Bracket<double>{lo, hi}, Tolerance<double>{1e-12 * std::max(1.0, hi), 1e-12, 400});
  FocPoint fin = foc_at(econ, cfg, sigma, opts);
  out = {sigma, fin.value, false, std::move(fin.solution)};
  return out;
}

// ----------------------------------------------------------- renegotiation

BilateralSolution solve_renegotiation(const EconomyPrimitives& econ, double lambda,
                                      const SolveOptions& opts) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw DomainError("renegotiation probability must lie in [0, 1]");
  if (lambda == 0.0) return solve_optimal(econ, opts);
  return solve_optimal(econ.with_signal_scale(1.0 - lambda), opts);
}

// ------------------------------------------------------------------- menus

MenuCheck menu_equivalence_check(const EconomyPrimitives& econ, int grid_size, int n_a,
                                 int n_b) {
  if (grid_size < 1 || n_a < 1 || n_b < 1) throw DomainError("menu grids must be non-empty");
  const PosteriorState types = PosteriorState::from_distribution(econ.dist(), grid_size);
  const int n = grid_size;
  const Eigen::VectorXd& th = types.grid;
  const Eigen::VectorXd& w = types.weights;

  // Agent payoffs are lines in μ once c is affine in μ; the outside option is
  // the line of slope ρ = c′/μ′ in b1 units.
  double rho = 0.0;
  if (n > 1) {
    rho = (econ.c(th[1]) - econ.c(th[0])) / (econ.mu(th[1]) - econ.mu(th[0]));
    for (int i = 1; i < n; ++i) {
      const double dmu = econ.mu(th[i]) - econ.mu(th[i - 1]);
      if (!(dmu > 0.0)) throw DomainError("menu check needs a strictly increasing signal mean");
      const double r = (econ.c(th[i]) - econ.c(th[i - 1])) / dmu;
      if (std::abs(r - rho) > 1e-9 * std::max(1.0, std::abs(rho)))
        throw DomainError("menu check needs cost affine in the signal mean");
    }
  }

  const double K = econ.K(), b_max = default_slope_max(econ);
  const int M = n_a * n_b, none = M;
  std::vector<Contract> opt(M);
  for (int i = 0; i < n_a; ++i)
    for (int j = 0; j < n_b; ++j)
      opt[i * n_b + j] = {n_a == 1 ? 0.0 : K * i / (n_a - 1), 0.0,
                          n_b == 1 ? 0.0 : b_max * j / (n_b - 1)};
  std::vector<double> key(M + 1);
  for (int o = 0; o < M; ++o) key[o] = opt[o].slope;
  key[none] = rho;

  // u(i, o): agent payoff; p(i, o): principal's weighted payoff.
  Eigen::MatrixXd u(n, M + 1), p(n, M + 1);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < M; ++o) {
      const Contract& k = opt[o];
      u(i, o) = k.advance + k.slope * econ.mu(th[i]) - econ.c(th[i]) - econ.phi(K - k.advance);
      p(i, o) = w[i] * (econ.V(th[i]) - k.advance - k.slope * econ.mu(th[i]));
    }
    u(i, none) = 0.0;
    p(i, none) = 0.0;
  }
  const double tol = 1e-12;

  MenuCheck out;
  out.weights = w;

  // Single contract: participation decides who is served.
  out.baseline_value = 0.0;
  out.baseline = {0.0, 0.0, 0.0};
  for (int o = 0; o < M; ++o) {
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      if (u(i, o) >= -tol) v += p(i, o);
    if (v > out.baseline_value) {
      out.baseline_value = v;
      out.baseline = opt[o];
    }
  }

  // DP over types in ascending order; the chosen option's key never falls and
  // adjacent types do not envy each other.
  const double ninf = -kInf;
  Eigen::MatrixXd best = Eigen::MatrixXd::Constant(n, M + 1, ninf);
  Eigen::MatrixXi from = Eigen::MatrixXi::Constant(n, M + 1, -1);
  for (int o = 0; o <= M; ++o)
    if (u(0, o) >= -tol) best(0, o) = p(0, o);
  for (int i = 1; i < n; ++i) {
    for (int o = 0; o <= M; ++o) {
      if (u(i, o) < -tol) continue;
      for (int q = 0; q <= M; ++q) {
        if (best(i - 1, q) == ninf || key[o] < key[q]) continue;
        if (u(i, o) < u(i, q) - tol || u(i - 1, q) < u(i - 1, o) - tol) continue;
        const double v = best(i - 1, q) + p(i, o);
        if (v > best(i, o)) {
          best(i, o) = v;
          from(i, o) = q;
        }
      }
    }
  }
  int o = 0;
  for (int k = 1; k <= M; ++k)
    if (best(n - 1, k) > best(n - 1, o)) o = k;
  out.menu_value = best(n - 1, o);

  DiscreteMechanism& m = out.menu;
  m.types = th;
  m.allocation.resize(n);
  m.advances.resize(n);
  m.slopes.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    m.allocation[i] = o == none ? 0 : 1;
    m.advances[i] = o == none ? 0.0 : opt[o].advance;
    m.slopes[i] = o == none ? 0.0 : opt[o].slope;
    if (i > 0) o = from(i, o);
  }
  out.gap = out.menu_value - out.baseline_value;
  out.ic = ic_verify(m, econ, 1e-9);
  return out;
}

// ---------------------------------------------------------------- auctions

double full_info_advance(const EconomyPrimitives& econ, double theta, double b1) {
  const double K = econ.K();
  auto gap = [&](double a) { return a + b1 * econ.mu(theta) - econ.c(theta) - econ.phi(K - a); };
  if (gap(0.0) >= 0.0) return 0.0;
  if (gap(K) <= 0.0) return K;
  return find_root(gap, Bracket<double>{0.0, K}, Tolerance<double>{1e-14, 1e-15, 400});
}

BidFunction solve_bid_function(const EconomyPrimitives& econ, int bidders,
                               std::optional<double> eps, int steps, const SolveOptions& opts) {
  if (bidders < 2) throw DomainError("an auction needs at least two bidders");
  const double lo = econ.lowest(), hi = econ.highest();
  const double e = eps.value_or(1e-3 * (hi - lo));
  if (!(e > 0.0)) throw DomainError("boundary offset must be positive");
  if (!(e < hi - lo)) throw DomainError("boundary offset exceeds the support");

  BidFunction bf;
  bf.bidders = bidders;
  bf.slope = solve_optimal(econ, opts).contract.slope;
  const auto& d = econ.dist();
  auto fb = [&](double t) { return full_info_advance(econ, t, bf.slope); };
  auto rhs = [&](double t, double beta) {
    return (bidders - 1) * d.hazard(t) * (beta - fb(t));
  };
  const double t0 = hi - e;
  OdePath<double> path = integrate_ode(rhs, t0, fb(t0), lo, steps);
  bf.grid = path.t;
  bf.bids = path.y;
  bf.full_info.resize(bf.grid.size());
  for (Eigen::Index k = 0; k < bf.grid.size(); ++k) bf.full_info[k] = fb(bf.grid[k]);
  for (Eigen::Index k = 0; k < bf.grid.size(); ++k) {
    if (bf.bids[k] < bf.full_info[k] - 1e-9) bf.shading_ok = false;
    // grid descends, so a non-increasing bid schedule rises along it.
    if (k > 0 && bf.bids[k] < bf.bids[k - 1] - 1e-12) bf.monotone_ok = false;
  }
  return bf;
}

// ------------------------------------------------------- two-dimensional

std::vector<JointSample> sample_population(const TypeDistribution& dist,
                                           const std::vector<double>& alpha_support, int n,
                                           std::uint64_t seed) {
  if (n < 0) throw DomainError("sample size must be non-negative");
  if (alpha_support.empty()) throw DomainError("alpha support is empty");
  const double lo = dist.lower(), hi = dist.upper();
  const auto m = alpha_support.size();
  std::vector<JointSample> out(n);
  for (int k = 0; k < n; ++k) {
    const double u = CounterRng::uniform_at(seed, 2 * std::uint64_t(k));
    const double v = CounterRng::uniform_at(seed, 2 * std::uint64_t(k) + 1);
    double theta;
    if (dist.kind() == "uniform") {
      theta = lo + u * (hi - lo);
    } else {
      auto g = [&](double t) { return dist.cdf(t) - u; };
      theta = g(lo) >= 0.0 ? lo : find_root(g, Bracket<double>{lo, hi});
    }
    out[k] = {alpha_support[std::min<std::size_t>(m - 1, std::size_t(v * m))], theta};
  }
  return out;
}

EconomyPrimitives xi_economy(const TypeDistribution& xi_dist, const EconomyPrimitives& econ,
                             double v) {
  Primitives fns{[v](double x) { return v * x; }, [v](double) { return v; },
                 [](double) { return 1.0; },      [](double) { return 0.0; },
                 [](double x) { return x; },      [](double) { return 1.0; }};
  return EconomyPrimitives(xi_dist, std::move(fns), econ.financing(), econ.K());
}

Reduction2d reduce_2d(const std::vector<JointSample>& samples, const EconomyPrimitives& econ,
                      double v, int bins, const SolveOptions& opts) {
  if (bins < 1) throw DomainError("histogram needs at least one bin");
  Reduction2d out;
  std::vector<double> xi;
  xi.reserve(samples.size());
  for (const auto& s : samples) {
    const double c = econ.c(s.theta);
    if (!(c > 0.0)) {
      ++out.rejected;
      continue;
    }
    xi.push_back(s.alpha * econ.mu(s.theta) / c);
  }
  out.used = static_cast<int>(xi.size());
  if (xi.empty()) throw DegeneracyError("every sample was rejected");
  const auto [mn, mx] = std::minmax_element(xi.begin(), xi.end());
  out.xi_min = *mn;
  out.xi_max = *mx;
  if (out.xi_max - out.xi_min <= 1e-12 * std::max(1.0, std::abs(out.xi_max))) {
    out.degenerate = true;
    return out;
  }
  std::vector<double> edges(bins + 1), mass(bins, 0.0);
  const double width = (out.xi_max - out.xi_min) / bins;
  for (int k = 0; k <= bins; ++k) edges[k] = out.xi_min + width * k;
  edges[bins] = out.xi_max;
  for (double x : xi) {
    int k = static_cast<int>((x - out.xi_min) / width);
    mass[std::clamp(k, 0, bins - 1)] += 1.0;
  }
  out.xi_distribution = TypeDistribution::histogram(edges, mass);
  out.xi_economy = xi_economy(*out.xi_distribution, econ, v);
  out.solution = solve_optimal(*out.xi_economy, opts);
  return out;
}

}  // namespace lqscreen
