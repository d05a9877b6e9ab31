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


#include "lqscreen/experiments.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lqscreen/bilateral.hpp"
#include "lqscreen/errors.hpp"
#include "lqscreen/extensions.hpp"
#include "lqscreen/oracle.hpp"
#include "lqscreen/portfolio.hpp"
#include "lqscreen/rng.hpp"

namespace lqscreen {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(lo + step * k);
  return out;
}

std::string at_R(double R) { return "R=" + format_cell(R); }

PortfolioOptions portfolio_options(const RunConfig& cfg) {
  PortfolioOptions o;
  o.rule = cfg.economy.portfolio.calibrate ? ContractRule::calibrated : ContractRule::solved;
  o.bilateral = cfg.solve_options();
  return o;
}

const std::vector<std::string> kSweepHeader{"R",         "a_star", "ell_star", "beta_star",
                                            "phi_share", "W_M",    "W_A",      "W_C"};

CsvTable sensitivity_panel(const std::string& name, const EconomyPrimitives& econ,
                           const SolveOptions& opts) {
  CsvTable t{name, kSweepHeader, {}};
  for (const auto& r : sweep_R(econ, table_R_grid(), opts).rows)
    t.add(r.R, r.a_star, r.ell_star, r.beta_star, r.phi_share, r.W_M, r.W_A, r.W_C);
  return t;
}

std::vector<CsvTable> table_sensitivity(const RunConfig& cfg) {
  const auto opts = cfg.solve_options();
  const double v = cfg.economy.v;
  return {sensitivity_panel("table_sensitivity_baseline", cfg.economy.build(), opts),
          sensitivity_panel("table_sensitivity_high", cfg.economy.build_with_surplus(v + 1.0),
                            opts)};
}

std::vector<CsvTable> table_menu(const RunConfig& cfg) {
  const auto opts = cfg.solve_options();
  CsvTable t{"table_menu", {"v_over_c", "R", "advance_share", "beta_star"}, {}};
  for (double ratio : {1.5, 2.0, 3.0}) {
    auto econ = cfg.economy.build_with_surplus(ratio);
    for (const auto& r : sweep_R(econ, table_R_grid(), opts).rows)
      t.add(ratio, r.R, r.a_star / econ.K(), r.beta_star);
  }
  return {t};
}

std::vector<CsvTable> table_contagion(const RunConfig& cfg) {
  const auto opts = portfolio_options(cfg);
  const double delta = cfg.economy.portfolio.delta;
  const auto base = cfg.economy.build();
  const auto grid = linspace_step(0.0, 2.5, 0.05);
  CsvTable t{"table_contagion",
             {"R", "delta_star", "delta_star_empirical", "value_change", "contagion_share"},
             {}};
  for (double R : table_R_grid()) {
    auto econ = base.with_tightness(R);
    double formula = kNaN, empirical = kNaN;
    try {
      auto th = contagion_threshold(econ, opts, grid);
      formula = th.formula;
      empirical = th.empirical;
    } catch (const DegeneracyError&) {
    }
    double change = value_change_vs_independent(PortfolioEconomy::symmetric(econ, 2, delta), opts);
    t.add(R, formula, empirical, change, contagion_share(econ, grid, opts));
  }
  return {t};
}

std::vector<CsvTable> figure_payoff(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  const auto opts = cfg.solve_options();
  const auto sol = solve_optimal(econ, opts);
  const auto pc = pure_contingent_value(econ, opts);
  const double K = econ.K();
  CsvTable t{"figure_payoff", {"theta", "U_advance", "U_contingent", "U_optimal"}, {}};
  for (int k = 0; k <= 100; ++k) {
    const double th = econ.lowest() + (econ.highest() - econ.lowest()) * k / 100.0;
    const double c = econ.c(th), mu = econ.mu(th);
    t.add(th, K - c - econ.phi(0.0), pc.slope * mu - c - econ.phi(K),
          sol.contract.advance + sol.contract.slope * mu - c - econ.phi(K - sol.contract.advance));
  }
  return {t};
}

std::vector<CsvTable> figure_advance(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  CsvTable t{"figure_advance", {"R", "a_star", "ell_star", "a_closed_form"}, {}};
  for (const auto& r : sweep_R(econ, linspace_step(0.05, 5.0, 0.05), cfg.solve_options()).rows)
    t.add(r.R, r.a_star, r.ell_star, closed_form_advance(r.R, econ.K()));
  return {t};
}

std::vector<CsvTable> figure_dominance(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  CsvTable t{"figure_dominance", {"R", "W_M", "W_A", "W_C"}, {}};
  for (const auto& r : sweep_R(econ, linspace_step(0.05, 5.0, 0.05), cfg.solve_options()).rows)
    t.add(r.R, r.W_M, r.W_A, r.W_C);
  return {t};
}

std::vector<CsvTable> figure_contagion_region(const RunConfig& cfg) {
  const auto opts = portfolio_options(cfg);
  const auto base = cfg.economy.build();
  CsvTable region{"figure_contagion_region",
                  {"R", "delta", "dPi_dRj", "direct", "spillover", "in_region"},
                  {}};
  CsvTable boundary{"figure_contagion_boundary", {"R", "delta_star"}, {}};
  for (double R : linspace_step(0.5, 5.0, 0.5)) {
    auto econ = base.with_tightness(R);
    for (double d : linspace_step(0.0, 2.5, 0.1)) {
      auto c = contagion_derivative(PortfolioEconomy::symmetric(econ, 2, d), 0, opts);
      region.add(R, d, c.total, c.direct_financing, c.screening_spillover, c.total > 0.0);
    }
    double formula = kNaN;
    try {
      formula = contagion_threshold(econ, opts, {0.0}).formula;
    } catch (const DegeneracyError&) {
    }
    boundary.add(R, formula);
  }
  return {region, boundary};
}

std::vector<CsvTable> figure_hump(const RunConfig& cfg) {
  const auto opts = portfolio_options(cfg);
  const auto econ = cfg.economy.build();
  const auto grid = linspace_step(0.25, 5.0, 0.25);
  auto hump = hump_scan(econ, grid, cfg.economy.portfolio.delta, opts);
  CsvTable t{"figure_hump", {"R", "Pi_P", "two_W"}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double w = solve_optimal(econ.with_tightness(grid[k]), opts.bilateral).value;
    t.add(grid[k], hump.value[k], 2.0 * w);
  }
  return {t};
}

std::vector<CsvTable> extension_dynamic(const RunConfig& cfg) {
  const auto& x = cfg.economy.extensions;
  const auto econ = cfg.economy.build();
  auto prior = PosteriorState::from_distribution(econ.dist(), x.posterior_grid);
  auto path = dynamic_path(econ, prior, x.true_theta, x.periods, cfg.seed, cfg.solve_options());
  CsvTable t{"extension_dynamic", {"t", "a", "b1", "cutoff", "hazard_shrink_ok"}, {}};
  for (const auto& s : path.steps)
    t.add(s.t, s.solution.contract.advance, s.solution.contract.slope, s.solution.cutoff,
          s.hazard_shrink_ok);
  return {t};
}

std::vector<CsvTable> extension_auction(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  std::vector<CsvTable> out;
  for (int n : cfg.economy.extensions.bidders) {
    auto bf = solve_bid_function(econ, n, std::nullopt, 20000, cfg.solve_options());
    CsvTable t{"extension_auction_n" + std::to_string(n), {"theta", "beta", "beta_fb"}, {}};
    for (Eigen::Index k = bf.grid.size() - 1; k >= 0; k -= 100)
      t.add(bf.grid[k], bf.bids[k], bf.full_info[k]);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<CsvTable> extension_renegotiation(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  CsvTable t{"extension_renegotiation", {"lambda", "a_star", "b1_star", "W"}, {}};
  for (double l : cfg.economy.extensions.lambda_grid) {
    auto s = solve_renegotiation(econ, l, cfg.solve_options());
    t.add(l, s.contract.advance, s.contract.slope, s.value);
  }
  return {t};
}

std::vector<CsvTable> extension_monitoring(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  MonitoringConfig mc{cfg.economy.extensions.kappa0, 10.0};
  CsvTable t{"extension_monitoring", {"R", "sigma_star", "foc_residual", "corner"}, {}};
  for (double R : table_R_grid()) {
    auto m = solve_monitoring(econ.with_tightness(R), mc, cfg.solve_options());
    t.add(R, m.sigma, m.foc_residual, m.corner);
  }
  return {t};
}

std::vector<CsvTable> extension_menu(const RunConfig& cfg) {
  const auto& x = cfg.economy.extensions;
  auto m = menu_equivalence_check(cfg.economy.build(), x.menu_types, x.menu_instruments,
                                  x.menu_instruments);
  CsvTable t{"extension_menu", {"types", "menu_value", "baseline_value", "gap", "ic_ok"}, {}};
  t.add(x.menu_types, m.menu_value, m.baseline_value, m.gap, m.ic.ok && m.ic.ir_ok);
  return {t};
}

std::vector<CsvTable> extension_reduce_2d(const RunConfig& cfg) {
  const auto& x = cfg.economy.extensions;
  const auto econ = cfg.economy.build();
  auto samples = sample_population(econ.dist(), x.alpha_support, x.samples, cfg.seed);
  auto r = reduce_2d(samples, econ, cfg.economy.v, x.xi_bins, cfg.solve_options());
  CsvTable t{"extension_reduce_2d",
             {"xi_min", "xi_max", "used", "rejected", "degenerate", "a_star", "b1_star", "cutoff",
              "W"},
             {}};
  if (r.solution)
    t.add(r.xi_min, r.xi_max, r.used, r.rejected, r.degenerate, r.solution->contract.advance,
          r.solution->contract.slope, r.solution->cutoff.theta, r.solution->value);
  else
    t.add(r.xi_min, r.xi_max, r.used, r.rejected, r.degenerate, kNaN, kNaN, kNaN, kNaN);
  return {t};
}

CheckResult check(std::string name, bool pass, double worst, std::string where) {
  return {std::move(name), pass ? "pass" : "fail", worst, std::move(where)};
}

}  // namespace

const std::vector<double>& table_R_grid() {
  static const std::vector<double> grid{0.5, 1.0, 2.0, 3.0, 5.0};
  return grid;
}

const std::vector<std::string>& table_names() {
  static const std::vector<std::string> names{"sensitivity", "menu", "contagion"};
  return names;
}
const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"payoff", "advance", "dominance",
                                              "contagion_region", "hump"};
  return names;
}
const std::vector<std::string>& extension_names() {
  static const std::vector<std::string> names{"dynamic", "auction",  "renegotiation",
                                              "monitoring", "menu", "reduce_2d"};
  return names;
}

std::vector<CsvTable> run_table(const std::string& name, const RunConfig& cfg) {
  if (name == "sensitivity") return table_sensitivity(cfg);
  if (name == "menu") return table_menu(cfg);
  if (name == "contagion") return table_contagion(cfg);
  throw NotFoundError("unknown table '" + name + "'");
}

std::vector<CsvTable> run_figure(const std::string& name, const RunConfig& cfg) {
  if (name == "payoff") return figure_payoff(cfg);
  if (name == "advance") return figure_advance(cfg);
  if (name == "dominance") return figure_dominance(cfg);
  if (name == "contagion_region") return figure_contagion_region(cfg);
  if (name == "hump") return figure_hump(cfg);
  throw NotFoundError("unknown figure '" + name + "'");
}

std::vector<CsvTable> run_extension(const std::string& name, const RunConfig& cfg) {
  if (name == "dynamic") return extension_dynamic(cfg);
  if (name == "auction") return extension_auction(cfg);
  if (name == "renegotiation") return extension_renegotiation(cfg);
  if (name == "monitoring") return extension_monitoring(cfg);
  if (name == "menu") return extension_menu(cfg);
  if (name == "reduce_2d") return extension_reduce_2d(cfg);
  throw NotFoundError("unknown extension '" + name + "'");
}

std::vector<CheckResult> run_verify(const RunConfig& cfg) {
  const auto econ = cfg.economy.build();
  const auto opts = cfg.solve_options();
  const int grid = std::max(cfg.grid, 50);
  std::vector<CheckResult> out;

  {  // grid oracle vs continuous solver
    double worst = 0.0;
    std::string where = at_R(0.5);
    for (double R : {0.5, 1.0, 2.0}) {
      auto e = econ.with_tightness(R);
      double gap = std::abs(grid_search_optimal(e, grid, grid).best_W - solve_optimal(e, opts).value);
      if (gap > worst) {
        worst = gap;
        where = at_R(R);
      }
    }
    out.push_back(check("grid_agreement", worst <= 1e-3, worst, where));
  }

  {  // the solved contract as a 50-type mechanism
    auto sol = solve_optimal(econ, opts);
    auto rep = ic_verify(uniform_mechanism(econ, sol.contract, sol.cutoff, 50), econ);
    std::string where = rep.true_index < 0 ? "none"
                                           : "type=" + std::to_string(rep.true_index) +
                                                 ",report=" + std::to_string(rep.report_index);
    out.push_back(check("ic_solved_mechanism", rep.ok, rep.worst_violation, where));
  }

  {  // a decreasing slope schedule must be caught
    const double span = econ.mu(econ.highest()) - econ.mu(econ.lowest());
    if (!(span > 0.0)) {
      out.push_back({"ic_detects_decreasing_slope", "skip", 0.0, "flat signal"});
    } else {
      auto m = uniform_mechanism(econ, {0.5 * econ.K(), 0.0, 0.0}, {econ.lowest(), CutoffStatus::full}, 50);
      m.slopes = Eigen::VectorXd::LinSpaced(50, 2.0, 0.0);
      auto rep = ic_verify(m, econ);
      out.push_back(check("ic_detects_decreasing_slope", !rep.ok, rep.worst_violation,
                          "type=" + std::to_string(rep.true_index) +
                              ",report=" + std::to_string(rep.report_index)));
    }
  }

  {  // rent identity over seeded draws
    CounterRng rng(cfg.seed);
    const double lo = econ.lowest(), hi = econ.highest();
    double worst = 0.0;
    int at = 0;
    for (int k = 0; k < 100; ++k) {
      double a = rng.uniform(0.0, econ.K()), b1 = rng.uniform(0.0, 5.0), t = rng.uniform(lo, hi);
      double gap = std::abs(rent_identity_check(econ, a, b1, t).gap);
      if (gap > worst) {
        worst = gap;
        at = k;
      }
    }
    out.push_back(check("rent_identity", worst <= 1e-5, worst, "draw=" + std::to_string(at)));
  }

  {  // advance rises with tightness
    auto sw = sweep_R(econ, {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}, opts);
    double worst = 0.0;
    std::string where = "none";
    for (std::size_t k = 1; k < sw.rows.size(); ++k) {
      double drop = sw.rows[k - 1].a_star - sw.rows[k].a_star;
      if (drop > worst) {
        worst = drop;
        where = at_R(sw.rows[k].R);
      }
    }
    out.push_back(check("advance_monotone_in_R", worst <= 1e-9, worst, where));
  }

  {  // an uninformative signal leaves only the advance
    const double span = econ.mu(econ.highest()) - econ.mu(econ.lowest());
    if (span > 0.0) {
      out.push_back({"uninformative_signal_zero_slope", "skip", 0.0, "informative signal"});
    } else {
      double b_solver = solve_optimal(econ, opts).contract.slope;
      double b_grid = grid_search_optimal(econ, grid, grid).best_b1;
      double worst = std::max(b_solver, b_grid);
      out.push_back(check("uninformative_signal_zero_slope", worst <= 1e-9, worst,
                          b_solver >= b_grid ? "solver" : "grid"));
    }
  }

  {  // unimodality of W(b1) assumed by the scan-and-refine maximiser
    const double top = slope_upper_bound(econ, opts.slope_cap);
    if (!(top > 0.0)) {
      out.push_back({"objective_single_turn", "skip", 0.0, "no slope range"});
    } else {
      std::vector<double> g;
      for (int k = 0; k < 100; ++k) g.push_back(top * k / 99.0);
      auto p = concavity_probe(econ, g);
      out.push_back(check("objective_single_turn", p.first_sign_changes <= 1,
                          double(p.first_sign_changes), "b1 in [0," + format_cell(top) + "]"));
    }
  }
  return out;
}

std::string render_report(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["check"] = c.check;
    j["status"] = c.status;
    j["worst_violation"] = c.worst_violation;
    j["location"] = c.location;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (c.status == "fail") return false;
  return true;
}

}  // namespace lqscreen
