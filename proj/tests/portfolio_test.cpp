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

#include <cmath>

#include <gtest/gtest.h>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

// Benchmark economy whose financing wedge at advance a equals a, so that the
// symmetric fixed point has the closed form (a + b1 − δ)/(1 + b1 − δ).
EconomyPrimitives wedge_equals_advance(double a) {
  return EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 2.0 * a / ((1 - a) * (1 - a)));
}

PortfolioOptions fixed_rule() {
  PortfolioOptions o;
  o.rule = ContractRule::fixed;
  return o;
}

TEST(SymmetricCutoff, Examples) {
  EXPECT_NEAR(symmetric_cutoff(0.27, 0.5, 0.0).theta, 0.77 / 1.5, 1e-15);
  SymmetricCutoff c = symmetric_cutoff(0.27, 0.5, 1.2);
  EXPECT_EQ(c.theta, 0.0);
  EXPECT_TRUE(c.clamped);
  EXPECT_EQ(symmetric_cutoff(1.0, 0.0, 0.0).theta, 1.0);
  EXPECT_THROW(symmetric_cutoff(0.27, 0.5, 1.5), DegeneracyError);
}

TEST(SolveCutoffs, DecoupledEqualsBilateral) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 0.5);
  PortfolioSolution s = solve_cutoffs(PortfolioEconomy::symmetric(e, 2, 0.0));
  BilateralSolution b = solve_optimal(e);
  EXPECT_NEAR(s.cutoffs[0], b.cutoff.theta, 1e-10);
  EXPECT_NEAR(s.cutoffs[1], b.cutoff.theta, 1e-10);
  EXPECT_NEAR(s.total_value, 2.0 * b.value, 1e-9);
}

TEST(SolveCutoffs, SymmetricClosedForm) {
  auto e = wedge_equals_advance(0.27);
  auto port = PortfolioEconomy::symmetric(e, 2, 0.3);
  port.contracts.assign(2, Contract{0.27, 0.0, 0.5});
  PortfolioSolution s = solve_cutoffs(port, fixed_rule());
  EXPECT_NEAR(s.cutoffs[0], 0.39167, 5e-6);
  EXPECT_NEAR(s.cutoffs[0], symmetric_cutoff(0.27, 0.5, 0.3).theta, 1e-8);
  EXPECT_NEAR(s.cutoffs[1], s.cutoffs[0], 1e-12);
  EXPECT_LT(s.residuals.maxCoeff(), 1e-8);
  EXPECT_LT(s.iterations, 200);
  EXPECT_FALSE(s.multiple_fixed_points);
}

TEST(SolveCutoffs, ChainResidualsAndValueSplit) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 3.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 1) = d(1, 0) = d(1, 2) = d(2, 1) = 0.2;
  PortfolioSolution s = solve_cutoffs(PortfolioEconomy::network(e, d));
  EXPECT_LT(s.residuals.maxCoeff(), 1e-8);
  EXPECT_NEAR(s.total_value, s.per_relationship_value.sum(), 1e-12);
  // The middle node is coupled twice and implements more.
  EXPECT_LT(s.cutoffs[1], s.cutoffs[0]);
  EXPECT_NEAR(s.cutoffs[0], s.cutoffs[2], 1e-10);
}

TEST(SolveCutoffs, MultipleFixedPointsFlagged) {
  // v = 1.5 and Φ = 0.6 > v − 1: the symmetric interior point is unstable.
  auto e = EconomyPrimitives::benchmark(1.5, 0.0, 1.0, 1.875);
  auto port = PortfolioEconomy::symmetric(e, 2, 1.5);
  port.contracts.assign(2, Contract{0.2, 0.0, 0.2});
  PortfolioSolution s = solve_cutoffs(port, fixed_rule());
  EXPECT_TRUE(s.multiple_fixed_points);
  EXPECT_NEAR(s.cutoffs[0], 1.0, 1e-12);
}

TEST(SolveCutoffs, RejectsInvalidNetworks) {
  auto e = EconomyPrimitives::benchmark();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 1) = 0.5;
  EXPECT_THROW(PortfolioEconomy::network(e, d), DomainError);
  d(1, 0) = 0.5;
  d(0, 0) = 0.1;
  EXPECT_THROW(PortfolioEconomy::network(e, d), DomainError);
  EXPECT_THROW(PortfolioEconomy::symmetric(e, 1, 0.2), DomainError);
  EXPECT_THROW(solve_cutoffs(PortfolioEconomy::symmetric(e, 2, 0.2), fixed_rule()), DomainError);
}

TEST(PortfolioValue, ComplementarityRaisesValue) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  PortfolioSolution s = solve_cutoffs(PortfolioEconomy::symmetric(e, 2, 0.3));
  EXPECT_GT(s.total_value, 2.0 * solve_optimal(e).value);
  EXPECT_NEAR(s.per_relationship_value[0], s.total_value / 2, 1e-12);
  EXPECT_NEAR(s.per_relationship_value[1], s.total_value / 2, 1e-12);
}

TEST(PortfolioValue, MonotoneCoupling) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  double prev = 2.0;
  for (double d = 0.0; d <= 1.5; d += 0.1) {
    PortfolioSolution s = solve_cutoffs(PortfolioEconomy::symmetric(e, 2, d));
    EXPECT_LE(s.cutoffs[0], prev + 1e-12);
    prev = s.cutoffs[0];
  }
}

TEST(CutoffSensitivities, ImplicitMatchesDifferences) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 3.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 1) = d(1, 0) = 0.2;
  d(1, 2) = d(2, 1) = 0.1;
  for (const auto& port : {PortfolioEconomy::symmetric(e, 2, 0.3), PortfolioEconomy::network(e, d)}) {
    for (int j = 0; j < port.size(); ++j) {
      CutoffSensitivity s = cutoff_sensitivities(port, j);
      for (int i = 0; i < port.size(); ++i)
        EXPECT_NEAR(s.implicit[i], s.differenced[i], 1e-3 * std::abs(s.differenced[i]) + 1e-9)
            << "i=" << i << " j=" << j;
      EXPECT_GT(s.implicit[j], 0.0);
    }
  }
}

TEST(ContagionDerivative, DecoupledIsDirectUnderHeldInstruments) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  auto port = PortfolioEconomy::symmetric(e, 2, 0.0);
  port.contracts.assign(2, solve_optimal(e).contract);
  ContagionDecomposition c = contagion_derivative(port, 0, fixed_rule());
  EXPECT_EQ(c.screening_spillover, 0.0);
  EXPECT_NEAR(c.total, c.direct_financing, 1e-8);
  EXPECT_NEAR(c.instrument_adjustment, 0.0, 1e-8);
}

TEST(ContagionDerivative, PartsReproduceDifferencedTotal) {
  for (ContractRule rule : {ContractRule::solved, ContractRule::calibrated}) {
    PortfolioOptions o;
    o.rule = rule;
    for (double mu0 : {0.0, 0.1})
      for (double d : {0.1, 0.6, 1.2}) {
        auto port = PortfolioEconomy::symmetric(EconomyPrimitives::benchmark(2.0, mu0, 1.0, 1.0), 2, d);
        ContagionDecomposition c = contagion_derivative(port, 0, o);
        EXPECT_NEAR(c.analytic_total(), c.total, 5e-3 * std::abs(c.total))
            << to_string(rule) << " mu0=" << mu0 << " delta=" << d;
      }
  }
}

TEST(ContagionThreshold, FormulaAndDegeneracy) {
  EXPECT_THROW(contagion_threshold(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0)),
               DegeneracyError);
  PortfolioOptions o;
  o.rule = ContractRule::calibrated;
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  ContagionThreshold t = contagion_threshold(e, o, {0.0});
  const double a = t.contract.advance, b1 = t.contract.slope, ell = 1 - a;
  EXPECT_NEAR(ell * ell / 2, 0.26795, 1e-5);
  EXPECT_NEAR(t.formula, ell * (1 + b1) / (b1 * (1 - t.cutoff)) * ell * ell / 2, 1e-12);
}

TEST(Centrality, IsolatedSymmetricAndStar) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 3.0);
  Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 0.4;
  EXPECT_EQ(contagion_centrality(PortfolioEconomy::network(e, iso), 2), 0.0);

  PortfolioSolution s = solve_cutoffs(PortfolioEconomy::symmetric(e, 2, 0.3));
  EXPECT_NEAR(s.centralities[0], s.centralities[1], 1e-12);
  EXPECT_GT(s.centralities[0], 0.0);

  Eigen::MatrixXd star = Eigen::MatrixXd::Zero(4, 4);
  for (int k = 1; k < 4; ++k) star(0, k) = star(k, 0) = 0.1;
  auto port = PortfolioEconomy::network(e, star);
  EXPECT_GT(contagion_centrality(port, 0), contagion_centrality(port, 1));
}

TEST(HumpScan, NoRiseWithoutComplementarity) {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.5 + 0.25 * k);
  HumpScan h = hump_scan(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0), grid, 0.0);
  EXPECT_TRUE(h.rising_intervals.empty());
  EXPECT_FALSE(h.has_interior_peak);
  EXPECT_EQ(h.slope.size(), grid.size() - 1);
}

TEST(Breadth, DecoupledNeverPrefersSingle) {
  for (double R : {0.5, 1.0, 3.0}) {
    auto port = PortfolioEconomy::symmetric(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, R), 2, 0.0);
    BreadthComparison b = breadth_comparison(port);
    EXPECT_FALSE(b.prefer_single);
    EXPECT_NEAR(b.dual_value, 2.0 * b.single_value, 1e-9);
  }
}

TEST(UniformSubsidy, DecoupledHelpsSymmetrically) {
  auto port = PortfolioEconomy::symmetric(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0), 2, 0.0);
  Eigen::VectorXd d = uniform_subsidy_effect(port, 1.0, 0.05);
  EXPECT_GT(d[0], 0.0);
  EXPECT_NEAR(d[0], d[1], 1e-12);
  EXPECT_THROW(uniform_subsidy_effect(port, 1.0, 2.0), DomainError);
}

TEST(ValueChange, CouplingNeverLosesToIndependentCutoffs) {
  // Coupled cutoffs maximise Π given the instruments.
  for (double d : {0.3, 0.8, 1.2}) {
    auto port = PortfolioEconomy::symmetric(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0), 2, d);
    EXPECT_LE(value_change_vs_independent(port), 1e-12);
  }
}

}  // namespace
}  // namespace lqscreen
