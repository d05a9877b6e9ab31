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

#include "lqscreen/economy.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

TEST(Hazard, Uniform) {
  auto u = TypeDistribution::uniform();
  EXPECT_DOUBLE_EQ(hazard(u, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(hazard(u, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(hazard(u, 1.0), 0.0);
  EXPECT_THROW(hazard(u, 1.5), DomainError);
  EXPECT_THROW(hazard(u, -0.1), DomainError);
}

TEST(VirtualType, Uniform) {
  auto u = TypeDistribution::uniform();
  EXPECT_DOUBLE_EQ(virtual_type(u, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(virtual_type(u, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(virtual_type(u, 0.75), 0.5);
}

TEST(Hazard, AnalyticMatchesComposition) {
  for (const auto& d : {TypeDistribution::truncated_exponential(2.0, 0.0, 1.0),
                        TypeDistribution::power(2.0, 0.1, 1.0)}) {
    TypeDistribution bare(d.lower(), d.upper(), [&](double t) { return d.cdf(t); },
                          [&](double t) { return d.pdf(t); });
    for (double t = d.lower(); t < d.upper(); t += 0.05)
      EXPECT_NEAR(d.hazard(t), bare.hazard(t), 1e-12) << d.kind() << " at " << t;
  }
}

TEST(Regularity, StandardFamiliesPass) {
  EXPECT_TRUE(check_regularity(TypeDistribution::uniform()).regular);
  EXPECT_TRUE(check_regularity(TypeDistribution::truncated_exponential(3.0, 0.0, 1.0)).regular);
  EXPECT_TRUE(check_regularity(TypeDistribution::power(2.0, 0.1, 1.0)).regular);
  EXPECT_TRUE(check_regularity(TypeDistribution::power(1.0, 0.0, 1.0)).regular);
}

TEST(Regularity, BimodalDensityFails) {
  std::vector<double> th, f;
  for (int k = 0; k <= 400; ++k) {
    double t = k / 400.0;
    th.push_back(t);
    f.push_back(0.02 + std::exp(-std::pow(t - 0.2, 2) / 0.002) +
                std::exp(-std::pow(t - 0.8, 2) / 0.002));
  }
  auto d = TypeDistribution::tabulated(th, f);
  auto rep = check_regularity(d);
  EXPECT_FALSE(rep.regular);
  EXPECT_GT(rep.worst_drop, 0.0);
}

TEST(TabulatedDistribution, ReproducesUniform) {
  auto d = TypeDistribution::tabulated({0.0, 0.5, 1.0}, {3.0, 3.0, 3.0});
  EXPECT_NEAR(d.cdf(0.3), 0.3, 1e-14);
  EXPECT_NEAR(d.pdf(0.7), 1.0, 1e-14);
  EXPECT_NEAR(d.hazard(0.25), 0.75, 1e-14);
}

TEST(HistogramDistribution, PiecewiseLinearCdf) {
  auto d = TypeDistribution::histogram({0.0, 1.0, 2.0}, {1.0, 3.0});
  EXPECT_NEAR(d.cdf(1.0), 0.25, 1e-14);
  EXPECT_NEAR(d.cdf(1.5), 0.625, 1e-14);
  EXPECT_NEAR(d.pdf(0.5), 0.25, 1e-14);
  EXPECT_NEAR(d.pdf(1.5), 0.75, 1e-14);
}

TEST(FinancingCost, QuadraticValues) {
  EXPECT_EQ(financing_cost(FinancingCost::quadratic(3.0), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(financing_cost(FinancingCost::quadratic(1.0), 1.0), 0.5);
  // Φ_R at the benchmark borrowing ℓ = 0.73.
  EXPECT_NEAR(marginal_R(FinancingCost::quadratic(1.0), 0.73), 0.26645, 1e-12);
  EXPECT_DOUBLE_EQ(marginal_ell(FinancingCost::quadratic(2.0), 0.3), 0.6);
  EXPECT_DOUBLE_EQ(second_ell(FinancingCost::quadratic(2.0), 0.3), 2.0);
  EXPECT_THROW(financing_cost(FinancingCost::quadratic(1.0), -0.5), DomainError);
  EXPECT_THROW(FinancingCost::quadratic(-1.0), DomainError);
}

TEST(FinancingCost, QuadraticPropertiesOnGrid) {
  for (double R : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    auto fin = FinancingCost::quadratic(R);
    EXPECT_TRUE(check_financing(fin, 1.0).ok);
    for (double ell = 0.05; ell <= 1.0; ell += 0.05) {
      double h = 1e-5;
      double fd = (fin.cost(ell + h) - fin.cost(ell - h)) / (2 * h);
      EXPECT_NEAR(fd, fin.marginal_ell(ell), 1e-6);
      double fdR = (fin.with_tightness(R + h).cost(ell) - fin.with_tightness(R - h).cost(ell)) /
                   (2 * h);
      EXPECT_NEAR(fdR, fin.marginal_R(ell), 1e-6);
    }
  }
}

TEST(FinancingCost, TabulatedSplineReproducesQuadratic) {
  std::vector<double> ell, g;
  for (int k = 0; k <= 40; ++k) {
    ell.push_back(k / 40.0);
    g.push_back(0.5 * ell.back() * ell.back());
  }
  auto tab = FinancingCost::tabulated(ell, g, 2.0);
  auto quad = FinancingCost::quadratic(2.0);
  for (double l = 0.1; l < 0.9; l += 0.1) {
    EXPECT_NEAR(tab.cost(l), quad.cost(l), 1e-6);
    EXPECT_NEAR(tab.marginal_ell(l), quad.marginal_ell(l), 1e-3);
    EXPECT_NEAR(tab.marginal_R(l), quad.marginal_R(l), 1e-6);
  }
  EXPECT_THROW(tab.cost(1.5), DomainError);
  EXPECT_THROW(FinancingCost::tabulated({0.1, 1.0}, {0.0, 1.0}, 1.0), DomainError);
}

TEST(EconomyPrimitives, BenchmarkSatisfiesInvariants) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0);
  EXPECT_TRUE(check_primitives(e).ok);
  EXPECT_DOUBLE_EQ(e.mu(0.0), 0.1);
  EXPECT_DOUBLE_EQ(e.V(0.5), 1.0);
  EXPECT_DOUBLE_EQ(e.phi(1.0), 0.5);
}

TEST(EconomyPrimitives, FlatSignalNeedsExplicitAllowance) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0, 0.0);
  EXPECT_FALSE(check_primitives(e).ok);
  EXPECT_TRUE(check_primitives(e, true).ok);
}

TEST(EconomyPrimitives, DerivedCopiesAreIndependent) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0);
  auto e2 = e.with_tightness(3.0);
  auto e3 = e.with_signal_scale(0.5);
  EXPECT_DOUBLE_EQ(e.R(), 1.0);
  EXPECT_DOUBLE_EQ(e2.R(), 3.0);
  EXPECT_DOUBLE_EQ(e3.mu(0.0), 0.05);
  EXPECT_DOUBLE_EQ(e3.mu_prime(0.3), 0.5);
  EXPECT_DOUBLE_EQ(e.mu_prime(0.3), 1.0);
}

TEST(EconomyPrimitives, RejectsBadParameters) {
  EXPECT_THROW(EconomyPrimitives::benchmark(2.0, -0.1), DomainError);
  EXPECT_THROW(EconomyPrimitives::benchmark(2.0, 0.0, 0.0), DomainError);
}

}  // namespace
}  // namespace lqscreen
