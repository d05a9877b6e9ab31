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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

// Uniform[0,1], V = vθ, c = θ, μ = μ0 + sθ, Φ = (R/2)ℓ², K = 1.
// ψ(θ) = (v − 1 + s·b1)θ − Φ − s·b1, so everything below is closed form.
struct UniformOracle {
  double v, mu0, R, s = 1.0;

  double advance(double b1) const {
    // a + b1 μ0 = (R/2)(1 − a)², smaller root, clamped to [0, 1].
    double need = -b1 * mu0;
    if (R == 0.0) return std::clamp(need, 0.0, 1.0);
    // (R/2)a² − (R + 1)a + R/2 + need = 0
    double A = R / 2, B = -(R + 1), C = R / 2 + need;
    double a = (-B - std::sqrt(B * B - 4 * A * C)) / (2 * A);
    return std::clamp(a, 0.0, 1.0);
  }
  double cutoff(double a, double b1) const {
    double phi = R / 2 * (1 - a) * (1 - a);
    double slope = v - 1 + s * b1;
    return std::clamp((phi + s * b1) / slope, 0.0, 1.0);
  }
  double value(double a, double b1) const {
    double t = cutoff(a, b1);
    if (t >= 1.0) return 0.0;
    double phi = R / 2 * (1 - a) * (1 - a);
    double slope = v - 1 + s * b1;
    // ∫_t^1 (slope·θ − phi − s b1) dθ − a
    return slope * (1 - t * t) / 2 - (phi + s * b1) * (1 - t) - a;
  }
};

TEST(BindingIrAdvance, BenchmarkMatchesClosedForm) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  for (double b1 : {0.0, 0.7, 3.0}) EXPECT_NEAR(binding_ir_advance(e, b1), 0.26795, 5e-6);
  EXPECT_NEAR(binding_ir_advance(e, 0.0), 2.0 - std::sqrt(3.0), 1e-12);
  EXPECT_EQ(binding_ir_advance(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.0), 0.5), 0.0);
}

TEST(BindingIrAdvance, PositiveOffset) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0);
  double a = binding_ir_advance(e, 1.0);
  EXPECT_LT(std::abs(a + 0.1 - 0.5 * (1 - a) * (1 - a)), 1e-10);
  EXPECT_NEAR(a, (UniformOracle{2.0, 0.1, 1.0}.advance(1.0)), 1e-12);
  EXPECT_THROW(binding_ir_advance(e, -1.0), DomainError);
}

TEST(IrSlope, Examples) {
  EXPECT_EQ(ir_slope(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0), 0.5).value, 0.0);
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0);
  EXPECT_NEAR(ir_slope_at_advance(e, 0.2), -0.1 / 1.8, 1e-12);
  EXPECT_NEAR(ir_slope(EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 0.0), 0.0).value, -0.1, 1e-12);
  // a = 0 is a clamp: one-sided.
  EXPECT_TRUE(ir_slope(e, 6.0).one_sided);
  EXPECT_FALSE(ir_slope(e, 1.0).one_sided);
}

TEST(IrSlope, MatchesFiniteDifferenceOfAdvance) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 2.0);
  for (double b1 : {0.5, 1.5, 3.0}) {
    double h = 1e-6;
    double fd = (binding_ir_advance(e, b1 + h) - binding_ir_advance(e, b1 - h)) / (2 * h);
    EXPECT_NEAR(ir_slope(e, b1).value, fd, 1e-7);
  }
}

TEST(VirtualSurplus, Examples) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  const double a = 2.0 - std::sqrt(3.0);
  EXPECT_NEAR(virtual_surplus(e, 1.0, a, 0.7), 1.0 - a, 1e-12);
  EXPECT_NEAR(virtual_surplus(e, 0.4, 1.0, 0.0), 0.4, 1e-12);
  EXPECT_NEAR(virtual_surplus(e, 0.4, a, 0.5), 0.4 - a - 0.5 * 0.6, 1e-12);
}

TEST(Cutoff, LinearRootAndBoundaryStatuses) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  const double a = 2.0 - std::sqrt(3.0);
  Cutoff c = cutoff(e, a, 0.0);
  EXPECT_EQ(c.status, CutoffStatus::interior);
  EXPECT_NEAR(c.theta, a, 1e-10);
  Cutoff full = cutoff(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.0), 0.0, 0.0, 0.1);
  EXPECT_EQ(full.status, CutoffStatus::full);
  EXPECT_EQ(full.theta, 0.0);
  Cutoff empty = cutoff(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 5.0), 0.0, 0.0);
  EXPECT_EQ(empty.status, CutoffStatus::empty);
  EXPECT_EQ(empty.theta, 1.0);
}

TEST(PrincipalValue, BenchmarkClosedForm) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  const double a = 2.0 - std::sqrt(3.0);
  ContractValue v = principal_value(e, 0.0);
  EXPECT_NEAR(v.value, (1 - a) * (1 - a) / 2 - a, 1e-9);
  EXPECT_NEAR(principal_value(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.0), 0.0).value, 0.5,
              1e-12);
}

TEST(PrincipalValue, RandomDrawsMatchOracleAndDecomposition) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uR(0.0, 5.0), ub(0.0, 4.0), um(0.0, 0.5);
  for (int k = 0; k < 100; ++k) {
    UniformOracle o{2.0, um(rng), uR(rng)};
    auto e = EconomyPrimitives::benchmark(o.v, o.mu0, 1.0, o.R);
    double b1 = ub(rng);
    ContractValue v = principal_value(e, b1);
    double a = o.advance(b1);
    EXPECT_NEAR(v.contract.advance, a, 1e-10);
    EXPECT_NEAR(v.value, o.value(a, b1), 1e-9) << "R=" << o.R << " b1=" << b1;
    EXPECT_NEAR(v.value, v.decomposition.total(), 1e-8);
  }
}

TEST(PrincipalValue, EmptySetHasNoOutlay) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 3.0);
  ContractValue v = principal_value(e, 9.0);
  EXPECT_EQ(v.cutoff.status, CutoffStatus::empty);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.decomposition.advance_outlay, 0.0);
}

TEST(RentSchedule, Examples) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  EXPECT_NEAR(rent_schedule(e, 0.0, 0.6), -0.6, 1e-12);
  EXPECT_NEAR(rent_schedule(e, 1.0, 0.6), 0.0, 1e-12);
  EXPECT_NEAR(rent_schedule(e, 1.5, 0.4), 0.2, 1e-12);
}

TEST(ClosedForm, EllStar) {
  EXPECT_NEAR(closed_form_ell_star(1.0), 0.73205, 5e-6);
  EXPECT_NEAR(closed_form_ell_star(2.0), 0.61803, 5e-6);
  EXPECT_EQ(closed_form_ell_star(0.0), 1.0);
  EXPECT_NEAR(closed_form_ell_star(1e-9), 1.0, 1e-8);
  EXPECT_THROW(closed_form_ell_star(-1.0), DomainError);
  for (double R : {0.3, 1.7, 4.0})
    EXPECT_NEAR(closed_form_ell_star(R), (-1 + std::sqrt(1 + 2 * R)) / R, 1e-14);
}

TEST(SolveOptimal, BenchmarkAdvanceColumn) {
  const double R[] = {0.5, 1.0, 2.0, 3.0, 5.0};
  const double reported[] = {0.17, 0.27, 0.38, 0.45, 0.54};
  for (int k = 0; k < 5; ++k) {
    BilateralSolution s = solve_optimal(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, R[k]));
    EXPECT_NEAR(s.contract.advance, reported[k], 0.005);
    EXPECT_NEAR(s.contract.advance, 1.0 - closed_form_ell_star(R[k]), 1e-8);
    EXPECT_EQ(s.contract.slope, 0.0);
    EXPECT_EQ(s.boundary_flag, BoundaryFlag::corner_b1_zero);
    EXPECT_NEAR(s.value, s.decomposition.total(), 1e-8);
  }
}

TEST(SolveOptimal, PositiveOffsetDominatesDenseScanOfOracle) {
  // Every slope on a fine grid is weakly worse than the solver's answer.
  for (double R : {0.5, 1.0, 2.0}) {
    UniformOracle o{2.0, 0.1, R};
    auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, R);
    BilateralSolution s = solve_optimal(e);
    double b_hi = slope_upper_bound(e);
    for (int k = 0; k <= 2000; ++k) {
      double b1 = b_hi * k / 2000;
      EXPECT_LE(o.value(o.advance(b1), b1), s.value + 1e-9) << "R=" << R << " b1=" << b1;
    }
    EXPECT_NE(s.boundary_flag, BoundaryFlag::interior);
  }
}

TEST(SolveOptimal, PositiveOffsetCornerAtUnitTightness) {
  // At R = 1 the best slope drives the advance to zero: b̄1 = Φ(1)/μ0 = 5.
  BilateralSolution s = solve_optimal(EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0));
  EXPECT_EQ(s.boundary_flag, BoundaryFlag::corner_a_zero);
  EXPECT_NEAR(s.contract.slope, 5.0, 1e-9);
  EXPECT_EQ(s.contract.advance, 0.0);
  EXPECT_NEAR(s.cutoff.theta, 11.0 / 12.0, 1e-9);
  EXPECT_NEAR(s.value, 1.0 / 48.0, 1e-9);
}

TEST(SolveOptimal, FlatSignalGivesZeroSlope) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0, 0.0);
  BilateralSolution s = solve_optimal(e);
  EXPECT_EQ(s.contract.slope, 0.0);
}

TEST(SolveOptimal, BlackwellScalingWeaklyRaisesSlope) {
  for (double R : {0.5, 1.0, 2.0}) {
    auto base = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, R, 1.0);
    auto sharp = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, R, 1.5);
    BilateralSolution s0 = solve_optimal(base), s1 = solve_optimal(sharp);
    EXPECT_GE(s1.contract.slope, s0.contract.slope - 1e-9);
    double b0 = cash_intensity(base, s0.contract, s0.cutoff);
    double b1 = cash_intensity(sharp, s1.contract, s1.cutoff);
    if (std::isfinite(b0) && std::isfinite(b1)) EXPECT_LE(b1, b0 + 1e-9);
  }
}

TEST(SolveOptimal, EmptySetPlateauIsFlagged) {
  BilateralSolution s = solve_optimal(EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 3.0));
  EXPECT_EQ(s.boundary_flag, BoundaryFlag::empty_set);
  EXPECT_EQ(s.value, 0.0);
}

TEST(SolveOptimal, NoFrictionAdvanceIrrelevantWhenLowestSignalIsZero) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.0);
  EXPECT_EQ(binding_ir_advance(e, 0.0), binding_ir_advance(e, 2.0));
  EXPECT_NEAR(solve_optimal(e).value, 0.5, 1e-12);
}

TEST(PureAdvance, Values) {
  EXPECT_NEAR(pure_advance_value(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.5)), 0.25, 1e-10);
  EXPECT_EQ(pure_advance_value(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.5)),
            pure_advance_value(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 5.0)));
  EXPECT_EQ(pure_advance_value(EconomyPrimitives::benchmark(1.0, 0.0, 1.0, 1.0)), 0.0);
}

TEST(PureContingent, BenchmarkClosedForm) {
  for (double R : {0.0, 0.5, 1.0, 1.5, 2.5}) {
    double expect = R < 2.0 ? (1 - R / 2) * (1 - R / 2) / 2 : 0.0;
    auto w = pure_contingent_value(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, R));
    EXPECT_NEAR(w.value, expect, 1e-9) << "R=" << R;
    EXPECT_EQ(w.slope, 0.0);
  }
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 0.0);
  EXPECT_GT(pure_contingent_value(e).value, pure_advance_value(e));
}

TEST(PureContingent, OffsetEnforcesParticipation) {
  // a = 0 needs b1 ≥ Φ(1)/μ0.
  auto w = pure_contingent_value(EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0));
  EXPECT_NEAR(w.slope, 5.0, 1e-9);
  EXPECT_NEAR(w.value, 1.0 / 48.0, 1e-9);
}

TEST(CrossingThreshold, Benchmark) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  double r = crossing_threshold(e);
  EXPECT_NEAR(r, 2.0 - std::sqrt(2.0), 1e-9);
  const double wa = pure_advance_value(e);
  EXPECT_NEAR(pure_contingent_value(e.with_tightness(r)).value, wa, 1e-8);
  EXPECT_GT(pure_contingent_value(e.with_tightness(r - 0.1)).value, wa);
  EXPECT_LT(pure_contingent_value(e.with_tightness(r + 0.1)).value, wa);
}

TEST(CrossingThreshold, MissingCrossing) {
  // v = 1: W_A = 0 and W_C(0) = 0, no strict crossing exists.
  EXPECT_THROW(crossing_threshold(EconomyPrimitives::benchmark(1.0, 0.0, 1.0, 1.0)),
               NotFoundError);
}

TEST(SweepR, AdvanceIncreasingAndConcave) {
  Sweep s = sweep_R(EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0), {0.5, 1.0, 2.0, 3.0, 5.0});
  ASSERT_EQ(s.rows.size(), 5u);
  EXPECT_TRUE(s.diagnostics.advance_increasing);
  EXPECT_TRUE(s.diagnostics.advance_concave);
  for (const auto& r : s.rows) {
    EXPECT_NEAR(r.a_star + r.ell_star, 1.0, 1e-15);
    // With v − c = 1 the financing share equals the advance.
    EXPECT_NEAR(r.phi_share, r.a_star, 1e-9);
    EXPECT_EQ(r.beta_star, 1.0);
    EXPECT_NEAR(r.W_A, 0.25, 1e-10);
  }
}

TEST(SufficientStatistics, CornerReported) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  BilateralSolution s = solve_optimal(e);
  SufficientStatistics st = sufficient_statistics(e, s);
  EXPECT_NEAR(st.marginal_financing_cost, std::sqrt(3.0) - 1.0, 1e-10);
  EXPECT_TRUE(st.corner);
}

TEST(DropIntercept, WeaklyDominatesStrictlyWithFriction) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ub0(0.01, 0.2), ub1(0.0, 3.0), uR(0.1, 3.0);
  for (int k = 0; k < 50; ++k) {
    auto e = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, uR(rng));
    auto c = drop_intercept(e, ub0(rng), ub1(rng));
    EXPECT_GE(c.transformed_value, c.original_value - 1e-12);
    EXPECT_GE(c.participation_slack, 0.0);
  }
  auto frictionless = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 0.0);
  auto c = drop_intercept(frictionless, 0.05, 0.5);
  EXPECT_NEAR(c.transformed_value, c.original_value, 1e-12);
  auto tight = EconomyPrimitives::benchmark(2.0, 0.1, 1.0, 1.0);
  auto d = drop_intercept(tight, 0.05, 0.5);
  EXPECT_GT(d.transformed_value, d.original_value + 1e-6);
}

TEST(CalibratedContract, HitsTargetCashIntensity) {
  auto e = EconomyPrimitives::benchmark(2.0, 0.0, 1.0, 1.0);
  Contract k = calibrated_contract(e, 0.34);
  Cutoff c = cutoff(e, k.advance, k.slope);
  EXPECT_NEAR(cash_intensity(e, k, c), 0.34, 1e-9);
  // Benchmark: θ̂ = (a + b1)/(1 + b1), E[θ | q = 1] = (1 + θ̂)/2.
  double t = (k.advance + k.slope) / (1 + k.slope);
  EXPECT_NEAR(k.advance / (k.advance + k.slope * (1 + t) / 2), 0.34, 1e-9);
}

}  // namespace
}  // namespace lqscreen
