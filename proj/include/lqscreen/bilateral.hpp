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

#include <string>
#include <vector>

#include "lqscreen/economy.hpp"
#include "lqscreen/numerics.hpp"

namespace lqscreen {

/// Instruments: unconditional advance a, fixed contingent payment b0 and
/// signal-linked slope b1. Solvers always return intercept = 0.
struct Contract {
  double advance = 0.0;
  double intercept = 0.0;
  double slope = 0.0;
};

// empty_set: the best attainable value is the empty implementation set, a
// plateau of maximisers; the smallest such slope is reported.
enum class BoundaryFlag { interior, corner_b1_zero, corner_a_zero, corner_b1_cap, empty_set };
const char* to_string(BoundaryFlag flag);

enum class CutoffStatus { interior, full, empty };
const char* to_string(CutoffStatus status);

struct Cutoff {
  double theta = 0.0;
  CutoffStatus status = CutoffStatus::interior;
};

struct ValueDecomposition {
  double productive_surplus = 0.0;        // ∫_{θ̂}(V − c) f
  double aggregate_financing_cost = 0.0;  // Φ(K − a)(1 − F(θ̂))
  double aggregate_information_rent = 0.0;  // ∫_{θ̂} b1 μ′ (1 − F)
  double advance_outlay = 0.0;            // a
  double total() const {
    return productive_surplus - aggregate_financing_cost - aggregate_information_rent -
           advance_outlay;
  }
};

struct ContractValue {
  Contract contract;
  Cutoff cutoff;
  double value = 0.0;  // ∫_{θ̂} ψ f − a, or 0 when nothing is implemented
  ValueDecomposition decomposition;
};

struct BilateralSolution {
  Contract contract;
  Cutoff cutoff;
  double value = 0.0;
  ValueDecomposition decomposition;
  double foc_residual = 0.0;           // Φ_ℓ(K − a*) − dRent/da along the IR manifold
  double stationarity_residual = 0.0;  // dW/db1 at b1*
  BoundaryFlag boundary_flag = BoundaryFlag::interior;
  double slope_upper = 0.0;            // search interval is [0, slope_upper]
};

struct SolveOptions {
  int scan_points = 64;
  int panels = 512;
  double slope_cap = 10.0;  // used when μ(θ̲) = 0 leaves b1 unbounded
  double fd_step = 1e-5;
  Tolerance<double> tol{};
};

/// Advance that makes the lowest type's participation bind:
/// a + b1 μ(θ̲) = c(θ̲) + Φ(K − a), clamped to [0, K].
double binding_ir_advance(const EconomyPrimitives& econ, double b1, double b0 = 0.0);

struct IrSlope {
  double value = 0.0;
  bool one_sided = false;  // the advance sits at a clamp
};
/// da/db1 = −μ(θ̲)/(1 + Φ_ℓ(K − a)) along the binding-IR manifold.
IrSlope ir_slope(const EconomyPrimitives& econ, double b1);
double ir_slope_at_advance(const EconomyPrimitives& econ, double advance);

/// ψ(θ) = V − c − Φ(K − a) − b1 μ′ (1 − F)/f.
double virtual_surplus(const EconomyPrimitives& econ, double theta, double a, double b1);

/// Smallest type with ψ + shift >= 0, or a boundary status when ψ keeps one
/// sign on the support.
Cutoff cutoff(const EconomyPrimitives& econ, double a, double b1, double shift = 0.0,
              const Tolerance<double>& tol = Tolerance<double>());

/// Objective and its four-part split at arbitrary instruments.
ContractValue evaluate_contract(const EconomyPrimitives& econ, double a, double b1,
                                int panels = 512);
/// Objective on the binding-IR manifold.
ContractValue principal_value(const EconomyPrimitives& econ, double b1, int panels = 512);

/// U(θ) − U(θ̲) = ∫_{θ̲}^{θ} (b1 μ′ − c′).
double rent_schedule(const EconomyPrimitives& econ, double b1, double theta, int panels = 512);

/// Largest b1 whose binding-IR advance is non-negative; `cap` when μ(θ̲) = 0.
double slope_upper_bound(const EconomyPrimitives& econ, double cap = 10.0);

BilateralSolution solve_optimal(const EconomyPrimitives& econ,
                                const SolveOptions& opts = SolveOptions());

/// ℓ* = (−1 + √(1 + 2R))/R with ℓ*(0) = 1.
double closed_form_ell_star(double R);
double closed_form_advance(double R, double K = 1.0);

/// W_A = ∫_{V ≥ K} (V − K) f.
double pure_advance_value(const EconomyPrimitives& econ, int panels = 512);

struct PureContingent {
  double value = 0.0;
  double slope = 0.0;
  Cutoff cutoff;
};
/// W_C = max over b1 of ∫ (V − c − Φ(K) − b1 μ′ h)_+ f with a = 0.
PureContingent pure_contingent_value(const EconomyPrimitives& econ,
                                     const SolveOptions& opts = SolveOptions());

/// R* with W_C(R*) = W_A.
double crossing_threshold(const EconomyPrimitives& econ,
                          const SolveOptions& opts = SolveOptions());

struct SweepRow {
  double R = 0.0;
  double a_star = 0.0;
  double ell_star = 0.0;
  double beta_star = 0.0;
  double phi_share = 0.0;
  double W_M = 0.0;
  double W_A = 0.0;
  double W_C = 0.0;
  double b1_star = 0.0;
  Cutoff cutoff;
  BoundaryFlag flag = BoundaryFlag::interior;
};

struct SweepDiagnostics {
  bool advance_increasing = true;
  bool advance_concave = true;
  std::vector<double> first_differences;
  std::vector<double> second_differences;
};

struct Sweep {
  std::vector<SweepRow> rows;
  SweepDiagnostics diagnostics;
};

Sweep sweep_R(const EconomyPrimitives& econ, const std::vector<double>& R_grid,
              const SolveOptions& opts = SolveOptions());

/// E[μ(θ) | θ ≥ θ̂].
double conditional_signal_mean(const EconomyPrimitives& econ, const Cutoff& cut,
                               int panels = 512);
/// β = a / (a + b1 E[μ | q = 1]).
double cash_intensity(const EconomyPrimitives& econ, const Contract& k, const Cutoff& cut);

struct SufficientStatistics {
  double marginal_financing_cost = 0.0;  // Φ_ℓ(K − a*)
  double marginal_screening_return = 0.0;  // dRent/da along the IR manifold
  bool corner = false;
};
SufficientStatistics sufficient_statistics(const EconomyPrimitives& econ,
                                           const BilateralSolution& sol,
                                           const SolveOptions& opts = SolveOptions());

struct InterceptComparison {
  Contract original;
  Contract transformed;
  double original_value = 0.0;
  double transformed_value = 0.0;
  double participation_slack = 0.0;  // lowest type's surplus under the transform
};
/// Compares (a, b0, b1) on the binding-IR manifold with (a + b0, 0, b1).
InterceptComparison drop_intercept(const EconomyPrimitives& econ, double b0, double b1,
                                   int panels = 512);

/// Contract on the IR manifold whose cash intensity equals `target`.
Contract calibrated_contract(const EconomyPrimitives& econ, double target,
                             const SolveOptions& opts = SolveOptions());

}  // namespace lqscreen
