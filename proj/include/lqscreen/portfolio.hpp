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

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lqscreen/bilateral.hpp"
#include "lqscreen/economy.hpp"
#include "lqscreen/numerics.hpp"

namespace lqscreen {

/// How each relationship's instruments are pinned when tightness moves.
///   solved    : bilateral optimum of that relationship;
///   calibrated: slope backed out of the benchmark cash-intensity schedule;
///   fixed     : instruments held at PortfolioEconomy::contracts.
enum class ContractRule { solved, calibrated, fixed };
const char* to_string(ContractRule rule);

struct PortfolioEconomy {
  std::vector<EconomyPrimitives> economies;
  Eigen::MatrixXd complementarity;  // Δ, symmetric, zero diagonal
  std::vector<Contract> contracts;  // read only under ContractRule::fixed

  static PortfolioEconomy symmetric(const EconomyPrimitives& econ, int n, double delta);
  static PortfolioEconomy network(const EconomyPrimitives& econ, Eigen::MatrixXd delta);

  int size() const { return static_cast<int>(economies.size()); }
  void validate() const;
  PortfolioEconomy with_tightness(int j, double R) const;
  PortfolioEconomy with_common_tightness(double R) const;
};

struct PortfolioOptions {
  ContractRule rule = ContractRule::solved;
  double damping = 0.5;
  Tolerance<double> tol{1e-12, 1e-12, 20000};
  SolveOptions bilateral{};
  double fd_step = 1e-4;
  bool check_multiplicity = true;
  bool compute_centralities = true;
};

struct PortfolioSolution {
  std::vector<Contract> contracts;
  std::vector<CutoffStatus> status;
  Eigen::VectorXd cutoffs;
  Eigen::VectorXd per_relationship_value;
  double total_value = 0.0;
  Eigen::VectorXd centralities;
  Eigen::VectorXd residuals;  // cutoff-condition residual per relationship
  int iterations = 0;
  bool multiple_fixed_points = false;
};

/// Cash intensity targeted by ContractRule::calibrated, interpolated in R.
double benchmark_cash_intensity(double R);

Contract pin_contract(const EconomyPrimitives& econ, ContractRule rule,
                      const Contract& held = Contract(),
                      const SolveOptions& opts = SolveOptions());
std::vector<Contract> pin_contracts(const PortfolioEconomy& port, const PortfolioOptions& opts);

PortfolioSolution solve_cutoffs(const PortfolioEconomy& port,
                                const PortfolioOptions& opts = PortfolioOptions());
PortfolioSolution solve_cutoffs(const PortfolioEconomy& port,
                                const std::vector<Contract>& contracts,
                                const PortfolioOptions& opts = PortfolioOptions());

struct SymmetricCutoff {
  double theta = 0.0;
  bool clamped = false;
};
/// (a + b1 − δ)/(1 + b1 − δ) on the uniform benchmark, clamped to [0, 1].
SymmetricCutoff symmetric_cutoff(double a, double b1, double delta);

struct PortfolioValue {
  double total = 0.0;
  Eigen::VectorXd per_relationship;
};
/// Σ_i [∫_{θ̂_i} ψ_i f_i − a_i] + Σ_{i<j} δ_ij (1 − F_i)(1 − F_j); each pair
/// term split half-half. Relationships with an empty set contribute no outlay.
PortfolioValue portfolio_value(const PortfolioEconomy& port, const std::vector<Contract>& contracts,
                               const Eigen::VectorXd& cutoffs, int panels = 512);

struct CutoffSensitivity {
  Eigen::VectorXd implicit;     // dθ̂/dR_j from the linearised cutoff conditions
  Eigen::VectorXd differenced;  // central differences, re-solving
};
CutoffSensitivity cutoff_sensitivities(const PortfolioEconomy& port, int j,
                                       const PortfolioOptions& opts = PortfolioOptions());

struct ContagionDecomposition {
  double total = 0.0;                     // central difference of Π* in R_j
  double direct_financing = 0.0;          // −Φ_R (1 − F_j(θ̂_j))
  double instrument_adjustment = 0.0;     // re-pinned (a_j, b1_j) at fixed cutoffs
  double screening_spillover = 0.0;       // Σ_{i≠j} δ_ij (−ψ_i f_i) dθ̂_i/dR_j
  double complementarity_adjustment = 0.0;  // remaining cutoff effects
  double analytic_total() const {
    return direct_financing + instrument_adjustment + screening_spillover +
           complementarity_adjustment;
  }
  bool approximate = false;  // relationship j sits at a corner contract
};
ContagionDecomposition contagion_derivative(const PortfolioEconomy& port, int j,
                                            const PortfolioOptions& opts = PortfolioOptions());

struct ContagionThreshold {
  double formula = 0.0;    // δ* from the closed-form threshold
  double empirical = 0.0;  // first δ on the scan grid with dΠ/dR_j > 0, NaN if none
  Contract contract;
  double cutoff = 0.0;
};
ContagionThreshold contagion_threshold(const EconomyPrimitives& econ,
                                       const PortfolioOptions& opts = PortfolioOptions(),
                                       const std::vector<double>& delta_grid = {});

double contagion_centrality(const PortfolioEconomy& port, int j,
                            const PortfolioOptions& opts = PortfolioOptions());

struct HumpScan {
  std::vector<double> R;
  std::vector<double> value;
  std::vector<double> slope;  // forward differences between grid points
  std::vector<std::pair<double, double>> rising_intervals;
  bool has_interior_peak = false;
  double peak_R = 0.0;
};
HumpScan hump_scan(const EconomyPrimitives& econ, const std::vector<double>& R_grid, double delta,
                   const PortfolioOptions& opts = PortfolioOptions());

struct BreadthComparison {
  double dual_value = 0.0;
  double single_value = 0.0;
  bool prefer_single = false;
};
BreadthComparison breadth_comparison(const PortfolioEconomy& port,
                                     const PortfolioOptions& opts = PortfolioOptions());

/// π_i(R − dR) − π_i(R) with every relationship at common tightness R.
Eigen::VectorXd uniform_subsidy_effect(const PortfolioEconomy& port, double R, double dR,
                                       const PortfolioOptions& opts = PortfolioOptions());

/// (Π at uncoupled cutoffs − Π*) / |Π*|, same instruments.
double value_change_vs_independent(const PortfolioEconomy& port,
                                   const PortfolioOptions& opts = PortfolioOptions());

/// Fraction of δ grid points where dΠ/dR_1 > 0 for the symmetric pair.
double contagion_share(const EconomyPrimitives& econ, const std::vector<double>& delta_grid,
                       const PortfolioOptions& opts = PortfolioOptions());

}  // namespace lqscreen
