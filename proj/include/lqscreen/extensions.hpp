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

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lqscreen/bilateral.hpp"
#include "lqscreen/economy.hpp"
#include "lqscreen/oracle.hpp"

namespace lqscreen {

// ---------------------------------------------------------------- learning

struct PosteriorState {
  Eigen::VectorXd grid;     // ascending type points
  Eigen::VectorXd weights;  // masses summing to 1

  /// n grid points spanning the support, weights proportional to the density.
  static PosteriorState from_distribution(const TypeDistribution& dist, int n);
  static PosteriorState point_mass(Eigen::VectorXd grid, int index);

  int size() const { return static_cast<int>(grid.size()); }
  void validate() const;
  /// (Σ_{k>i} w_k) / w_i; +inf at a massless point with mass above it.
  double hazard(int i) const;
};

/// Binary signal with P(x = 1 | θ) = (θ − θ_0)/(θ_{n−1} − θ_0) on the grid.
double signal_likelihood(const PosteriorState& post, int i, int x);
PosteriorState bayes_update(const PosteriorState& post, int x);

/// Discrete hazard of `after` is at most that of `before` at every strictly
/// interior grid point where both carry mass.
bool hazard_shrink_check(const PosteriorState& before, const PosteriorState& after);

struct DynamicStep {
  int t = 0;
  int signal = -1;  // x_t; -1 for the prior period
  DiscreteSolution solution;
  PosteriorState posterior;
  bool hazard_shrink_ok = true;  // always true at t = 0
};

struct DynamicPath {
  std::vector<DynamicStep> steps;
  // On steps whose hazard check passed: a_t >= a_{t-1} − 1e-9 and
  // b1_t <= b1_{t-1} + 1e-9.
  bool advance_monotone_on_shrink = true;
  bool slope_monotone_on_shrink = true;
  int shrink_steps = 0;
};

/// Period 0 solves under the prior; each later period draws x_t given the true
/// type, updates the posterior and re-solves on the grid.
DynamicPath dynamic_path(const EconomyPrimitives& econ, const PosteriorState& prior,
                         double true_theta, int periods, std::uint64_t seed,
                         const SolveOptions& opts = SolveOptions());

// -------------------------------------------------------------- monitoring

struct MonitoringConfig {
  double kappa0 = 0.05;    // κ(σ) = κ0 σ²
  double sigma_max = 10.0;

  double cost(double sigma) const { return kappa0 * sigma * sigma; }
  double marginal_cost(double sigma) const { return 2.0 * kappa0 * sigma; }
  void validate() const;
};

/// Signal with slope scaled by 1 + σ around the lowest type:
/// μ_σ(θ) = μ(θ̲) + (1 + σ)(μ(θ) − μ(θ̲)).
EconomyPrimitives with_monitoring(const EconomyPrimitives& econ, double sigma);

struct MonitoringResult {
  double sigma = 0.0;
  double foc_residual = 0.0;
  bool corner = false;  // σ* at 0 or at sigma_max
  BilateralSolution solution;
};

/// b1*(σ) ∫_{θ̂} (∂μ′/∂σ)(1 − F) − κ′(σ) at one σ.
double monitoring_foc(const EconomyPrimitives& econ, const MonitoringConfig& cfg, double sigma,
                      const SolveOptions& opts = SolveOptions());
MonitoringResult solve_monitoring(const EconomyPrimitives& econ, const MonitoringConfig& cfg,
                                  const SolveOptions& opts = SolveOptions());

// ----------------------------------------------------------- renegotiation

/// Baseline solve with the enforceable contingent value scaled by 1 − λ.
BilateralSolution solve_renegotiation(const EconomyPrimitives& econ, double lambda,
                                      const SolveOptions& opts = SolveOptions());

// ------------------------------------------------------------------- menus

struct MenuCheck {
  double menu_value = 0.0;
  double baseline_value = 0.0;
  double gap = 0.0;
  Contract baseline;
  DiscreteMechanism menu;
  Eigen::VectorXd weights;
  IcReport ic;
};

/// Best type-dependent menu on a discrete grid versus the best single contract,
/// both drawn from an n_a × n_b instrument grid. Values use the principal's
/// direct payoff Σ q_i w_i (V_i − a_i − b1_i μ_i) under IC and IR.
MenuCheck menu_equivalence_check(const EconomyPrimitives& econ, int grid_size, int n_a = 20,
                                 int n_b = 20);

// ---------------------------------------------------------------- auctions

struct BidFunction {
  Eigen::VectorXd grid;  // descending from θ̄ − ε to θ̲
  Eigen::VectorXd bids;
  Eigen::VectorXd full_info;
  int bidders = 0;
  double slope = 0.0;  // b1 used for the full-information advance
  bool shading_ok = true;
  bool monotone_ok = true;

  double max_shading() const { return (bids - full_info).maxCoeff(); }
};

/// Advance making type θ's participation bind at slope b1, clamped to [0, K].
double full_info_advance(const EconomyPrimitives& econ, double theta, double b1);

/// RK4 from θ̄ − ε down to θ̲ of β′ = (n − 1) f/(1 − F) (β − β^FB),
/// β(θ̄ − ε) = β^FB(θ̄ − ε). ε defaults to 1e-3 of the support width.
BidFunction solve_bid_function(const EconomyPrimitives& econ, int bidders,
                               std::optional<double> eps = std::nullopt, int steps = 20000,
                               const SolveOptions& opts = SolveOptions());

// ------------------------------------------------------- two-dimensional

struct JointSample {
  double alpha = 1.0;
  double theta = 0.0;
};

/// θ by inverse cdf, α uniform over `alpha_support`; draw k is a pure function
/// of (seed, k).
std::vector<JointSample> sample_population(const TypeDistribution& dist,
                                           const std::vector<double>& alpha_support, int n,
                                           std::uint64_t seed);

struct Reduction2d {
  std::optional<TypeDistribution> xi_distribution;
  std::optional<EconomyPrimitives> xi_economy;
  std::optional<BilateralSolution> solution;
  double xi_min = 0.0;
  double xi_max = 0.0;
  int used = 0;
  int rejected = 0;         // samples with c(θ) <= 0
  bool degenerate = false;  // ξ constant across the sample
};

/// ξ = α μ(θ)/c(θ); the induced problem has V = vξ, c ≡ 1, μ = ξ with the
/// histogram density of ξ and the financing of `econ`.
Reduction2d reduce_2d(const std::vector<JointSample>& samples, const EconomyPrimitives& econ,
                      double v, int bins = 200, const SolveOptions& opts = SolveOptions());
/// The ξ problem for a given distribution of ξ.
EconomyPrimitives xi_economy(const TypeDistribution& xi_dist, const EconomyPrimitives& econ,
                             double v);

}  // namespace lqscreen
