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

#include <Eigen/Core>

#include "lqscreen/bilateral.hpp"
#include "lqscreen/economy.hpp"

namespace lqscreen {

struct GridSearchResult {
  double best_a = 0.0;
  double best_b1 = 0.0;
  double best_W = 0.0;
  double b1_max = 0.0;
  int feasible_points = 0;
};

/// Brute-force optimum on the binding-IR manifold. The manifold is sampled
/// twice: na advances on [0, K] (slope backed out from the IR) and nb slopes
/// on [0, b1_max] (advance from the IR). Points whose IR residual exceeds 1e-6
/// are dropped. Values use a midpoint rule with a pointwise ψ >= 0 indicator.
GridSearchResult grid_search_optimal(const EconomyPrimitives& econ, int na, int nb,
                                     int panels = 4000);

/// Objective of the grid oracle at one point, independent of the solver.
double oracle_value(const EconomyPrimitives& econ, double a, double b1, int panels = 4000);

struct DiscreteMechanism {
  Eigen::VectorXd types;
  Eigen::VectorXi allocation;  // q_i in {0, 1}
  Eigen::VectorXd advances;
  Eigen::VectorXd slopes;
  Eigen::VectorXd rents;       // U_i, filled by ic_verify if left empty

  int size() const { return static_cast<int>(types.size()); }
  void validate() const;
};

/// Every type gets the same contract; q_i = 1 above the cutoff.
DiscreteMechanism uniform_mechanism(const EconomyPrimitives& econ, const Contract& k,
                                    const Cutoff& cut, int n);

struct IcReport {
  bool ok = true;
  // max of U(θ̂, θ) − U(θ) over implemented reports θ̂ ≠ θ, floored at 0
  double worst_violation = 0.0;
  int true_index = -1;           // θ of the worst pair
  int report_index = -1;         // θ̂ of the worst pair
  bool ir_ok = true;             // implemented types all have U >= −1e-9
  double worst_ir = 0.0;
};

/// Payoff of type θ_i reporting θ_j: a_j + b1_j μ(θ_i) − c(θ_i) − Φ(K − a_j)
/// when q_j = 1, else 0.
double misreport_payoff(const DiscreteMechanism& mech, const EconomyPrimitives& econ, int i,
                        int j);
IcReport ic_verify(const DiscreteMechanism& mech, const EconomyPrimitives& econ,
                   double slack = 1e-9);

struct RentIdentity {
  double direct = 0.0;         // ∫_{θ̂} U f by nested quadrature
  double hazard_form = 0.0;    // ∫_{θ̂} (b1 μ′ − c′)(1 − F)
  double boundary_term = 0.0;  // (1 − F(θ̂)) U(θ̂)
  double gap = 0.0;            // direct − hazard_form − boundary_term
  double direct_b1 = 0.0;      // slope-dependent parts of each side
  double hazard_b1 = 0.0;
};
RentIdentity rent_identity_check(const EconomyPrimitives& econ, double a, double b1,
                                 double theta_hat, int panels = 400);

struct ConcavityProfile {
  std::vector<double> b1;
  std::vector<double> values;
  std::vector<double> first_differences;
  std::vector<double> second_differences;
  int first_sign_changes = 0;
  int second_sign_changes = 0;
  bool decreasing = false;  // every first difference <= 0
};
ConcavityProfile concavity_probe(const EconomyPrimitives& econ, const std::vector<double>& b1_grid,
                                 int panels = 512);
/// Same profile for pre-computed values on an arbitrary grid.
ConcavityProfile difference_profile(std::vector<double> x, std::vector<double> values);

struct DiscreteSolution {
  Contract contract;
  int cutoff_index = 0;    // first implemented grid type; size() when empty
  double cutoff = 0.0;
  double value = 0.0;
  BoundaryFlag boundary_flag = BoundaryFlag::interior;
};

/// Discrete-type analogue of the bilateral problem on (grid, weights):
/// ψ_i = V_i − c_i − Φ(K − a) − b1 (μ_{i+1} − μ_i) H_i with H_i the right-tail
/// mass over the point mass, implemented set the best upper set, and the IR
/// binding at the lowest type carrying positive mass.
DiscreteSolution solve_discrete(const EconomyPrimitives& econ, const Eigen::VectorXd& grid,
                                const Eigen::VectorXd& weights,
                                const SolveOptions& opts = SolveOptions());
double discrete_value(const EconomyPrimitives& econ, const Eigen::VectorXd& grid,
                      const Eigen::VectorXd& weights, double a, double b1, int* cutoff_index);

}  // namespace lqscreen
