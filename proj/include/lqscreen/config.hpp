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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lqscreen/bilateral.hpp"
#include "lqscreen/economy.hpp"

namespace lqscreen {

struct DistributionSpec {
  std::string kind = "uniform";  // uniform | exponential | power | tabulated
  double lo = 0.0;
  double hi = 1.0;
  double rate = 1.0;      // exponential
  double exponent = 1.0;  // power
  std::vector<double> theta, density;  // tabulated

  TypeDistribution build() const;
};

struct FinancingSpec {
  std::string kind = "quadratic";  // quadratic | tabulated
  std::vector<double> ell, cost;

  FinancingCost build(double R) const;
};

struct PortfolioConfig {
  double delta = 1.2;
  bool calibrate = false;
  std::optional<Eigen::MatrixXd> network;  // symmetric adjacency weights
};

struct ExtensionConfig {
  double kappa0 = 0.05;
  std::vector<double> lambda_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> bidders{2, 10};
  int periods = 20;
  double true_theta = 0.6;
  int posterior_grid = 50;
  int menu_types = 10;
  int menu_instruments = 20;
  int samples = 100000;
  std::vector<double> alpha_support{1.0};
  int xi_bins = 200;
};

struct EconomyConfig {
  DistributionSpec dist;
  double v = 2.0;
  double mu0 = 0.0;
  double K = 1.0;
  double R = 1.0;
  double signal_slope = 1.0;
  FinancingSpec phi;
  PortfolioConfig portfolio;
  ExtensionConfig extensions;

  EconomyPrimitives build() const;
  /// Same economy with a different surplus slope.
  EconomyPrimitives build_with_surplus(double v_override) const;
};

/// Parses the JSON document; any unknown key or ill-typed value raises
/// ConfigError.
EconomyConfig parse_config(const std::string& text);
EconomyConfig load_config(const std::string& path);

struct RunConfig {
  EconomyConfig economy;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  int grid = 200;
  std::optional<double> tol;

  SolveOptions solve_options() const;
};

}  // namespace lqscreen
