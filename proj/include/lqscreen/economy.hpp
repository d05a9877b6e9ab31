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

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lqscreen {

using ScalarFn = std::function<double(double)>;

/// Type distribution on [lower, upper] given by cdf/pdf with an optional
/// analytic hazard. Immutable once built.
class TypeDistribution {
 public:
  TypeDistribution(double lower, double upper, ScalarFn cdf, ScalarFn pdf,
                   ScalarFn hazard = nullptr, std::string kind = "custom");

  static TypeDistribution uniform(double lo = 0.0, double hi = 1.0);
  // Exponential with the given rate, truncated to [lo, hi].
  static TypeDistribution truncated_exponential(double rate, double lo, double hi);
  // F(θ) = (θ^k − lo^k)/(hi^k − lo^k); needs lo > 0 unless k == 1.
  static TypeDistribution power(double exponent, double lo, double hi);
  // Piecewise-linear density through (theta_k, density_k), renormalised.
  static TypeDistribution tabulated(std::vector<double> theta, std::vector<double> density);
  // Piecewise-constant density over bins; masses need not be normalised.
  static TypeDistribution histogram(std::vector<double> edges, std::vector<double> masses);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::string& kind() const { return kind_; }
  double cdf(double theta) const;
  double pdf(double theta) const;
  double hazard(double theta) const;
  // Survival 1 − F(θ), clamped at zero.
  double survival(double theta) const;

 private:
  void check_support(double theta) const;

  double lower_;
  double upper_;
  ScalarFn cdf_;
  ScalarFn pdf_;
  ScalarFn hazard_;
  std::string kind_;
};

double hazard(const TypeDistribution& dist, double theta);
double virtual_type(const TypeDistribution& dist, double theta);

struct RegularityReport {
  bool regular = true;
  double worst_drop = 0.0;  // largest decrease of the virtual type between grid points
  double at = 0.0;
};
RegularityReport check_regularity(const TypeDistribution& dist, int grid = 1000);

/// Financing technology Φ(ℓ; R) = R·g(ℓ). The quadratic shape has g = ℓ²/2;
/// tabulated shapes use a natural cubic spline through user points.
class FinancingCost {
 public:
  static FinancingCost quadratic(double tightness);
  static FinancingCost tabulated(std::vector<double> ell, std::vector<double> cost,
                                 double tightness);

  double tightness() const { return tightness_; }
  FinancingCost with_tightness(double tightness) const;
  bool is_quadratic() const { return shape_ == nullptr; }

  double cost(double ell) const;
  double marginal_ell(double ell) const;
  double marginal_R(double ell) const;
  double second_ell(double ell) const;

 private:
  struct Spline;
  FinancingCost(double tightness, std::shared_ptr<const Spline> shape);
  double checked(double ell) const;

  double tightness_;
  std::shared_ptr<const Spline> shape_;
};

double financing_cost(const FinancingCost& fin, double ell);
double marginal_ell(const FinancingCost& fin, double ell);
double marginal_R(const FinancingCost& fin, double ell);
double second_ell(const FinancingCost& fin, double ell);

struct FinancingCheck {
  bool ok = true;
  std::string failure;
};
// Φ(0)=0, Φ_ℓ>0, Φ_ℓℓ≥0, Φ_R>0 for ℓ in (0, ell_max] on a uniform grid.
FinancingCheck check_financing(const FinancingCost& fin, double ell_max, int grid = 200);

/// Primitive functions of one relationship.
struct Primitives {
  ScalarFn surplus;        // V
  ScalarFn surplus_slope;  // V′
  ScalarFn cost;           // c
  ScalarFn cost_slope;     // c′
  ScalarFn signal_mean;    // μ
  ScalarFn signal_slope;   // μ′
};

class EconomyPrimitives {
 public:
  EconomyPrimitives(TypeDistribution dist, Primitives fns, FinancingCost financing,
                    double working_capital, double signal_offset = 0.0);

  // θ ~ dist (uniform[0,1] by default), V = vθ, c = θ, μ = μ0 + sθ,
  // Φ = (R/2)ℓ².
  static EconomyPrimitives benchmark(double v = 2.0, double mu0 = 0.0, double K = 1.0,
                                     double R = 1.0, double signal_slope = 1.0);
  static EconomyPrimitives benchmark(double v, double mu0, double K, double R,
                                     double signal_slope, TypeDistribution dist);

  const TypeDistribution& dist() const { return dist_; }
  const FinancingCost& financing() const { return financing_; }
  double K() const { return working_capital_; }
  double R() const { return financing_.tightness(); }
  double signal_offset() const { return signal_offset_; }
  double lowest() const { return dist_.lower(); }
  double highest() const { return dist_.upper(); }

  double V(double theta) const { return fns_.surplus(theta); }
  double V_prime(double theta) const { return fns_.surplus_slope(theta); }
  double c(double theta) const { return fns_.cost(theta); }
  double c_prime(double theta) const { return fns_.cost_slope(theta); }
  double mu(double theta) const { return fns_.signal_mean(theta); }
  double mu_prime(double theta) const { return fns_.signal_slope(theta); }

  double phi(double ell) const { return financing_.cost(ell); }
  double phi_ell(double ell) const { return financing_.marginal_ell(ell); }
  double phi_R(double ell) const { return financing_.marginal_R(ell); }

  const Primitives& functions() const { return fns_; }

  EconomyPrimitives with_tightness(double R) const;
  EconomyPrimitives with_financing(FinancingCost fin) const;
  // Multiplies μ and μ′ by `scale` (scale = 1 − λ under renegotiation).
  EconomyPrimitives with_signal_scale(double scale) const;
  EconomyPrimitives with_functions(Primitives fns) const;

 private:
  TypeDistribution dist_;
  Primitives fns_;
  FinancingCost financing_;
  double working_capital_;
  double signal_offset_;
};

struct PrimitiveCheck {
  bool ok = true;
  std::vector<std::string> violations;
};
// Grid checks of the primitive invariants. `allow_flat_signal` accepts
// μ′ ≡ 0 (uninformative signal) instead of requiring μ′ > 0.
PrimitiveCheck check_primitives(const EconomyPrimitives& econ, bool allow_flat_signal = false,
                                int grid = 1000);

}  // namespace lqscreen
