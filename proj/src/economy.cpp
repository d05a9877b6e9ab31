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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

constexpr double kSupportSlack = 1e-12;

// Index k with xs[k] <= x < xs[k+1], clamped to the last segment.
std::size_t segment(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = it == xs.begin() ? 0 : std::size_t(it - xs.begin()) - 1;
  return std::min(k, xs.size() - 2);
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] > xs[k - 1]))
      throw DomainError(std::string(what) + " must be strictly increasing");
}

}  // namespace

TypeDistribution::TypeDistribution(double lower, double upper, ScalarFn cdf, ScalarFn pdf,
                                   ScalarFn hazard, std::string kind)
    : lower_(lower),
      upper_(upper),
      cdf_(std::move(cdf)),
      pdf_(std::move(pdf)),
      hazard_(std::move(hazard)),
      kind_(std::move(kind)) {
  if (!(lower < upper)) throw DomainError("type support requires lower < upper");
  if (!cdf_ || !pdf_) throw DomainError("type distribution needs cdf and pdf");
}

TypeDistribution TypeDistribution::uniform(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("uniform support requires lo < hi");
  const double w = hi - lo;
  return TypeDistribution(
      lo, hi, [lo, w](double t) { return (t - lo) / w; },
      [w](double) { return 1.0 / w; }, [hi](double t) { return hi - t; }, "uniform");
}

TypeDistribution TypeDistribution::truncated_exponential(double rate, double lo, double hi) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  if (!(lo < hi)) throw DomainError("exponential support requires lo < hi");
  const double mass = -std::expm1(-rate * (hi - lo));
  return TypeDistribution(
      lo, hi, [=](double t) { return -std::expm1(-rate * (t - lo)) / mass; },
      [=](double t) { return rate * std::exp(-rate * (t - lo)) / mass; },
      [=](double t) { return -std::expm1(-rate * (hi - t)) / rate; }, "exponential");
}

TypeDistribution TypeDistribution::power(double k, double lo, double hi) {
  if (!(k > 0.0)) throw DomainError("power exponent must be positive");
  if (!(lo < hi) || lo < 0.0) throw DomainError("power support requires 0 <= lo < hi");
  if (lo == 0.0 && k != 1.0)
    throw DomainError("power density vanishes or diverges at 0 unless exponent is 1");
  const double lo_k = std::pow(lo, k), hi_k = std::pow(hi, k), z = hi_k - lo_k;
  return TypeDistribution(
      lo, hi, [=](double t) { return (std::pow(t, k) - lo_k) / z; },
      [=](double t) { return k * std::pow(t, k - 1.0) / z; },
      [=](double t) { return (hi_k - std::pow(t, k)) / (k * std::pow(t, k - 1.0)); },
      "power");
}

TypeDistribution TypeDistribution::tabulated(std::vector<double> theta,
                                             std::vector<double> density) {
  if (theta.size() < 2 || theta.size() != density.size())
    throw DomainError("tabulated density needs matching theta/density of length >= 2");
  require_increasing(theta, "tabulated theta");
  for (double d : density)
    if (!(d > 0.0)) throw DomainError("tabulated density must be positive");
  // Cumulative mass at the knots under linear interpolation.
  std::vector<double> cum(theta.size(), 0.0);
  for (std::size_t k = 1; k < theta.size(); ++k)
    cum[k] = cum[k - 1] + 0.5 * (density[k] + density[k - 1]) * (theta[k] - theta[k - 1]);
  const double total = cum.back();
  for (double& d : density) d /= total;
  for (double& m : cum) m /= total;
  auto data = std::make_shared<const std::tuple<std::vector<double>, std::vector<double>,
                                                std::vector<double>>>(theta, density, cum);
  auto pdf = [data](double t) {
    const auto& [x, f, F] = *data;
    std::size_t k = segment(x, t);
    double w = (t - x[k]) / (x[k + 1] - x[k]);
    return f[k] + w * (f[k + 1] - f[k]);
  };
  auto cdf = [data](double t) {
    const auto& [x, f, F] = *data;
    std::size_t k = segment(x, t);
    double d = t - x[k], h = x[k + 1] - x[k];
    return std::clamp(F[k] + f[k] * d + 0.5 * (f[k + 1] - f[k]) * d * d / h, 0.0, 1.0);
  };
  return TypeDistribution(theta.front(), theta.back(), cdf, pdf, nullptr, "tabulated");
}

TypeDistribution TypeDistribution::histogram(std::vector<double> edges,
                                             std::vector<double> masses) {
  if (edges.size() < 2 || masses.size() + 1 != edges.size())
    throw DomainError("histogram needs one more edge than bins");
  require_increasing(edges, "histogram edges");
  double total = 0.0;
  for (double m : masses) {
    if (m < 0.0) throw DomainError("histogram masses must be non-negative");
    total += m;
  }
  if (!(total > 0.0)) throw DomainError("histogram has no mass");
  std::vector<double> cum(edges.size(), 0.0);
  for (std::size_t k = 0; k < masses.size(); ++k) {
    masses[k] /= total;
    cum[k + 1] = cum[k] + masses[k];
  }
  auto data = std::make_shared<const std::tuple<std::vector<double>, std::vector<double>,
                                                std::vector<double>>>(edges, masses, cum);
  auto pdf = [data](double t) {
    const auto& [e, m, F] = *data;
    std::size_t k = segment(e, t);
    return m[k] / (e[k + 1] - e[k]);
  };
  auto cdf = [data](double t) {
    const auto& [e, m, F] = *data;
    std::size_t k = segment(e, t);
    return std::clamp(F[k] + m[k] * (t - e[k]) / (e[k + 1] - e[k]), 0.0, 1.0);
  };
  return TypeDistribution(edges.front(), edges.back(), cdf, pdf, nullptr, "histogram");
}

void TypeDistribution::check_support(double theta) const {
  if (!(theta >= lower_ - kSupportSlack && theta <= upper_ + kSupportSlack)) {
    std::ostringstream os;
    os << "type " << theta << " outside support [" << lower_ << ", " << upper_ << "]";
    throw DomainError(os.str());
  }
}

double TypeDistribution::cdf(double theta) const {
  check_support(theta);
  return std::clamp(cdf_(std::clamp(theta, lower_, upper_)), 0.0, 1.0);
}

double TypeDistribution::pdf(double theta) const {
  check_support(theta);
  return pdf_(std::clamp(theta, lower_, upper_));
}

double TypeDistribution::survival(double theta) const { return 1.0 - cdf(theta); }

double TypeDistribution::hazard(double theta) const {
  check_support(theta);
  theta = std::clamp(theta, lower_, upper_);
  if (theta >= upper_) return 0.0;
  if (hazard_) return hazard_(theta);
  double f = pdf_(theta);
  double s = 1.0 - std::clamp(cdf_(theta), 0.0, 1.0);
  if (s <= 0.0) return 0.0;
  if (!(f > 0.0)) return std::numeric_limits<double>::infinity();
  return s / f;
}

double hazard(const TypeDistribution& dist, double theta) { return dist.hazard(theta); }

double virtual_type(const TypeDistribution& dist, double theta) {
  return theta - dist.hazard(theta);
}

RegularityReport check_regularity(const TypeDistribution& dist, int grid) {
  if (grid < 2) throw DomainError("regularity grid needs at least 2 points");
  RegularityReport rep;
  const double lo = dist.lower(), h = (dist.upper() - lo) / (grid - 1);
  double prev = virtual_type(dist, lo);
  for (int k = 1; k < grid; ++k) {
    double t = k == grid - 1 ? dist.upper() : lo + h * k;
    double cur = virtual_type(dist, t);
    double drop = prev - cur;
    if (!(cur > prev) && (rep.regular || drop > rep.worst_drop)) {
      rep.regular = false;
      rep.worst_drop = drop;
      rep.at = t;
    }
    prev = cur;
  }
  return rep;
}

// Natural cubic spline for a tabulated financing shape g(ℓ).
struct FinancingCost::Spline {
  std::vector<double> x, y, m;  // knots, values, second derivatives

  Spline(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
    const std::size_t n = x.size();
    m.assign(n, 0.0);
    if (n < 3) return;
    // Thomas algorithm on the interior second derivatives.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
      double r = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
      double denom = b - a * c[i - 1];
      c[i] = cc / denom;
      d[i] = (r - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = d[i] - c[i] * m[i + 1];
      if (i == 1) break;
    }
  }

  // Returns (g, g′, g″) at ell.
  std::tuple<double, double, double> eval(double ell) const {
    std::size_t k = segment(x, ell);
    double h = x[k + 1] - x[k];
    double A = (x[k + 1] - ell) / h, B = (ell - x[k]) / h;
    double g = A * y[k] + B * y[k + 1] + ((A * A * A - A) * m[k] + (B * B * B - B) * m[k + 1]) * h * h / 6.0;
    double g1 = (y[k + 1] - y[k]) / h +
                (-(3 * A * A - 1) * m[k] + (3 * B * B - 1) * m[k + 1]) * h / 6.0;
    double g2 = A * m[k] + B * m[k + 1];
    return {g, g1, g2};
  }
};

FinancingCost::FinancingCost(double tightness, std::shared_ptr<const Spline> shape)
    : tightness_(tightness), shape_(std::move(shape)) {
  if (!(tightness >= 0.0) || !std::isfinite(tightness))
    throw DomainError("financing tightness R must be finite and >= 0");
}

FinancingCost FinancingCost::quadratic(double tightness) {
  return FinancingCost(tightness, nullptr);
}

FinancingCost FinancingCost::tabulated(std::vector<double> ell, std::vector<double> cost,
                                       double tightness) {
  if (ell.size() < 2 || ell.size() != cost.size())
    throw DomainError("tabulated financing needs matching ell/cost of length >= 2");
  require_increasing(ell, "tabulated ell");
  if (ell.front() != 0.0 || cost.front() != 0.0)
    throw DomainError("tabulated financing must start at (0, 0)");
  return FinancingCost(tightness,
                       std::make_shared<const Spline>(std::move(ell), std::move(cost)));
}

FinancingCost FinancingCost::with_tightness(double tightness) const {
  return FinancingCost(tightness, shape_);
}

double FinancingCost::checked(double ell) const {
  if (ell < -kSupportSlack || !std::isfinite(ell))
    throw DomainError("borrowed amount must be non-negative");
  ell = std::max(ell, 0.0);
  if (shape_ && ell > shape_->x.back() + kSupportSlack)
    throw DomainError("borrowed amount beyond tabulated financing range");
  return ell;
}

double FinancingCost::cost(double ell) const {
  ell = checked(ell);
  if (!shape_) return 0.5 * tightness_ * ell * ell;
  return tightness_ * std::get<0>(shape_->eval(ell));
}

double FinancingCost::marginal_ell(double ell) const {
  ell = checked(ell);
  if (!shape_) return tightness_ * ell;
  return tightness_ * std::get<1>(shape_->eval(ell));
}

double FinancingCost::marginal_R(double ell) const {
  ell = checked(ell);
  if (!shape_) return 0.5 * ell * ell;
  return std::get<0>(shape_->eval(ell));
}

double FinancingCost::second_ell(double ell) const {
  ell = checked(ell);
  if (!shape_) return tightness_;
  return tightness_ * std::get<2>(shape_->eval(ell));
}

double financing_cost(const FinancingCost& fin, double ell) { return fin.cost(ell); }
double marginal_ell(const FinancingCost& fin, double ell) { return fin.marginal_ell(ell); }
double marginal_R(const FinancingCost& fin, double ell) { return fin.marginal_R(ell); }
double second_ell(const FinancingCost& fin, double ell) { return fin.second_ell(ell); }

FinancingCheck check_financing(const FinancingCost& fin, double ell_max, int grid) {
  FinancingCheck out;
  auto fail = [&](const std::string& msg, double ell) {
    if (!out.ok) return;
    out.ok = false;
    std::ostringstream os;
    os << msg << " at ell=" << ell;
    out.failure = os.str();
  };
  if (fin.cost(0.0) != 0.0) fail("Phi(0) != 0", 0.0);
  for (int k = 1; k <= grid; ++k) {
    double ell = ell_max * k / grid;
    if (fin.tightness() > 0.0 && !(fin.marginal_ell(ell) > 0.0)) fail("Phi_ell <= 0", ell);
    if (fin.second_ell(ell) < -1e-12) fail("Phi_ell_ell < 0", ell);
    if (!(fin.marginal_R(ell) > 0.0)) fail("Phi_R <= 0", ell);
  }
  return out;
}

EconomyPrimitives::EconomyPrimitives(TypeDistribution dist, Primitives fns,
                                     FinancingCost financing, double working_capital,
                                     double signal_offset)
    : dist_(std::move(dist)),
      fns_(std::move(fns)),
      financing_(std::move(financing)),
      working_capital_(working_capital),
      signal_offset_(signal_offset) {
  if (!(working_capital > 0.0)) throw DomainError("working capital K must be positive");
  if (!fns_.surplus || !fns_.surplus_slope || !fns_.cost || !fns_.cost_slope ||
      !fns_.signal_mean || !fns_.signal_slope)
    throw DomainError("economy needs all six primitive functions");
}

EconomyPrimitives EconomyPrimitives::benchmark(double v, double mu0, double K, double R,
                                               double signal_slope) {
  return benchmark(v, mu0, K, R, signal_slope, TypeDistribution::uniform());
}

EconomyPrimitives EconomyPrimitives::benchmark(double v, double mu0, double K, double R,
                                               double s, TypeDistribution dist) {
  if (mu0 < 0.0) throw DomainError("signal offset mu0 must be >= 0");
  Primitives fns{[v](double t) { return v * t; }, [v](double) { return v; },
                 [](double t) { return t; },      [](double) { return 1.0; },
                 [mu0, s](double t) { return mu0 + s * t; }, [s](double) { return s; }};
  return EconomyPrimitives(std::move(dist), std::move(fns), FinancingCost::quadratic(R), K,
                           mu0);
}

EconomyPrimitives EconomyPrimitives::with_tightness(double R) const {
  return with_financing(financing_.with_tightness(R));
}

EconomyPrimitives EconomyPrimitives::with_financing(FinancingCost fin) const {
  EconomyPrimitives out = *this;
  out.financing_ = std::move(fin);
  return out;
}

EconomyPrimitives EconomyPrimitives::with_signal_scale(double scale) const {
  Primitives fns = fns_;
  ScalarFn mu = fns_.signal_mean, dmu = fns_.signal_slope;
  fns.signal_mean = [mu, scale](double t) { return scale * mu(t); };
  fns.signal_slope = [dmu, scale](double t) { return scale * dmu(t); };
  EconomyPrimitives out = with_functions(std::move(fns));
  out.signal_offset_ = scale * signal_offset_;
  return out;
}

EconomyPrimitives EconomyPrimitives::with_functions(Primitives fns) const {
  EconomyPrimitives out = *this;
  out.fns_ = std::move(fns);
  return out;
}

PrimitiveCheck check_primitives(const EconomyPrimitives& econ, bool allow_flat_signal,
                                int grid) {
  PrimitiveCheck out;
  auto note = [&](const std::string& msg, double t) {
    std::ostringstream os;
    os << msg << " at theta=" << t;
    out.violations.push_back(os.str());
    out.ok = false;
  };
  const auto& d = econ.dist();
  const double lo = d.lower(), h = (d.upper() - lo) / (grid - 1);
  if (std::abs(d.cdf(lo)) > 1e-12) note("cdf(lower) != 0", lo);
  if (std::abs(d.cdf(d.upper()) - 1.0) > 1e-12) note("cdf(upper) != 1", d.upper());
  double prev_s = 0, prev_F = 0, prev_Vp = 0, prev_c = 0;
  for (int k = 0; k < grid; ++k) {
    double t = k == grid - 1 ? d.upper() : lo + h * k;
    double s = econ.V(t) - econ.c(t), F = d.cdf(t), Vp = econ.V_prime(t), c = econ.c(t);
    if (!(d.pdf(t) > 0.0)) note("density not positive", t);
    double dmu = econ.mu_prime(t);
    if (allow_flat_signal ? dmu < 0.0 : !(dmu > 0.0)) note("signal slope not positive", t);
    if (k > 0) {
      if (F < prev_F) note("cdf decreasing", t);
      if (!(s > prev_s)) note("V - c not increasing", t);
      if (Vp > prev_Vp + 1e-12) note("V not concave", t);
      if (!(c > prev_c)) note("c not increasing", t);
    }
    prev_s = s;
    prev_F = F;
    prev_Vp = Vp;
    prev_c = c;
    if (out.violations.size() > 8) break;
  }
  RegularityReport reg = check_regularity(d, grid);
  if (!reg.regular) note("virtual type not increasing", reg.at);
  FinancingCheck fin = check_financing(econ.financing(), econ.K());
  if (!fin.ok) {
    out.ok = false;
    out.violations.push_back(fin.failure);
  }
  return out;
}

}  // namespace lqscreen
