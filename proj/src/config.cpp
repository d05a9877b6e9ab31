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


#include "lqscreen/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + "." + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

DistributionSpec parse_dist(const json& j) {
  only_keys(j, {"kind", "params"}, "dist");
  DistributionSpec d;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("dist.kind must be a string");
  d.kind = j["kind"].get<std::string>();
  json p = j.value("params", json::object());
  const std::string w = "dist.params";
  if (d.kind == "uniform") {
    only_keys(p, {"lo", "hi"}, w);
  } else if (d.kind == "exponential") {
    only_keys(p, {"rate", "lo", "hi"}, w);
    if (!p.contains("rate")) throw ConfigError("exponential needs dist.params.rate");
    d.rate = number(p, "rate", w);
  } else if (d.kind == "power") {
    only_keys(p, {"k", "lo", "hi"}, w);
    if (!p.contains("k")) throw ConfigError("power needs dist.params.k");
    d.exponent = number(p, "k", w);
  } else if (d.kind == "tabulated") {
    only_keys(p, {"theta", "density"}, w);
    if (!p.contains("theta") || !p.contains("density"))
      throw ConfigError("tabulated needs dist.params.theta and density");
    d.theta = numbers(p, "theta", w);
    d.density = numbers(p, "density", w);
    return d;
  } else {
    throw ConfigError("unknown dist.kind '" + d.kind + "'");
  }
  if (p.contains("lo")) d.lo = number(p, "lo", w);
  if (p.contains("hi")) d.hi = number(p, "hi", w);
  return d;
}

FinancingSpec parse_phi(const json& j) {
  only_keys(j, {"kind", "params"}, "phi");
  FinancingSpec f;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("phi.kind must be a string");
  f.kind = j["kind"].get<std::string>();
  json p = j.value("params", json::object());
  if (f.kind == "quadratic") {
    only_keys(p, {}, "phi.params");
  } else if (f.kind == "tabulated") {
    only_keys(p, {"ell", "cost"}, "phi.params");
    if (!p.contains("ell") || !p.contains("cost"))
      throw ConfigError("tabulated phi needs params.ell and params.cost");
    f.ell = numbers(p, "ell", "phi.params");
    f.cost = numbers(p, "cost", "phi.params");
  } else {
    throw ConfigError("unknown phi.kind '" + f.kind + "'");
  }
  return f;
}

PortfolioConfig parse_portfolio(const json& j) {
  only_keys(j, {"delta", "calibrate", "network"}, "portfolio");
  PortfolioConfig pc;
  if (j.contains("delta")) pc.delta = number(j, "delta", "portfolio");
  if (j.contains("calibrate")) {
    if (!j["calibrate"].is_boolean()) throw ConfigError("portfolio.calibrate must be a boolean");
    pc.calibrate = j["calibrate"].get<bool>();
  }
  if (j.contains("network")) {
    const json& nw = j["network"];
    only_keys(nw, {"n", "edges"}, "portfolio.network");
    if (!nw.contains("n") || !nw.contains("edges"))
      throw ConfigError("portfolio.network needs n and edges");
    const int n = integer(nw, "n", "portfolio.network");
    if (n < 1) throw ConfigError("portfolio.network.n must be positive");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    if (!nw["edges"].is_array()) throw ConfigError("portfolio.network.edges must be an array");
    for (const auto& e : nw["edges"]) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_number())
        throw ConfigError("each edge is [i, j, weight]");
      const int a = e[0].get<int>(), b = e[1].get<int>();
      if (a < 0 || b < 0 || a >= n || b >= n || a == b)
        throw ConfigError("edge endpoints must be distinct nodes in range");
      d(a, b) = d(b, a) = e[2].get<double>();
    }
    pc.network = d;
  }
  return pc;
}

ExtensionConfig parse_extensions(const json& j) {
  const std::string w = "extensions";
  only_keys(j,
            {"kappa0", "lambda_grid", "bidders", "periods", "true_theta", "posterior_grid",
             "menu_types", "menu_instruments", "samples", "alpha_support", "xi_bins"},
            w);
  ExtensionConfig x;
  if (j.contains("kappa0")) x.kappa0 = number(j, "kappa0", w);
  if (j.contains("lambda_grid")) x.lambda_grid = numbers(j, "lambda_grid", w);
  if (j.contains("bidders")) {
    x.bidders.clear();
    for (double b : numbers(j, "bidders", w)) x.bidders.push_back(static_cast<int>(b));
  }
  if (j.contains("periods")) x.periods = integer(j, "periods", w);
  if (j.contains("true_theta")) x.true_theta = number(j, "true_theta", w);
  if (j.contains("posterior_grid")) x.posterior_grid = integer(j, "posterior_grid", w);
  if (j.contains("menu_types")) x.menu_types = integer(j, "menu_types", w);
  if (j.contains("menu_instruments")) x.menu_instruments = integer(j, "menu_instruments", w);
  if (j.contains("samples")) x.samples = integer(j, "samples", w);
  if (j.contains("alpha_support")) x.alpha_support = numbers(j, "alpha_support", w);
  if (j.contains("xi_bins")) x.xi_bins = integer(j, "xi_bins", w);
  return x;
}

}  // namespace

TypeDistribution DistributionSpec::build() const {
  if (kind == "uniform") return TypeDistribution::uniform(lo, hi);
  if (kind == "exponential") return TypeDistribution::truncated_exponential(rate, lo, hi);
  if (kind == "power") return TypeDistribution::power(exponent, lo, hi);
  if (kind == "tabulated") return TypeDistribution::tabulated(theta, density);
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

FinancingCost FinancingSpec::build(double R) const {
  if (kind == "quadratic") return FinancingCost::quadratic(R);
  if (kind == "tabulated") return FinancingCost::tabulated(ell, cost, R);
  throw ConfigError("unknown financing kind '" + kind + "'");
}

EconomyPrimitives EconomyConfig::build_with_surplus(double v_override) const {
  try {
    auto e = EconomyPrimitives::benchmark(v_override, mu0, K, R, signal_slope, dist.build());
    if (phi.kind != "quadratic") e = e.with_financing(phi.build(R));
    return e;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(std::string("invalid economy: ") + err.what());
  }
}

EconomyPrimitives EconomyConfig::build() const { return build_with_surplus(v); }

EconomyConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j,
            {"dist", "v", "mu0", "K", "R", "signal_slope", "phi", "portfolio", "extensions"},
            "config");
  EconomyConfig c;
  try {
    if (j.contains("dist")) c.dist = parse_dist(j["dist"]);
    if (j.contains("v")) c.v = number(j, "v", "config");
    if (j.contains("mu0")) c.mu0 = number(j, "mu0", "config");
    if (j.contains("K")) c.K = number(j, "K", "config");
    if (j.contains("R")) c.R = number(j, "R", "config");
    if (j.contains("signal_slope")) c.signal_slope = number(j, "signal_slope", "config");
    if (j.contains("phi")) c.phi = parse_phi(j["phi"]);
    if (j.contains("portfolio")) c.portfolio = parse_portfolio(j["portfolio"]);
    if (j.contains("extensions")) c.extensions = parse_extensions(j["extensions"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.signal_slope >= 0.0)) throw ConfigError("signal_slope must be >= 0");
  if (!(c.R >= 0.0)) throw ConfigError("R must be >= 0");
  c.build();  // validates the primitives
  return c;
}

EconomyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  if (tol) {
    if (!(*tol > 0.0)) throw ConfigError("--tol must be positive");
    o.tol.abs_x = *tol;
  }
  return o;
}

}  // namespace lqscreen
