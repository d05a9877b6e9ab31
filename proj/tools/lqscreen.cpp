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


// lqscreen: tables, figure data, extension runs and oracle verification.
// Exit codes: 0 ok, 1 a verify check failed, 2 usage or config error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lqscreen/config.hpp"
#include "lqscreen/errors.hpp"
#include "lqscreen/experiments.hpp"

namespace {

constexpr int kUsage = 2;

int write_all(const std::vector<lqscreen::CsvTable>& tables, const std::string& dir) {
  for (const auto& t : tables) std::cout << t.write(dir) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquidity screening contract solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", tol_text;
  std::uint64_t seed = 42;
  int grid = 200;
  app.add_option("--config", config_path, "economy config (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--grid", grid, "oracle grid density")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol_text, "solver tolerance override");

  std::string name;
  auto* table = app.add_subcommand("table", "reproduce a table as CSV");
  table->add_option("name", name)->required();
  auto* figure = app.add_subcommand("figure", "emit figure data as CSV");
  figure->add_option("name", name)->required();
  auto* extension = app.add_subcommand("extension", "run an extension experiment");
  extension->add_option("name", name)->required();
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  lqscreen::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg.economy = lqscreen::load_config(config_path);
    cfg.out_dir = out_dir;
    cfg.seed = seed;
    cfg.grid = grid;
    if (!tol_text.empty()) {
      double tol = 0.0;
      const char* end = tol_text.data() + tol_text.size();
      auto [ptr, ec] = std::from_chars(tol_text.data(), end, tol);
      if (ec != std::errc() || ptr != end || !(tol > 0.0))
        throw lqscreen::ConfigError("--tol expects a positive number, got '" + tol_text + "'");
      cfg.tol = tol;
    }
    cfg.economy.build();
  } catch (const std::exception& e) {
    std::cerr << "lqscreen: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (table->parsed()) return write_all(lqscreen::run_table(name, cfg), cfg.out_dir);
    if (figure->parsed()) return write_all(lqscreen::run_figure(name, cfg), cfg.out_dir);
    if (extension->parsed()) return write_all(lqscreen::run_extension(name, cfg), cfg.out_dir);
    if (verify->parsed()) {
      auto checks = lqscreen::run_verify(cfg);
      const std::string report = lqscreen::render_report(checks);
      std::filesystem::create_directories(cfg.out_dir);
      const auto path = std::filesystem::path(cfg.out_dir) / "verify_report.json";
      std::ofstream(path, std::ios::binary) << report;
      std::cout << report;
      for (const auto& c : checks)
        if (c.status == "fail") std::cerr << "FAILED: " << c.check << " (" << c.location << ")\n";
      return lqscreen::all_passed(checks) ? 0 : 1;
    }
  } catch (const lqscreen::NotFoundError& e) {
    std::cerr << "lqscreen: " << e.what() << "\n";
    return kUsage;
  } catch (const lqscreen::ConfigError& e) {
    std::cerr << "lqscreen: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
