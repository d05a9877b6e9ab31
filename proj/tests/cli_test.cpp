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
#include "lqscreen/csv.hpp"
#include "lqscreen/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "lqscreen/errors.hpp"

namespace lqscreen {
namespace {

TEST(Config, EmptyObjectGivesBenchmark) {
  auto c = parse_config("{}");
  auto e = c.build();
  EXPECT_DOUBLE_EQ(e.K(), 1.0);
  EXPECT_DOUBLE_EQ(e.V(0.5), 1.0);
  EXPECT_DOUBLE_EQ(e.mu(0.5), 0.5);
  EXPECT_DOUBLE_EQ(c.portfolio.delta, 1.2);
}

TEST(Config, ReadsNestedBlocks) {
  auto c = parse_config(R"({
    "dist": {"kind": "exponential", "params": {"rate": 2, "lo": 0, "hi": 1}},
    "v": 3, "mu0": 0.1, "R": 2,
    "portfolio": {"delta": 0.5, "calibrate": true,
                  "network": {"n": 3, "edges": [[0, 1, 0.4], [2, 0, 1.1]]}},
    "extensions": {"kappa0": 0.2, "bidders": [3, 4], "lambda_grid": [0, 1]}
  })");
  EXPECT_EQ(c.dist.kind, "exponential");
  EXPECT_DOUBLE_EQ(c.v, 3.0);
  EXPECT_DOUBLE_EQ(c.R, 2.0);
  EXPECT_TRUE(c.portfolio.calibrate);
  ASSERT_TRUE(c.portfolio.network.has_value());
  EXPECT_DOUBLE_EQ((*c.portfolio.network)(0, 1), 0.4);
  EXPECT_DOUBLE_EQ((*c.portfolio.network)(2, 0), 1.1);
  EXPECT_EQ(c.extensions.bidders, (std::vector<int>{3, 4}));
  EXPECT_NEAR(c.build().mu(0.0), 0.1, 1e-15);
}

TEST(Config, RejectsUnknownKeysAtEveryLevel) {
  for (const char* text : {R"({"vv": 2})", R"({"dist": {"kind": "uniform", "extra": 1}})",
                           R"({"dist": {"kind": "uniform", "params": {"rate": 1}}})",
                           R"({"portfolio": {"delta": 1, "gamma": 2}})",
                           R"({"extensions": {"kapa0": 1}})"})
    EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("{\"v\": "), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"v": "two"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"dist": {"kind": "cauchy"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"portfolio": {"calibrate": 1}})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/lqscreen.json"), ConfigError);
}

TEST(Config, TolOverridesSolverTolerance) {
  RunConfig rc;
  rc.tol = 1e-6;
  EXPECT_DOUBLE_EQ(rc.solve_options().tol.abs_x, 1e-6);
  EXPECT_EQ(rc.seed, 42u);
}

TEST(Csv, FixedSixDecimals) {
  EXPECT_EQ(format_cell(0.1), "0.100000");
  EXPECT_EQ(format_cell(-1e-9), "0.000000");
  EXPECT_EQ(format_cell(-0.0), "0.000000");
  EXPECT_EQ(format_cell(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_cell(true), "1");
  EXPECT_EQ(format_cell(7), "7");
}

TEST(Csv, RenderHasHeaderRow) {
  CsvTable t{"x", {"a", "b"}, {}};
  t.add(1.0, 2.5);
  EXPECT_EQ(t.render(), "a,b\n1.000000,2.500000\n");
}

TEST(Csv, WriteCreatesDirectory) {
  auto dir = std::filesystem::temp_directory_path() / "lqscreen_csv_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  CsvTable t{"probe", {"a"}, {}};
  t.add(1.0);
  auto path = t.write(dir.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a\n1.000000\n");
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Experiments, UnknownNamesThrow) {
  RunConfig rc;
  EXPECT_THROW(run_table("nope", rc), NotFoundError);
  EXPECT_THROW(run_figure("nope", rc), NotFoundError);
  EXPECT_THROW(run_extension("nope", rc), NotFoundError);
}

TEST(Experiments, SensitivityHasBothPanels) {
  RunConfig rc;
  auto tables = run_table("sensitivity", rc);
  ASSERT_EQ(tables.size(), 2u);
  for (const auto& t : tables) {
    ASSERT_EQ(t.rows.size(), 5u);
    EXPECT_EQ(t.header[1], "a_star");
  }
  // the advance depends on R only
  for (int r = 0; r < 5; ++r) EXPECT_EQ(tables[0].rows[r][1], tables[1].rows[r][1]);
  EXPECT_EQ(tables[0].rows[1][1], "0.267949");
}

TEST(Experiments, MenuAdvanceShareIndependentOfSurplus) {
  RunConfig rc;
  auto t = run_table("menu", rc).front();
  ASSERT_EQ(t.rows.size(), 15u);
  for (int r = 0; r < 5; ++r) {
    EXPECT_EQ(t.rows[r][2], t.rows[r + 5][2]);
    EXPECT_EQ(t.rows[r][2], t.rows[r + 10][2]);
  }
}

TEST(Experiments, AdvanceFigurePassesThroughBenchmark) {
  RunConfig rc;
  auto t = run_figure("advance", rc).front();
  bool found = false;
  for (const auto& row : t.rows)
    if (row[0] == "1.000000") {
      found = true;
      EXPECT_EQ(row[1], "0.267949");
      EXPECT_EQ(row[3], "0.267949");
    }
  EXPECT_TRUE(found);
}

TEST(Experiments, DominanceAdvanceSeriesConstant) {
  RunConfig rc;
  auto t = run_figure("dominance", rc).front();
  for (const auto& row : t.rows) EXPECT_EQ(row[2], t.rows.front()[2]);
}

TEST(Experiments, RenderingIsDeterministic) {
  RunConfig rc;
  EXPECT_EQ(run_figure("payoff", rc).front().render(), run_figure("payoff", rc).front().render());
  EXPECT_EQ(render_report(run_verify(rc)), render_report(run_verify(rc)));
}

TEST(Verify, DefaultConfigPasses) {
  RunConfig rc;
  auto checks = run_verify(rc);
  EXPECT_TRUE(all_passed(checks)) << render_report(checks);
}

TEST(Verify, FlatSignalExercisesZeroSlopeBranch) {
  RunConfig rc;
  rc.economy = parse_config(R"({"signal_slope": 0})");
  auto checks = run_verify(rc);
  auto it = std::find_if(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.check == "uninformative_signal_zero_slope";
  });
  ASSERT_NE(it, checks.end());
  EXPECT_EQ(it->status, "pass");
}

TEST(Verify, FailureIsReported) {
  std::vector<CheckResult> checks{{"a", "pass", 0.0, ""}, {"b", "fail", 1.0, "R=1"}};
  EXPECT_FALSE(all_passed(checks));
  EXPECT_NE(render_report(checks).find("\"fail\""), std::string::npos);
}

}  // namespace
}  // namespace lqscreen
