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

#include "lqscreen/config.hpp"
#include "lqscreen/csv.hpp"

namespace lqscreen {

/// The R grid shared by the tables.
const std::vector<double>& table_R_grid();

std::vector<CsvTable> run_table(const std::string& name, const RunConfig& cfg);
std::vector<CsvTable> run_figure(const std::string& name, const RunConfig& cfg);
std::vector<CsvTable> run_extension(const std::string& name, const RunConfig& cfg);

const std::vector<std::string>& table_names();
const std::vector<std::string>& figure_names();
const std::vector<std::string>& extension_names();

struct CheckResult {
  std::string check;
  std::string status;  // pass | fail | skip
  double worst_violation = 0.0;
  std::string location;
};

std::vector<CheckResult> run_verify(const RunConfig& cfg);
/// JSON array of {check, status, worst_violation, location}.
std::string render_report(const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace lqscreen
