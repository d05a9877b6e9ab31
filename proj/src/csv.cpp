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


#include "lqscreen/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lqscreen/errors.hpp"

namespace lqscreen {

std::string format_cell(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_cell(bool b) { return b ? "1" : "0"; }
std::string format_cell(int n) { return std::to_string(n); }

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw DomainError("csv row width differs from header");
    for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + r[k];
    out += '\n';
  }
  return out;
}

std::string CsvTable::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (name + ".csv")).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << render();
  return path;
}

}  // namespace lqscreen
