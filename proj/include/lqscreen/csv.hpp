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

namespace lqscreen {

/// Fixed six-decimal rendering; negative zero prints as zero, NaN as "nan".
std::string format_cell(double x);
std::string format_cell(bool b);
std::string format_cell(int n);

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <typename... Cells>
  void add(Cells... cells) {
    rows.push_back({format_cell(cells)...});
  }
  std::string render() const;
  /// Writes `<dir>/<name>.csv` and returns the path.
  std::string write(const std::string& dir) const;
};

}  // namespace lqscreen
