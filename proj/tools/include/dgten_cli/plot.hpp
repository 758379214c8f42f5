// Copyright 2026 The dgten Authors
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

#include <filesystem>
#include <string>
#include <vector>

#include "dgten/protocol.hpp"

namespace dgten::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone SVG line chart, one polyline per series.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<Series>& series);

/// Writes metrics.dat, metrics.gp and metrics.svg for a report into `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> write_report_plots(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace dgten::cli
