/*
 * Copyright 2026 The memsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file report.hpp
 * @brief Executes configured benchmark points and formats them as CSV rows.
 *
 * A row holds every knob of the run configuration, the repetition index,
 * the metric columns and the per-bank counters read after the run. Columns
 * that do not apply to the selected benchmark are left empty.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/config.hpp"

namespace memsim {

using CsvRow = std::vector<std::string>;

CsvRow report_header(const RunConfig& cfg);

/// Builds a fresh machine, runs one repetition (seed = cfg.seed + repetition)
/// and returns its row.
CsvRow run_point(const RunConfig& cfg, std::uint64_t repetition);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view s);
/// Writes the fields joined by commas and terminated by CRLF.
void write_csv_row(std::ostream& os, const CsvRow& row);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=lo:hi:step" (inclusive). Throws ConfigError on an empty range.
SweepAxis parse_axis(std::string_view spec);

/// Cartesian product of the axes, first axis outermost.
std::vector<std::vector<Override>> expand_axes(const std::vector<SweepAxis>& axes);

}  // namespace memsim
