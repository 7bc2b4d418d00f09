/*
 * Copyright 2026 The fedcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedcast/data/series.hpp"

namespace fedcast::data {

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

inline double parse_double(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end)
    fail(Errc::kUnparseableCell,
         "line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view cell, std::size_t line_no) {
  std::int64_t v = 0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end)
    fail(Errc::kUnparseableCell,
         "line " + std::to_string(line_no) + ": bad timestamp '" + std::string(cell) + "'");
  return v;
}

}  // namespace detail

// Parses `timestamp,<features...>` text. Columns are matched by name, so the
// file may order them freely; columns outside the schema are ignored.
inline RawSeries parse_csv(std::istream& in, const std::vector<std::string>& schema,
                           std::string client_id) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::kEmpty, "csv has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split_fields(line);
  auto find = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(Errc::kMissingColumn, "csv header lacks column '" + name + "'");
  };
  const std::size_t ts_col = find("timestamp");
  std::vector<std::size_t> cols;
  for (const auto& name : schema) cols.push_back(find(name));

  std::vector<std::int64_t> ts;
  std::vector<double> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_fields(line);
    require(fields.size() == header.size(), Errc::kUnparseableCell,
            "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                " fields, header has " + std::to_string(header.size()));
    ts.push_back(detail::parse_int(fields[ts_col], line_no));
    for (std::size_t c : cols) cells.push_back(detail::parse_double(fields[c], line_no));
  }

  std::vector<std::size_t> order(ts.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ts[a] < ts[b]; });

  RawSeries s;
  s.client_id = std::move(client_id);
  s.feature_names = schema;
  s.values.resize(Eigen::Index(ts.size()), Eigen::Index(schema.size()));
  s.timestamps.reserve(ts.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t src = order[r];
    if (r > 0)
      require(ts[src] != s.timestamps.back(), Errc::kDuplicateTimestamp,
              "timestamp " + std::to_string(ts[src]) + " appears more than once");
    s.timestamps.push_back(ts[src]);
    for (std::size_t c = 0; c < schema.size(); ++c)
      s.values(Eigen::Index(r), Eigen::Index(c)) = cells[src * schema.size() + c];
  }
  return s;
}

// The client id defaults to the file stem.
inline RawSeries load_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& schema = pdcch_features()) {
  std::ifstream in(path);
  require(in.good(), Errc::kIo, "cannot open " + path.string());
  try {
    return parse_csv(in, schema, path.stem().string());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const RawSeries& s, std::ostream& out) {
  out << "timestamp";
  for (const auto& name : s.feature_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < s.rows(); ++r) {
    out << s.timestamps[r];
    for (std::size_t c = 0; c < s.dim(); ++c)
      out << ',' << format_double(s.values(Eigen::Index(r), Eigen::Index(c)));
    out << '\n';
  }
}

inline void save_csv(const RawSeries& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::kIo, "cannot write " + path.string());
  write_csv(s, out);
  require(out.good(), Errc::kIo, "write failed for " + path.string());
}

}  // namespace fedcast::data
