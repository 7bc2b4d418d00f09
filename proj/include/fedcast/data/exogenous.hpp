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

#include "fedcast/data/series.hpp"

namespace fedcast::data {

// Timestamp-keyed exogenous columns (weather, calendar, events, ...).
// Same shape as a RawSeries; its client_id is unused.
using ExogenousTable = RawSeries;

// Appends the exogenous columns to every row, taking the latest exogenous row
// whose timestamp is not after the series row. Never looks ahead.
inline RawSeries merge_exogenous(const RawSeries& series, const ExogenousTable& extra) {
  extra.validate();
  require(extra.rows() > 0, Errc::kEmpty, "exogenous table is empty");
  if (series.rows() > 0)
    require(series.timestamps.front() >= extra.timestamps.front(), Errc::kUncoveredRange,
            "series starts at " + std::to_string(series.timestamps.front()) +
                " before the first exogenous timestamp " + std::to_string(extra.timestamps.front()));
  for (const auto& name : extra.feature_names)
    require(std::find(series.feature_names.begin(), series.feature_names.end(), name) ==
                series.feature_names.end(),
            Errc::kInvalidArgument, "exogenous column '" + name + "' already present");

  RawSeries out = series;
  out.feature_names.insert(out.feature_names.end(), extra.feature_names.begin(), extra.feature_names.end());
  out.values.resize(series.values.rows(), series.values.cols() + extra.values.cols());
  out.values.leftCols(series.values.cols()) = series.values;
  std::size_t j = 0;
  for (std::size_t r = 0; r < series.rows(); ++r) {
    while (j + 1 < extra.rows() && extra.timestamps[j + 1] <= series.timestamps[r]) ++j;
    out.values.row(Eigen::Index(r)).tail(extra.values.cols()) = extra.values.row(Eigen::Index(j));
  }
  return out;
}

}  // namespace fedcast::data
