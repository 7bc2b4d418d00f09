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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fedcast/common.hpp"

namespace fedcast::data {

enum class Split { kUnsplit, kTrain, kVal, kTest };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kUnsplit: return "unsplit";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

// PDCCH feature schema, in column order.
inline const std::vector<std::string>& pdcch_features() {
  static const std::vector<std::string> names = {
      "RB_dl_mean", "RB_dl_var", "RB_ul_mean", "RB_ul_var", "RNTI_count", "MCS_dl_mean",
      "MCS_dl_var", "MCS_ul_mean", "MCS_ul_var", "TB_dl_bits", "TB_ul_bits"};
  return names;
}

// Every PDCCH feature is nonnegative by definition; variances are additionally
// clamped by the cleanser.
inline bool is_variance_feature(const std::string& name) {
  return name.find("_var") != std::string::npos;
}

struct RawSeries {
  std::string client_id;
  std::vector<std::int64_t> timestamps;  // epoch milliseconds, strictly increasing
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;  // rows x features
  Split split = Split::kUnsplit;

  std::size_t rows() const { return timestamps.size(); }
  std::size_t dim() const { return feature_names.size(); }

  void validate() const {
    require(std::size_t(values.rows()) == timestamps.size(), Errc::kShapeMismatch,
            "row count differs from timestamp count");
    require(std::size_t(values.cols()) == feature_names.size(), Errc::kShapeMismatch,
            "column count differs from feature names");
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      require(timestamps[i] > timestamps[i - 1], Errc::kInvariant,
              "timestamps must be strictly increasing");
  }

  // Contiguous row range [begin, end) tagged with `tag`.
  RawSeries slice(std::size_t begin, std::size_t end, Split tag) const {
    RawSeries out;
    out.client_id = client_id;
    out.feature_names = feature_names;
    out.timestamps.assign(timestamps.begin() + std::ptrdiff_t(begin),
                          timestamps.begin() + std::ptrdiff_t(end));
    out.values = values.middleRows(Eigen::Index(begin), Eigen::Index(end - begin));
    out.split = tag;
    return out;
  }

  std::size_t feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
      if (feature_names[i] == name) return i;
    fail(Errc::kMissingColumn, "no feature named " + name);
  }

  bool operator==(const RawSeries& o) const {
    return client_id == o.client_id && timestamps == o.timestamps &&
           feature_names == o.feature_names && split == o.split &&
           values.rows() == o.values.rows() && values.cols() == o.values.cols() &&
           (values.size() == 0 || values == o.values);
  }
};

}  // namespace fedcast::data
