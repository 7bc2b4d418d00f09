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

#include <cstddef>
#include <cstdint>
#include <string>

#include "fedcast/common.hpp"

namespace fedcast::nn {

// Shape of the forecaster: M stacked LSTM layers, L ReLU feed-forward layers
// and a linear projection to horizon * target_dim outputs.
struct LstmConfig {
  std::size_t input_dim = 11;
  std::size_t target_dim = 5;
  std::size_t lstm_layers = 1;
  std::size_t hidden_width = 128;
  std::size_t ffn_layers = 1;
  std::size_t ffn_width = 64;
  std::size_t lookback = 10;
  std::size_t horizon = 1;

  std::size_t output_dim() const { return horizon * target_dim; }

  // Width of the vector entering the projection.
  std::size_t head_width() const { return ffn_layers == 0 ? hidden_width : ffn_width; }

  std::size_t lstm_input_dim(std::size_t layer) const {
    return layer == 0 ? input_dim : hidden_width;
  }

  std::size_t ffn_input_dim(std::size_t layer) const {
    return layer == 0 ? hidden_width : ffn_width;
  }

  void validate() const {
    require(input_dim >= 1 && target_dim >= 1 && hidden_width >= 1 && lookback >= 1 &&
                horizon >= 1 && lstm_layers >= 1,
            Errc::kInvariant, "LstmConfig dimensions must be >= 1");
    require(ffn_layers == 0 || ffn_width >= 1, Errc::kInvariant, "ffn_width must be >= 1");
    require(target_dim <= input_dim, Errc::kInvariant, "target_dim must not exceed input_dim");
  }

  // Identity of the parameter layout; lookback does not change the shapes
  // but is part of the hash so files are not mixed between window lengths.
  std::uint64_t hash() const {
    const std::uint64_t fields[] = {input_dim, target_dim, lstm_layers, hidden_width,
                                    ffn_layers, ffn_width, lookback, horizon};
    return fnv1a(fields, sizeof(fields));
  }

  bool operator==(const LstmConfig&) const = default;
};

}  // namespace fedcast::nn
