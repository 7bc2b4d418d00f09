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

#include "fedcast/nn/lstm_config.hpp"

namespace fedcast::nn {

// Matmul FLOPs (2 per multiply-accumulate) of one forward pass over a window.
// Elementwise gate arithmetic and biases are not counted.
inline std::uint64_t lstm_flops_per_window(const LstmConfig& cfg) {
  std::uint64_t macs = 0;
  const std::uint64_t w = cfg.hidden_width;
  for (std::size_t m = 0; m < cfg.lstm_layers; ++m)
    macs += std::uint64_t(cfg.lookback) * 4 * w * (cfg.lstm_input_dim(m) + w);
  return 2 * macs;
}

inline std::uint64_t flops_per_window(const LstmConfig& cfg) {
  std::uint64_t macs = 0;
  for (std::size_t l = 0; l < cfg.ffn_layers; ++l)
    macs += std::uint64_t(cfg.ffn_width) * cfg.ffn_input_dim(l);
  macs += std::uint64_t(cfg.output_dim()) * cfg.head_width();
  return lstm_flops_per_window(cfg) + 2 * macs;
}

// Backward is counted as twice the forward cost.
inline std::uint64_t train_flops_per_window(const LstmConfig& cfg) { return 3 * flops_per_window(cfg); }

}  // namespace fedcast::nn
