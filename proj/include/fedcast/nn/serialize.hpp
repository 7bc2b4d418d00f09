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

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "fedcast/nn/params.hpp"

namespace fedcast::nn {

// File layout: "FCNN" | u16 version | u64 config hash | f32[] (weights then h0),
// all little-endian.
inline constexpr std::uint16_t kParamFormatVersion = 1;
inline constexpr std::size_t kParamHeaderBytes = 4 + 2 + 8;

namespace detail {

inline void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace detail

template <typename S>
std::vector<std::uint8_t> serialize_params(const ModelParams<S>& params) {
  std::vector<std::uint8_t> out = {'F', 'C', 'N', 'N'};
  out.reserve(kParamHeaderBytes + 4 * (params.weights.size() + params.h0.size()));
  detail::put_le(out, kParamFormatVersion, 2);
  detail::put_le(out, params.config.hash(), 8);
  auto put = [&](S value) {
    detail::put_le(out, std::bit_cast<std::uint32_t>(float(value)), 4);
  };
  for (S v : params.weights) put(v);
  for (S v : params.h0) put(v);
  return out;
}

template <typename S = float>
ModelParams<S> deserialize_params(std::span<const std::uint8_t> bytes, const LstmConfig& cfg) {
  require(bytes.size() >= kParamHeaderBytes, Errc::kLengthMismatch,
          "parameter stream shorter than its header");
  require(std::memcmp(bytes.data(), "FCNN", 4) == 0, Errc::kCorruptHeader, "bad magic");
  require(detail::get_le(bytes, 4, 2) == kParamFormatVersion, Errc::kCorruptHeader,
          "unsupported format version");
  require(detail::get_le(bytes, 6, 8) == cfg.hash(), Errc::kCorruptHeader,
          "config hash does not match the expected model shape");
  ModelParams<S> p(cfg);
  const std::size_t expected = 4 * (p.weights.size() + p.h0.size());
  require(bytes.size() - kParamHeaderBytes == expected, Errc::kLengthMismatch,
          "expected " + std::to_string(expected) + " payload bytes, got " +
              std::to_string(bytes.size() - kParamHeaderBytes));
  std::size_t pos = kParamHeaderBytes;
  auto get = [&]() {
    const auto bits = std::uint32_t(detail::get_le(bytes, pos, 4));
    pos += 4;
    return S(std::bit_cast<float>(bits));
  };
  for (auto& v : p.weights) v = get();
  for (auto& v : p.h0) v = get();
  return p;
}

inline double param_size_kb(std::size_t n_learnable, std::size_t n_buffer) {
  return double(kParamHeaderBytes + 4 * (n_learnable + n_buffer)) / 1000.0;
}

template <typename S>
double param_size_kb(const ModelParams<S>& params) {
  return param_size_kb(params.weights.size(), params.h0.size());
}

}  // namespace fedcast::nn
