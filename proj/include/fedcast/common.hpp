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
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fedcast {

enum class Errc {
  kInvalidArgument,
  kShapeMismatch,
  kStaleCache,
  kNonFinite,
  kCorruptHeader,
  kLengthMismatch,
  kMissingColumn,
  kUnparseableCell,
  kDuplicateTimestamp,
  kTooShort,
  kEmpty,
  kOutOfRange,
  kDegenerate,
  kWrongSplit,
  kUncoveredRange,
  kUnknownKey,
  kTypeMismatch,
  kInvariant,
  kIo,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid argument";
    case Errc::kShapeMismatch: return "shape mismatch";
    case Errc::kStaleCache: return "stale cache";
    case Errc::kNonFinite: return "non-finite value";
    case Errc::kCorruptHeader: return "corrupt header";
    case Errc::kLengthMismatch: return "length mismatch";
    case Errc::kMissingColumn: return "missing column";
    case Errc::kUnparseableCell: return "unparseable cell";
    case Errc::kDuplicateTimestamp: return "duplicate timestamp";
    case Errc::kTooShort: return "series too short";
    case Errc::kEmpty: return "empty input";
    case Errc::kOutOfRange: return "out of range";
    case Errc::kDegenerate: return "degenerate input";
    case Errc::kWrongSplit: return "wrong split";
    case Errc::kUncoveredRange: return "uncovered range";
    case Errc::kUnknownKey: return "unknown key";
    case Errc::kTypeMismatch: return "type mismatch";
    case Errc::kInvariant: return "invariant violation";
    case Errc::kIo: return "i/o error";
  }
  return "error";
}

// All library failures surface as fedcast::Error; code() identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  // Same error kind with a context prefix, e.g. "seed 3, client 2: ...".
  Error with_context(const std::string& context) const {
    Error e(code_, "");
    e.message_override(context + ": " + what());
    return e;
  }

  const char* what() const noexcept override {
    return override_.empty() ? std::runtime_error::what() : override_.c_str();
  }

 private:
  void message_override(std::string msg) { override_ = std::move(msg); }

  Errc code_;
  std::string override_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

// FNV-1a over raw bytes. Used for config hashes, cache stamps and report hashes.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

// splitmix64 finalizer; derives independent stream seeds from (seed, salt).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fedcast
