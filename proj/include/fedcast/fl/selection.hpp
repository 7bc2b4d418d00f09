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
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fedcast/common.hpp"

namespace fedcast::fl {

struct SelectAll {};
struct SelectRandom {
  std::size_t k_per_round = 1;
};
struct SelectExclude {
  std::string client_id;
};

using SelectionPolicy = std::variant<SelectAll, SelectRandom, SelectExclude>;

inline std::string selection_name(const SelectionPolicy& p) {
  if (std::holds_alternative<SelectAll>(p)) return "all";
  if (const auto* r = std::get_if<SelectRandom>(&p)) return "random:" + std::to_string(r->k_per_round);
  return "exclude:" + std::get<SelectExclude>(p).client_id;
}

// Indices (ascending) of the clients taking part in `round`. Random draws are
// uniform without replacement from a stream keyed by (seed, round).
inline std::vector<std::size_t> select_clients(const std::vector<std::string>& ids, const SelectionPolicy& policy,
                                               std::size_t round, std::uint64_t seed) {
  std::vector<std::size_t> all(ids.size());
  std::iota(all.begin(), all.end(), std::size_t(0));
  if (std::holds_alternative<SelectAll>(policy)) return all;
  if (const auto* ex = std::get_if<SelectExclude>(&policy)) {
    const auto it = std::find(ids.begin(), ids.end(), ex->client_id);
    require(it != ids.end(), Errc::kInvalidArgument, "cannot exclude unknown client '" + ex->client_id + "'");
    all.erase(all.begin() + (it - ids.begin()));
    return all;
  }
  const std::size_t k = std::get<SelectRandom>(policy).k_per_round;
  require(k >= 1 && k <= ids.size(), Errc::kOutOfRange,
          "k_per_round = " + std::to_string(k) + " but " + std::to_string(ids.size()) + " clients are available");
  std::mt19937_64 rng(mix_seed(seed, 0x5e1ec7ULL + round));
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace fedcast::fl
