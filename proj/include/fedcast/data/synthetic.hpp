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
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fedcast/data/series.hpp"

namespace fedcast::data {

// Synthetic base-station traffic. Per-client lists may hold one value
// (shared by every client) or exactly n_clients values.
struct SyntheticSpec {
  std::size_t n_clients = 7;
  std::size_t days = 14;
  std::int64_t sample_period_ms = 1000;
  std::int64_t start_ms = 1704067200000;  // 2024-01-01T00:00:00Z
  std::vector<double> base_rate = {20.0};
  std::vector<double> daily_amplitude = {0.6};
  std::vector<double> weekly_amplitude = {0.1};
  std::vector<double> phase = {0.0};
  std::vector<double> noise_std = {0.05};
  double event_rate = 0.5;       // events per day
  double event_magnitude = 2.0;  // load multiplier while an event is active
  std::uint64_t seed = 1;

  double per_client(const std::vector<double>& v, std::size_t k) const {
    return v.size() == 1 ? v[0] : v.at(k);
  }

  void validate() const {
    require(n_clients >= 1 && days >= 1, Errc::kInvariant, "synthetic spec needs clients and days");
    require(sample_period_ms >= 1, Errc::kInvariant, "sample period must be positive");
    for (const auto* v : {&base_rate, &daily_amplitude, &weekly_amplitude, &phase, &noise_std}) {
      require(v->size() == 1 || v->size() == n_clients, Errc::kInvariant,
              "per-client synthetic lists need 1 or n_clients entries");
    }
    for (const auto* v : {&base_rate, &daily_amplitude, &weekly_amplitude, &noise_std})
      for (double x : *v) require(x >= 0.0, Errc::kInvariant, "synthetic rates and amplitudes must be >= 0");
    require(event_rate >= 0.0 && event_magnitude >= 0.0, Errc::kInvariant,
            "event rate and magnitude must be >= 0");
  }
};

struct SyntheticEvent {
  std::int64_t start_ms, end_ms;
};

namespace detail {

inline constexpr std::int64_t kDayMs = 86'400'000;
inline constexpr std::int64_t kWeekMs = 7 * kDayMs;

}  // namespace detail

// Latent load, noise-free and event-free, at offset `t_ms` from the start.
inline double synthetic_load(const SyntheticSpec& spec, std::size_t client, std::int64_t t_ms) {
  const double two_pi = 2.0 * std::numbers::pi;
  // Integer time-of-day keeps the daily cycle exactly periodic.
  const double day_frac = double(t_ms % detail::kDayMs) / double(detail::kDayMs);
  const double week_frac = double(t_ms % detail::kWeekMs) / double(detail::kWeekMs);
  const double base = spec.per_client(spec.base_rate, client);
  const double load = base * (1.0 + spec.per_client(spec.daily_amplitude, client) *
                                        std::sin(two_pi * day_frac + spec.per_client(spec.phase, client)) +
                              spec.per_client(spec.weekly_amplitude, client) * std::sin(two_pi * week_frac));
  return std::max(0.0, load);
}

inline std::vector<SyntheticEvent> synthetic_events(const SyntheticSpec& spec, std::size_t client) {
  std::mt19937_64 rng(mix_seed(spec.seed, 1000 + client));
  const std::int64_t span = std::int64_t(spec.days) * detail::kDayMs;
  std::poisson_distribution<int> count(spec.event_rate * double(spec.days));
  std::uniform_int_distribution<std::int64_t> start(0, span - 1);
  std::uniform_int_distribution<std::int64_t> duration(3'600'000, 3 * 3'600'000);
  std::vector<SyntheticEvent> events;
  const int n = spec.event_rate > 0.0 ? count(rng) : 0;
  for (int i = 0; i < n; ++i) {
    const std::int64_t s = start(rng);
    events.push_back({s, s + duration(rng)});
  }
  std::sort(events.begin(), events.end(), [](auto a, auto b) { return a.start_ms < b.start_ms; });
  return events;
}

// The series of client k. The PDCCH features are noisy functions of the load:
// counts, block allocations and variances grow with it, MCS indices fall.
inline RawSeries generate_synthetic_client(const SyntheticSpec& spec, std::size_t k) {
  spec.validate();
  require(k < spec.n_clients, Errc::kOutOfRange, "synthetic client index out of range");
  const std::int64_t span = std::int64_t(spec.days) * detail::kDayMs;
  const auto n = std::size_t(span / spec.sample_period_ms);
  {
    RawSeries s;
    s.client_id = "client_" + std::to_string(k);
    s.feature_names = pdcch_features();
    s.timestamps.resize(n);
    s.values.resize(Eigen::Index(n), 11);
    const auto events = synthetic_events(spec, k);
    const double base = spec.per_client(spec.base_rate, k);
    const double noise = spec.per_client(spec.noise_std, k);
    std::mt19937_64 rng(mix_seed(spec.seed, k));
    std::normal_distribution<double> nd(0.0, 1.0);
    auto jitter = [&] { return noise > 0.0 ? std::max(0.0, 1.0 + noise * nd(rng)) : 1.0; };

    std::size_t next_event = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t t = std::int64_t(i) * spec.sample_period_ms;
      s.timestamps[i] = spec.start_ms + t;
      double load = synthetic_load(spec, k, t);
      while (next_event < events.size() && events[next_event].end_ms <= t) ++next_event;
      for (std::size_t e = next_event; e < events.size() && events[e].start_ms <= t; ++e)
        if (t < events[e].end_ms) {
          load *= spec.event_magnitude;
          break;
        }
      const double congestion = base > 0.0 ? load / (load + base) : 0.0;
      const double rb_dl = 0.5 * load * jitter();
      const double rb_ul = 0.2 * load * jitter();
      const double mcs_dl = 28.0 * (1.0 - 0.4 * congestion) * jitter();
      const double mcs_ul = 20.0 * (1.0 - 0.4 * congestion) * jitter();
      auto row = s.values.row(Eigen::Index(i));
      row(0) = rb_dl;
      row(1) = 0.1 * load * jitter();
      row(2) = rb_ul;
      row(3) = 0.05 * load * jitter();
      row(4) = load * jitter();
      row(5) = mcs_dl;
      row(6) = 0.04 * load * jitter();
      row(7) = mcs_ul;
      row(8) = 0.03 * load * jitter();
      row(9) = 120.0 * rb_dl * mcs_dl * jitter();
      row(10) = 80.0 * rb_ul * mcs_ul * jitter();
    }
    return s;
  }
}

// One series per client.
inline std::vector<RawSeries> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<RawSeries> out;
  for (std::size_t k = 0; k < spec.n_clients; ++k) out.push_back(generate_synthetic_client(spec, k));
  return out;
}

}  // namespace fedcast::data
