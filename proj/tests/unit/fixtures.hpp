/* Copyright 2026 The MBT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Shared builders for small hand-made inputs.

#ifndef MBT_TESTS_FIXTURES_HPP_
#define MBT_TESTS_FIXTURES_HPP_

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/ingest.hpp"

namespace mbt::testing {

inline constexpr int kHomeTeam = 100;
inline constexpr int kAwayTeam = 200;

// Raw 25 Hz log of one quarter. Home ids 1..5, away ids 6..10. `home_x(i, k)`
// gives the x of home player k at frame i; away player k marks home player k
// from 3 ft further toward the high-x baseline.
inline std::vector<RawFrame> raw_log(int frames, const std::function<double(int, int)>& home_x,
                                     const std::function<double(int)>& clock = {}) {
  std::vector<RawFrame> out;
  for (int i = 0; i < frames; ++i) {
    RawFrame f;
    f.quarter = 1;
    f.timestamp_ms = 1000 + 40LL * i;
    f.game_clock_s = clock ? clock(i) : 700.0 - 0.04 * i;
    f.shot_clock_s = 24.0 - 0.04 * (i % 600);
    f.ball_x = home_x(i, 0);
    f.ball_y = 25.0;
    for (int k = 0; k < 5; ++k) {
      const double x = home_x(i, k);
      f.players.push_back({kHomeTeam, 1 + k, x, 5.0 + 10.0 * k});
    }
    for (int k = 0; k < 5; ++k) {
      const double x = std::min(93.0, home_x(i, k) + 3.0);
      f.players.push_back({kAwayTeam, 6 + k, x, 6.0 + 10.0 * k});
    }
    out.push_back(f);
  }
  return out;
}

inline SegmentConfig home_attacks_high() {
  SegmentConfig cfg;
  cfg.direction_override[{1, kHomeTeam}] = Basket::kHighX;
  cfg.direction_override[{1, kAwayTeam}] = Basket::kLowX;
  return cfg;
}

// A moment in the published layout.
inline nlohmann::json moment(int quarter, std::int64_t ts, double clock, double shot,
                             double ball_x, int players = 10) {
  nlohmann::json rows = nlohmann::json::array();
  rows.push_back({-1, -1, ball_x, 25.0, 5.0});
  for (int k = 0; k < players; ++k) {
    rows.push_back({k < 5 ? kHomeTeam : kAwayTeam, 1 + k, 10.0 + k, 20.0 + k, 0.0});
  }
  return nlohmann::json::array({quarter, ts, clock, shot, nullptr, rows});
}

// Possession of `frames` steps at `dt` where offensive slot k moves at
// velocity (vx + k, vy) from (50 + 2k, 10 + 6k) and defenders stand still.
inline Possession moving_possession(int frames, double dt = kDefaultDt, double vx = 5.0,
                                    double vy = 0.0) {
  Possession p;
  p.game_id = "fixture";
  p.dt = dt;
  p.offense_ids = {1, 2, 3, 4, 5};
  p.defense_ids = {6, 7, 8, 9, 10};
  p.direction_source = "fixture";
  for (int i = 0; i < frames; ++i) {
    Frame f;
    f.t = i * dt;
    f.shot_clock_s = 24.0 - f.t;
    for (int k = 0; k < 5; ++k) {
      f.players[k] = {50.0 + 2 * k + (vx + k) * f.t, 10.0 + 6 * k + vy * f.t};
      f.players[5 + k] = {60.0 + 2 * k, 12.0 + 6 * k};
    }
    f.ball = f.players[0];
    p.frames.push_back(f);
  }
  return p;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mbt_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline VelocityProfile random_profile(std::mt19937_64& rng, int H, double scale = 5.0) {
  std::normal_distribution<double> n(0.0, scale);
  VelocityProfile p;
  for (int h = 0; h < H; ++h) p.velocities.push_back({n(rng), n(rng)});
  return p;
}

}  // namespace mbt::testing

#endif  // MBT_TESTS_FIXTURES_HPP_
