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

// Raw tracking log parsing and offensive possession extraction.
//
// A possession starts on the first frame where all five players of one team
// are strictly inside the half they attack, and ends on the first frame where
// one of them is not, or where the game clock stops running. Possessions
// shorter than `min_duration_s` are dropped.

#ifndef MBT_INGEST_HPP_
#define MBT_INGEST_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbt/core.hpp"

namespace mbt {

struct EntityRow {
  int team_id = 0;
  int player_id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct RawFrame {
  int quarter = 1;
  std::int64_t timestamp_ms = 0;
  double game_clock_s = 0.0;
  std::optional<double> shot_clock_s;
  double ball_x = 0.0;
  double ball_y = 0.0;
  double ball_z = 0.0;
  std::vector<EntityRow> players;  // exactly 10 in a well-formed frame
};

struct ParseStats {
  std::size_t moments_seen = 0;
  std::size_t malformed = 0;
  std::size_t wrong_player_count = 0;
  std::size_t duplicates = 0;
  std::size_t kept = 0;
};

struct ParsedGame {
  std::string game_id;
  std::vector<RawFrame> frames;
  ParseStats stats;
};

// Parses one game in the published nested-record JSON layout:
// {"gameid": ..., "events": [{"moments": [[quarter, timestamp_ms, game_clock,
// shot_clock, null, [[team, player, x, y, z] x 11]], ...]}, ...]}
// with the ball row first. Throws std::runtime_error if unreadable.
ParsedGame parse_tracking_file(const std::filesystem::path& path);
ParsedGame parse_tracking_text(std::string_view text);

enum class Basket { kLowX, kHighX };

const char* to_string(Basket b);
Basket basket_from_string(const std::string& name);

// One tracking snapshot with players in role order: offense[0..4] then
// defense[5..9], each side sorted by player id.
struct Frame {
  double t = 0.0;  // seconds since possession start
  Location2D ball;
  double shot_clock_s = 24.0;
  std::array<Location2D, 10> players;
};

struct Possession {
  std::string game_id;
  int period = 1;
  double start_game_clock_s = 0.0;
  double dt = kRawFrameDt;
  std::array<int, 5> offense_ids{};
  std::array<int, 5> defense_ids{};
  Basket attacked_basket = Basket::kHighX;
  std::string direction_source;  // how attacked_basket was decided
  int shot_clock_imputed = 0;    // frames whose missing shot clock became 24 s
  std::string label;             // free-form tag, e.g. the synthetic branch
  std::vector<Frame> frames;

  double duration_s() const { return static_cast<double>(frames.size()) * dt; }
};

struct DirectionAssignment {
  int period = 0;
  int team_id = 0;
  Basket attacks = Basket::kHighX;
  std::string source;
};

struct SegmentConfig {
  CourtSpec court;
  double min_duration_s = 3.0;
  // Clock counts as stopped when it drops by less than this across one frame.
  double pause_tolerance_s = 0.01;
  // Larger drops across one frame are treated as a gap in the log.
  double max_clock_step_s = 0.2;
  double raw_dt = kRawFrameDt;
  // (period, team_id) -> attacked basket; takes precedence over inference.
  std::map<std::pair<int, int>, Basket> direction_override;
};

struct SegmentStats {
  std::size_t candidates = 0;
  std::size_t too_short = 0;
  std::size_t emitted = 0;
  std::size_t shot_clock_imputed = 0;
  std::vector<DirectionAssignment> directions;
};

// Attacking direction per (period, team). Votes over frames where all ten
// players stand in one half: the team closer on average to that half's
// basket is defending it. Overrides in `config` win.
std::vector<DirectionAssignment> infer_attack_directions(
    const std::vector<RawFrame>& frames, const SegmentConfig& config);

// Frames must be time ordered. Output possessions are at the raw frame rate.
std::vector<Possession> segment_possessions(const std::vector<RawFrame>& frames,
                                            const SegmentConfig& config,
                                            const std::string& game_id = "",
                                            SegmentStats* stats = nullptr);

// Keeps frames 0, factor, 2*factor, ...
std::vector<Frame> downsample(const std::vector<Frame>& frames, int factor);
Possession downsample(const Possession& p, int factor);

// Mirrors (x, y) -> (L - x, W - y) when the low-x basket is attacked so that
// every possession attacks the high-x basket. Idempotent.
Possession canonicalize_halfcourt(Possession p, const CourtSpec& court = {});

}  // namespace mbt

#endif  // MBT_INGEST_HPP_
