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

#include "mbt/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

namespace mbt {
namespace {

using nlohmann::json;

constexpr double kBasketOffsetFt = 5.25;

// Returns nullopt for anything that does not look like a moment record.
std::optional<RawFrame> parse_moment(const json& m, ParseStats& stats) {
  if (!m.is_array() || m.size() < 6) return std::nullopt;
  if (!m[0].is_number_integer() || !m[1].is_number() || !m[2].is_number()) {
    return std::nullopt;
  }
  const json& rows = m[5];
  if (!rows.is_array() || rows.empty()) return std::nullopt;

  RawFrame f;
  f.quarter = m[0].get<int>();
  f.timestamp_ms = m[1].get<std::int64_t>();
  f.game_clock_s = m[2].get<double>();
  if (m[3].is_number()) f.shot_clock_s = m[3].get<double>();

  bool have_ball = false;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() < 4) return std::nullopt;
    for (std::size_t k = 0; k < std::min<std::size_t>(row.size(), 5); ++k) {
      if (!row[k].is_number()) return std::nullopt;
    }
    const int team = row[0].get<int>();
    if (team == -1) {
      f.ball_x = row[2].get<double>();
      f.ball_y = row[3].get<double>();
      f.ball_z = row.size() > 4 ? row[4].get<double>() : 0.0;
      have_ball = true;
      continue;
    }
    EntityRow e{team, row[1].get<int>(), row[2].get<double>(), row[3].get<double>()};
    if (!std::isfinite(e.x) || !std::isfinite(e.y)) return std::nullopt;
    f.players.push_back(e);
  }
  if (!have_ball) return std::nullopt;
  if (f.players.size() != 10) {
    ++stats.wrong_player_count;
    return RawFrame{};  // sentinel with no players; caller drops it
  }
  return f;
}

struct TeamSplit {
  int team_a = 0;
  int team_b = 0;
  bool valid = false;
};

TeamSplit split_teams(const RawFrame& f) {
  TeamSplit s;
  if (f.players.size() != 10) return s;
  s.team_a = f.players.front().team_id;
  int count_a = 0;
  bool b_set = false;
  for (const auto& p : f.players) {
    if (p.team_id == s.team_a) {
      ++count_a;
    } else if (!b_set) {
      s.team_b = p.team_id;
      b_set = true;
    } else if (p.team_id != s.team_b) {
      return s;
    }
  }
  s.valid = b_set && count_a == 5;
  return s;
}

bool in_attacking_half(double x, Basket attacks, const CourtSpec& court) {
  return attacks == Basket::kHighX ? x > court.halfcourt_x_ft : x < court.halfcourt_x_ft;
}

bool team_in_half(const RawFrame& f, int team, Basket attacks, const CourtSpec& court) {
  for (const auto& p : f.players) {
    if (p.team_id == team && !in_attacking_half(p.x, attacks, court)) return false;
  }
  return true;
}

std::set<int> player_set(const RawFrame& f) {
  std::set<int> ids;
  for (const auto& p : f.players) ids.insert(p.player_id);
  return ids;
}

}  // namespace

const char* to_string(Basket b) { return b == Basket::kHighX ? "high_x" : "low_x"; }

Basket basket_from_string(const std::string& name) {
  if (name == "high_x") return Basket::kHighX;
  if (name == "low_x") return Basket::kLowX;
  throw std::invalid_argument("unknown basket '" + name + "'");
}

ParsedGame parse_tracking_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DataQualityError(std::string("tracking file is not valid JSON: ") + e.what());
  }
  ParsedGame game;
  if (doc.contains("gameid")) {
    const auto& id = doc["gameid"];
    game.game_id = id.is_string() ? id.get<std::string>() : id.dump();
  }
  if (!doc.contains("events") || !doc["events"].is_array()) {
    throw DataQualityError("tracking file has no events array");
  }

  std::vector<RawFrame> frames;
  for (const auto& event : doc["events"]) {
    if (!event.is_object() || !event.contains("moments") || !event["moments"].is_array()) {
      ++game.stats.malformed;
      continue;
    }
    for (const auto& m : event["moments"]) {
      ++game.stats.moments_seen;
      std::optional<RawFrame> f;
      try {
        f = parse_moment(m, game.stats);
      } catch (const json::exception&) {
        f.reset();
      }
      if (!f) {
        ++game.stats.malformed;
        continue;
      }
      if (f->players.empty()) continue;  // wrong player count, already counted
      frames.push_back(std::move(*f));
    }
  }

  // Events overlap in the published logs; the same moment appears in several.
  std::stable_sort(frames.begin(), frames.end(), [](const RawFrame& a, const RawFrame& b) {
    return std::tie(a.quarter, a.timestamp_ms) < std::tie(b.quarter, b.timestamp_ms);
  });
  std::set<std::tuple<int, double, double, double, double>> seen;
  for (auto& f : frames) {
    auto key = std::make_tuple(f.quarter, f.game_clock_s, f.ball_x, f.ball_y, f.ball_z);
    if (!seen.insert(key).second) {
      ++game.stats.duplicates;
      continue;
    }
    game.frames.push_back(std::move(f));
  }
  game.stats.kept = game.frames.size();
  return game;
}

ParsedGame parse_tracking_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read tracking file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ParsedGame game = parse_tracking_text(buf.str());
  if (game.game_id.empty()) game.game_id = path.stem().string();
  return game;
}

std::vector<DirectionAssignment> infer_attack_directions(
    const std::vector<RawFrame>& frames, const SegmentConfig& config) {
  const CourtSpec& court = config.court;
  const double basket_y = court.width_ft / 2.0;
  // (period, team) -> votes for defending {low, high}
  std::map<std::pair<int, int>, std::array<long, 2>> votes;
  std::set<std::pair<int, int>> teams;

  for (const auto& f : frames) {
    const TeamSplit split = split_teams(f);
    if (!split.valid) continue;
    teams.insert({f.quarter, split.team_a});
    teams.insert({f.quarter, split.team_b});
    const bool all_low = std::all_of(f.players.begin(), f.players.end(),
                                     [&](const EntityRow& p) { return p.x < court.halfcourt_x_ft; });
    const bool all_high = std::all_of(f.players.begin(), f.players.end(),
                                      [&](const EntityRow& p) { return p.x > court.halfcourt_x_ft; });
    if (!all_low && !all_high) continue;
    const double basket_x = all_low ? kBasketOffsetFt : court.length_ft - kBasketOffsetFt;
    double dist_a = 0.0;
    double dist_b = 0.0;
    for (const auto& p : f.players) {
      const double d = std::hypot(p.x - basket_x, p.y - basket_y);
      (p.team_id == split.team_a ? dist_a : dist_b) += d;
    }
    const int defender = dist_a <= dist_b ? split.team_a : split.team_b;
    votes[{f.quarter, defender}][all_low ? 0 : 1] += 1;
  }

  std::vector<DirectionAssignment> out;
  for (const auto& key : teams) {
    DirectionAssignment a{key.first, key.second, Basket::kHighX, ""};
    if (auto it = config.direction_override.find(key); it != config.direction_override.end()) {
      a.attacks = it->second;
      a.source = "config";
      out.push_back(a);
      continue;
    }
    auto own = votes.find(key);
    if (own != votes.end() && own->second[0] != own->second[1]) {
      // Defends low -> attacks high.
      a.attacks = own->second[0] > own->second[1] ? Basket::kHighX : Basket::kLowX;
      a.source = "heuristic:basket-proximity";
      out.push_back(a);
      continue;
    }
    // Fall back on the opponent's assignment.
    for (const auto& [other_key, v] : votes) {
      if (other_key.first == key.first && other_key.second != key.second && v[0] != v[1]) {
        a.attacks = v[0] > v[1] ? Basket::kLowX : Basket::kHighX;
        a.source = "heuristic:basket-proximity(opponent)";
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

std::vector<Possession> segment_possessions(const std::vector<RawFrame>& frames,
                                            const SegmentConfig& config,
                                            const std::string& game_id,
                                            SegmentStats* stats) {
  SegmentStats local;
  SegmentStats& st = stats ? *stats : local;
  st.directions = infer_attack_directions(frames, config);
  std::map<std::pair<int, int>, const DirectionAssignment*> direction;
  for (const auto& d : st.directions) direction[{d.period, d.team_id}] = &d;

  std::vector<Possession> out;
  std::map<int, bool> armed;

  bool active = false;
  int offense_team = 0;
  std::set<int> active_ids;
  std::vector<std::size_t> members;

  auto finish = [&]() {
    ++st.candidates;
    const double duration = static_cast<double>(members.size()) * config.raw_dt;
    if (duration + 1e-9 < config.min_duration_s) {
      ++st.too_short;
      return;
    }
    const RawFrame& first = frames[members.front()];
    const DirectionAssignment* dir = direction.at({first.quarter, offense_team});
    Possession p;
    p.game_id = game_id;
    p.period = first.quarter;
    p.start_game_clock_s = first.game_clock_s;
    p.dt = config.raw_dt;
    p.attacked_basket = dir->attacks;
    p.direction_source = dir->source;
    std::vector<int> off;
    std::vector<int> def;
    for (const auto& e : first.players) (e.team_id == offense_team ? off : def).push_back(e.player_id);
    std::sort(off.begin(), off.end());
    std::sort(def.begin(), def.end());
    std::copy(off.begin(), off.end(), p.offense_ids.begin());
    std::copy(def.begin(), def.end(), p.defense_ids.begin());
    std::map<int, int> slot;
    for (int k = 0; k < 5; ++k) {
      slot[p.offense_ids[k]] = k;
      slot[p.defense_ids[k]] = 5 + k;
    }
    p.frames.reserve(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      const RawFrame& rf = frames[members[k]];
      Frame fr;
      fr.t = static_cast<double>(k) * config.raw_dt;
      fr.ball = {rf.ball_x, rf.ball_y};
      if (rf.shot_clock_s) {
        fr.shot_clock_s = *rf.shot_clock_s;
      } else {
        fr.shot_clock_s = 24.0;
        ++p.shot_clock_imputed;
      }
      for (const auto& e : rf.players) fr.players[slot.at(e.player_id)] = {e.x, e.y};
      p.frames.push_back(fr);
    }
    st.shot_clock_imputed += p.shot_clock_imputed;
    ++st.emitted;
    out.push_back(std::move(p));
  };

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RawFrame& f = frames[i];
    const TeamSplit split = split_teams(f);
    bool running = false;
    if (i > 0 && frames[i - 1].quarter == f.quarter) {
      const double drop = frames[i - 1].game_clock_s - f.game_clock_s;
      running = drop >= config.pause_tolerance_s && drop <= config.max_clock_step_s;
    }

    auto condition = [&](int team) {
      auto it = direction.find({f.quarter, team});
      if (it == direction.end()) return false;
      return team_in_half(f, team, it->second->attacks, config.court);
    };

    if (active) {
      const bool keep = split.valid && running && player_set(f) == active_ids &&
                        condition(offense_team);
      if (keep) {
        members.push_back(i);
        continue;
      }
      finish();
      active = false;
      members.clear();
      // A stopped clock ends the possession; a new one needs a fresh crossing.
      if (!running) armed.clear();
    }

    if (!split.valid) {
      armed.clear();
      continue;
    }
    for (int team : {split.team_a, split.team_b}) {
      const bool in_half = condition(team);
      if (!in_half) {
        armed[team] = true;
      } else if (running && armed[team] && !active) {
        active = true;
        offense_team = team;
        active_ids = player_set(f);
        members.assign(1, i);
        armed[team] = false;
      }
    }
  }
  if (active) finish();
  return out;
}

std::vector<Frame> downsample(const std::vector<Frame>& frames, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  std::vector<Frame> out;
  out.reserve(frames.size() / static_cast<std::size_t>(factor) + 1);
  for (std::size_t i = 0; i < frames.size(); i += static_cast<std::size_t>(factor)) {
    out.push_back(frames[i]);
  }
  return out;
}

Possession downsample(const Possession& p, int factor) {
  Possession out = p;
  out.frames = downsample(p.frames, factor);
  out.dt = p.dt * factor;
  return out;
}

Possession canonicalize_halfcourt(Possession p, const CourtSpec& court) {
  if (p.attacked_basket == Basket::kHighX) return p;
  auto mirror = [&](Location2D& l) {
    l.x = court.length_ft - l.x;
    l.y = court.width_ft - l.y;
  };
  for (auto& f : p.frames) {
    mirror(f.ball);
    for (auto& pl : f.players) mirror(pl);
  }
  p.attacked_basket = Basket::kHighX;
  return p;
}

}  // namespace mbt
