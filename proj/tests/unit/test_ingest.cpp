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

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "mbt/archive.hpp"
#include "mbt/ingest.hpp"

namespace mbt {
namespace {

using nlohmann::json;
using testing::home_attacks_high;
using testing::moment;
using testing::raw_log;

std::string game_text(const json& moments) {
  return json{{"gameid", "0021500001"}, {"events", json::array({json{{"moments", moments}}})}}.dump();
}

TEST(Parse, TwoWellFormedMoments) {
  auto g = parse_tracking_text(game_text({moment(1, 1000, 700.0, 20.0, 50), moment(1, 1040, 699.96, 19.96, 51)}));
  EXPECT_EQ(g.game_id, "0021500001");
  ASSERT_EQ(g.frames.size(), 2u);
  EXPECT_EQ(g.frames[0].players.size(), 10u);
  EXPECT_DOUBLE_EQ(g.frames[1].ball_x, 51);
  EXPECT_EQ(g.stats.kept, 2u);
}

TEST(Parse, WrongPlayerCountIsDroppedAndCounted) {
  auto g = parse_tracking_text(game_text({moment(1, 1000, 700.0, 20.0, 50, 9), moment(1, 1040, 699.96, 19.96, 51)}));
  EXPECT_EQ(g.frames.size(), 1u);
  EXPECT_EQ(g.stats.wrong_player_count, 1u);
}

TEST(Parse, DuplicateMomentKeptOnce) {
  auto m = moment(1, 1000, 700.0, 20.0, 50);
  auto g = parse_tracking_text(game_text({m, m, moment(1, 1040, 699.96, 19.96, 51)}));
  EXPECT_EQ(g.frames.size(), 2u);
  EXPECT_EQ(g.stats.duplicates, 1u);
}

TEST(Parse, MissingShotClockAndMalformedRecords) {
  json m = moment(1, 1000, 700.0, 20.0, 50);
  m[3] = nullptr;
  auto g = parse_tracking_text(game_text({m, json("garbage"), json::array({1, 2})}));
  ASSERT_EQ(g.frames.size(), 1u);
  EXPECT_FALSE(g.frames[0].shot_clock_s.has_value());
  EXPECT_EQ(g.stats.malformed, 2u);
}

TEST(Parse, UnreadableInputIsAHardError) {
  EXPECT_THROW(parse_tracking_text("{not json"), DataQualityError);
  EXPECT_THROW(parse_tracking_file("/nonexistent/game.json"), IoError);
}

// Home team crosses into the high-x half at frame `cross`; player 1 walks
// back out at frame `leave`.
std::vector<RawFrame> crossing_log(int cross, int leave, int total) {
  return raw_log(total, [=](int i, int k) {
    if (i < cross) return 40.0;
    if (k == 0 && i >= leave) return 40.0;
    return 60.0;
  });
}

TEST(Segment, CrossingAndLeavingBoundsThePossession) {
  auto ps = segment_possessions(crossing_log(50, 175, 250), home_attacks_high(), "g");
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_NEAR(ps[0].duration_s(), 5.0, 1e-9);
  EXPECT_EQ(ps[0].offense_ids, (std::array<int, 5>{1, 2, 3, 4, 5}));
  EXPECT_EQ(ps[0].defense_ids, (std::array<int, 5>{6, 7, 8, 9, 10}));
  EXPECT_EQ(ps[0].attacked_basket, Basket::kHighX);
  EXPECT_EQ(ps[0].direction_source, "config");
  EXPECT_DOUBLE_EQ(ps[0].frames[0].players[0].x, 60.0);
}

TEST(Segment, ShortPossessionIsDiscarded) {
  SegmentStats st;
  auto ps = segment_possessions(crossing_log(50, 112, 250), home_attacks_high(), "g", &st);
  EXPECT_TRUE(ps.empty());
  EXPECT_EQ(st.candidates, 1u);
  EXPECT_EQ(st.too_short, 1u);
}

TEST(Segment, PausedClockEndsThePossession) {
  // Clock freezes for 1 s starting at frame 150 (t = 6 s).
  auto clock = [](int i) {
    const int running = i < 150 ? i : (i < 175 ? 149 : i - 26);
    return 700.0 - 0.04 * running;
  };
  auto log = raw_log(300, [](int i, int) { return i < 50 ? 40.0 : 60.0; }, clock);
  auto ps = segment_possessions(log, home_attacks_high(), "g");
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_NEAR(ps[0].duration_s(), 4.0, 1e-9);
  EXPECT_NEAR(ps[0].start_game_clock_s, 700.0 - 0.04 * 50, 1e-9);
}

TEST(Segment, DirectionInferredFromBasketProximity) {
  // Frames < 50: everyone in the low half with home nearer the low basket,
  // so home defends low and attacks high.
  auto log = raw_log(250, [](int i, int) { return i < 50 ? 30.0 : 60.0; });
  SegmentStats st;
  auto ps = segment_possessions(log, SegmentConfig{}, "g", &st);
  ASSERT_EQ(st.directions.size(), 2u);
  for (const auto& d : st.directions) {
    EXPECT_EQ(d.attacks, d.team_id == testing::kHomeTeam ? Basket::kHighX : Basket::kLowX);
    EXPECT_NE(d.source.find("heuristic"), std::string::npos);
  }
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_NEAR(ps[0].duration_s(), 8.0, 1e-9);
}

TEST(Downsample, KeepsEveryNthFrame) {
  std::vector<Frame> frames(9);
  for (int i = 0; i < 9; ++i) frames[i].t = i;
  auto d = downsample(frames, 3);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].t, 0);
  EXPECT_EQ(d[1].t, 3);
  EXPECT_EQ(d[2].t, 6);
  EXPECT_EQ(downsample(frames, 1).size(), 9u);
  EXPECT_EQ(downsample(std::vector<Frame>(2), 3).size(), 1u);
  EXPECT_THROW(downsample(frames, 0), std::invalid_argument);
}

TEST(Downsample, PossessionSpacingBecomesPointTwelve) {
  Possession p = testing::moving_possession(9, kRawFrameDt);
  auto d = downsample(p, 3);
  EXPECT_NEAR(d.dt, 0.12, 1e-12);
  EXPECT_EQ(d.frames.size(), 3u);
}

TEST(Downsample, CommutesWithSegmentingOnCleanFixture) {
  auto log = crossing_log(51, 201, 300);
  auto seg_then_down = downsample(segment_possessions(log, home_attacks_high(), "g").at(0), 3);
  std::vector<RawFrame> thinned;
  for (std::size_t i = 0; i < log.size(); i += 3) thinned.push_back(log[i]);
  auto cfg = home_attacks_high();
  cfg.raw_dt = 0.12;
  cfg.max_clock_step_s = 0.2;
  cfg.pause_tolerance_s = 0.03;
  auto down_then_seg = segment_possessions(thinned, cfg, "g").at(0);
  ASSERT_EQ(seg_then_down.frames.size(), down_then_seg.frames.size());
  for (std::size_t i = 0; i < down_then_seg.frames.size(); ++i) {
    EXPECT_EQ(seg_then_down.frames[i].players, down_then_seg.frames[i].players);
  }
}

TEST(Canonicalize, MirrorsLowXPossessions) {
  Possession p = testing::moving_possession(3);
  p.frames[0].players[0] = {10, 10};
  p.attacked_basket = Basket::kLowX;
  auto c = canonicalize_halfcourt(p);
  EXPECT_EQ(c.frames[0].players[0], (Location2D{84, 40}));
  EXPECT_EQ(c.attacked_basket, Basket::kHighX);
  auto twice = canonicalize_halfcourt(c);
  EXPECT_EQ(twice.frames[0].players, c.frames[0].players);
  EXPECT_EQ(twice.frames[2].ball, c.frames[2].ball);
}

TEST(Canonicalize, AlreadyCanonicalIsUnchanged) {
  Possession p = testing::moving_possession(3);
  auto c = canonicalize_halfcourt(p);
  EXPECT_EQ(c.frames[1].players, p.frames[1].players);
}

TEST(Archive, RoundTripIsExact) {
  PossessionArchive a{"g1", {testing::moving_possession(5), testing::moving_possession(7, 0.12, 1.0, 2.0)}};
  a.possessions[1].label = "branch=1";
  a.possessions[1].attacked_basket = Basket::kLowX;
  std::stringstream ss;
  write_archive(ss, a);
  auto b = read_archive(ss);
  ASSERT_EQ(b.possessions.size(), 2u);
  EXPECT_EQ(b.game_id, "g1");
  EXPECT_EQ(b.possessions[1].label, "branch=1");
  EXPECT_EQ(b.possessions[1].attacked_basket, Basket::kLowX);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(b.possessions[1].frames[i].players, a.possessions[1].frames[i].players);
    EXPECT_EQ(b.possessions[1].frames[i].shot_clock_s, a.possessions[1].frames[i].shot_clock_s);
  }
  std::stringstream again;
  write_archive(again, b);
  std::stringstream first;
  write_archive(first, a);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Archive, RejectsGarbage) {
  std::stringstream ss("not an archive\n");
  EXPECT_THROW(read_archive(ss), DataQualityError);
}

}  // namespace
}  // namespace mbt
