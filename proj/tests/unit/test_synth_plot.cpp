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

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "mbt/archive.hpp"
#include "mbt/dataset.hpp"
#include "mbt/plot.hpp"
#include "mbt/synth.hpp"

namespace mbt {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Synth, BranchCountsWithinBinomialBounds) {
  SyntheticSpec spec;
  spec.n_possessions = 100;
  spec.seed = 12;
  int zero = 0;
  for (const auto& p : generate_possessions(spec)) zero += synthetic_branch(p) == 0;
  // 99% two-sided interval of Binomial(100, 0.5).
  EXPECT_GE(zero, 37);
  EXPECT_LE(zero, 63);
}

TEST(Synth, NoiseFreeBranchesAreExact) {
  SyntheticSpec spec;
  spec.n_possessions = 10;
  spec.noise_std_ft = 0.0;
  spec.seed = 3;
  for (const auto& p : generate_possessions(spec)) {
    const int b = synthetic_branch(p);
    ASSERT_GE(b, 0);
    const Location2D start = p.frames[0].players[0];
    for (std::size_t k = 0; k < p.frames.size(); ++k) {
      const Location2D off = fork_offset(spec, b, static_cast<double>(k) * spec.dt);
      EXPECT_NEAR(p.frames[k].players[0].x - start.x, off.x, 1e-9);
      EXPECT_NEAR(p.frames[k].players[0].y - start.y, off.y, 1e-9);
    }
  }
}

TEST(Synth, BranchesAreMirrorImagesAndRespectTheTurnCap) {
  SyntheticSpec spec;
  const double dt = spec.dt;
  for (int k = 0; k < spec.frames; ++k) {
    const auto a = fork_offset(spec, 0, k * dt);
    const auto b = fork_offset(spec, 1, k * dt);
    EXPECT_NEAR(a.x, b.x, 1e-9);
    EXPECT_NEAR(a.y, -b.y, 1e-9);
    if (k < spec.fork_frame) {
      EXPECT_EQ(a.y, 0.0);
    }
  }
  EXPECT_LT(fork_offset(spec, 0, (spec.frames - 1) * dt).y, -5.0);
  // Speed is constant, so centripetal acceleration is the only one.
  for (int k = 2; k < spec.frames; ++k) {
    const auto p0 = fork_offset(spec, 1, (k - 2) * dt);
    const auto p1 = fork_offset(spec, 1, (k - 1) * dt);
    const auto p2 = fork_offset(spec, 1, k * dt);
    const double ax = (p2.x - 2 * p1.x + p0.x) / (dt * dt);
    const double ay = (p2.y - 2 * p1.y + p0.y) / (dt * dt);
    EXPECT_LE(std::hypot(ax, ay), spec.turn_accel_fps2 + 1e-6);
  }
}

TEST(Synth, SameSeedSameArchive) {
  SyntheticSpec spec;
  spec.n_possessions = 5;
  spec.seed = 8;
  std::stringstream a, b;
  write_archive(a, synthesize(spec));
  write_archive(b, synthesize(spec));
  EXPECT_EQ(a.str(), b.str());
  spec.seed = 9;
  std::stringstream c;
  write_archive(c, synthesize(spec));
  EXPECT_NE(a.str(), c.str());
}

TEST(Synth, ConstantVelocityMovers) {
  SyntheticSpec spec;
  spec.scenario = SyntheticScenario::kConstantVelocity;
  spec.noise_std_ft = 0.0;
  spec.n_possessions = 3;
  for (const auto& p : generate_possessions(spec)) {
    for (std::size_t j = 0; j < 5; ++j) {
      const auto& f0 = p.frames[0].players[j];
      const auto& f1 = p.frames[1].players[j];
      const auto& f9 = p.frames[9].players[j];
      EXPECT_NEAR(std::hypot(f1.x - f0.x, f1.y - f0.y) / spec.dt, spec.speed_fps, 1e-9);
      EXPECT_NEAR(f9.x - f0.x, 9 * (f1.x - f0.x), 1e-9);
    }
  }
}

TEST(Synth, RejectsBadSpecs) {
  SyntheticSpec spec;
  spec.fork_probabilities = {0.5, 0.6};
  EXPECT_THROW(generate_possessions(spec), std::invalid_argument);
  spec = {};
  spec.fork_frame = spec.frames;
  EXPECT_THROW(generate_possessions(spec), std::invalid_argument);
  spec = {};
  spec.turn_accel_fps2 = spec.accel_cap_fps2 + 1.0;
  EXPECT_THROW(generate_possessions(spec), std::invalid_argument);
  EXPECT_EQ(synthetic_branch("branch=3"), 3);
  EXPECT_EQ(synthetic_branch("constant_velocity"), -1);
}

PredictionRecord record(int M) {
  Possession p = testing::moving_possession(21);
  auto s = build_samples(p, SampleConfig{10, 10, 1});
  ModePrediction pred = predict_cv(s[0]);
  for (int m = 1; m < M; ++m) pred.modes.push_back(predict_cl(s[0]).modes[0]);
  pred.probs.assign(static_cast<std::size_t>(M), 1.0 / M);
  return make_prediction_record(0, s[0], pred, "fixture#0");
}

TEST(Plot, PossessionDiagramElementCounts) {
  for (int M : {1, 3}) {
    const std::string svg = possession_svg(record(M));
    EXPECT_EQ(count(svg, "<path"), static_cast<std::size_t>(M + 2)) << svg;
    EXPECT_EQ(count(svg, "<circle class=\"entity\""), 11u);
    EXPECT_EQ(count(svg, "class=\"probability\""), static_cast<std::size_t>(M));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(Plot, RecordEntitiesAndFileRoundTrip) {
  PredictionFile f;
  f.model_id = "CV";
  f.H = 10;
  f.M = 2;
  f.records.push_back(record(2));
  const auto& r = f.records[0];
  EXPECT_EQ(r.entities[10].role, EntityRole::kBall);
  EXPECT_EQ(r.entities[10].id, -1);
  EXPECT_EQ(r.entities[4].role, EntityRole::kAttacker);
  EXPECT_EQ(r.entities[5].role, EntityRole::kDefender);
  EXPECT_NEAR(r.modes[0].back().x, r.ground_truth.back().x, 1e-9);
  auto dir = testing::scratch_dir("plot");
  write_prediction_file(dir / "p.json", f);
  auto back = read_prediction_file(dir / "p.json");
  EXPECT_EQ(to_json(back), to_json(f));
  EXPECT_EQ(possession_svg(back.records[0]), possession_svg(r));
}

TEST(Plot, CalibrationDiagram) {
  CalibrationTable t;
  t.add(std::vector<double>{0.7, 0.3}, 0);
  t.add(std::vector<double>{0.2, 0.8}, 1);
  const std::string svg = calibration_svg(t, "demo");
  EXPECT_EQ(count(svg, "<circle class=\"bin\""), 4u);
  EXPECT_NE(svg.find("demo"), std::string::npos);
}

}  // namespace
}  // namespace mbt
