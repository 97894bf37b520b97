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

#include "fixtures.hpp"
#include "mbt/dataset.hpp"
#include "mbt/eval.hpp"

namespace mbt {
namespace {

Trajectory tr(std::vector<Location2D> l) { return Trajectory{std::move(l), 0.12}; }

TEST(Displacement, HandValues) {
  auto t = tr({{1, 1}, {2, 2}});
  auto e0 = ade_fde(t, t);
  EXPECT_EQ(e0.ade, 0.0);
  EXPECT_EQ(e0.fde, 0.0);
  auto e1 = ade_fde(tr({{0, 0}, {1, 1}}), tr({{3, 4}, {4, 5}}));
  EXPECT_DOUBLE_EQ(e1.ade, 5.0);
  EXPECT_DOUBLE_EQ(e1.fde, 5.0);
  auto e2 = ade_fde(tr({{0, 0}, {0, 0}}), tr({{0, 0}, {3, 4}}));
  EXPECT_DOUBLE_EQ(e2.ade, 2.5);
  EXPECT_DOUBLE_EQ(e2.fde, 5.0);
  EXPECT_THROW(ade_fde(tr({{0, 0}}), tr({{0, 0}, {1, 1}})), std::invalid_argument);
}

TEST(MseMetric, ConstantLocationOnConstantMover) {
  VelocityProfile truth{{{5, 0}, {5, 0}, {5, 0}}, 0.12};
  VelocityProfile zero{{{0, 0}, {0, 0}, {0, 0}}, 0.12};
  EXPECT_DOUBLE_EQ(mse_metric(truth, zero), 12.5);
  EXPECT_EQ(mse_metric(truth, truth), 0.0);
}

TEST(BestOfM, PicksSmallestFinalError) {
  auto truth = tr({{0.6, 0}, {1.2, 0}});
  VelocityProfile exact{{{5, 0}, {5, 0}}, 0.12};
  VelocityProfile far{{{-20, 0}, {-20, 0}}, 0.12};
  VelocityProfile near{{{4, 0}, {4, 0}}, 0.12};
  auto r = best_of_m(truth, ModePrediction{{far, near, exact}, {0.2, 0.3, 0.5}}, {0, 0});
  EXPECT_EQ(r.chosen_mode, 2);
  EXPECT_NEAR(r.fde, 0.0, 1e-12);
  EXPECT_NEAR(r.ade, 0.0, 1e-12);
  // Equal final errors: lowest index.
  auto tie = best_of_m(truth, ModePrediction{{near, near}, {0.5, 0.5}}, {0, 0});
  EXPECT_EQ(tie.chosen_mode, 0);
  // M = 1 reduces to plain metrics.
  auto one = best_of_m(truth, ModePrediction{{near}, {1.0}}, {0, 0});
  auto plain = ade_fde(truth, locations_from_velocities({0, 0}, near));
  EXPECT_DOUBLE_EQ(one.ade, plain.ade);
  EXPECT_DOUBLE_EQ(one.fde, plain.fde);
  EXPECT_DOUBLE_EQ(one.mse, mse_metric(velocities_from_locations({0, 0}, truth), near));
}

TEST(Calibration, BinIndex) {
  EXPECT_EQ(calibration_bin(0.0), 0);
  EXPECT_EQ(calibration_bin(0.049), 0);
  EXPECT_EQ(calibration_bin(0.05), 1);
  EXPECT_EQ(calibration_bin(0.63), 12);
  EXPECT_EQ(calibration_bin(1.0), 19);
  EXPECT_THROW(calibration_bin(1.2), std::invalid_argument);
}

TEST(Calibration, CertainPredictorThatAlwaysWins) {
  CalibrationTable t;
  const std::vector<double> probs{1.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 50; ++i) t.add(probs, 0);
  EXPECT_EQ(t.bins[19].count, 50u);
  EXPECT_DOUBLE_EQ(t.bins[19].frequency(), 1.0);
  EXPECT_EQ(t.bins[0].count, 150u);
  EXPECT_DOUBLE_EQ(t.bins[0].frequency(), 0.0);
  EXPECT_EQ(t.bins[7].count, 0u);
  EXPECT_EQ(t.total(), 200u);
  EXPECT_DOUBLE_EQ(t.max_gap(), 0.0);
  auto back = calibration_from_json(to_json(t));
  EXPECT_EQ(back.bins[19].wins, 50u);
  EXPECT_FALSE(to_json(t)["bins"][7].contains("frequency"));
}

TEST(Percentile, LinearInterpolation) {
  std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(percentile(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 4.0);
  EXPECT_DOUBLE_EQ(percentile({7}, 99.9), 7.0);
  EXPECT_THROW(percentile({}, 50), std::invalid_argument);
}

TEST(Realism, AccelerationsStartFromLastObservedVelocity) {
  auto samples = build_samples(testing::moving_possession(21), SampleConfig{10, 10, 1});
  auto truth = truth_accelerations(samples);
  ASSERT_EQ(truth.size(), samples.size() * 10);
  for (double a : truth) EXPECT_NEAR(a, 0.0, 1e-9);

  std::vector<ModePrediction> cl;
  for (const auto& s : samples) cl.push_back(predict_cl(s));
  auto pred = predicted_accelerations(samples, cl, RealismModes::kAll);
  // First step stops a 5 ft/s player in 0.12 s.
  EXPECT_NEAR(pred[0], 5.0 / 0.12, 1e-9);
  EXPECT_EQ(pred[1], 0.0);
  auto s = summarize_accelerations("CL", pred);
  EXPECT_EQ(s.count, pred.size());
  EXPECT_EQ(s.percentiles_fps2.size(), kRealismPercentiles.size());
  EXPECT_DOUBLE_EQ(s.max_fps2, s.percentiles_fps2.back());
}

TEST(Realism, ModeSelection) {
  auto samples = build_samples(testing::moving_possession(21), SampleConfig{10, 10, 1});
  std::vector<ModePrediction> two;
  for (const auto& s : samples) {
    ModePrediction p = predict_cv(s);
    p.modes.push_back(predict_cl(s).modes[0]);
    p.probs = {0.4, 0.6};
    two.push_back(p);
  }
  EXPECT_EQ(predicted_accelerations(samples, two, RealismModes::kAll).size(), samples.size() * 20);
  // CV mode matches the truth, so it is chosen; CL is most probable.
  for (double a : predicted_accelerations(samples, two, RealismModes::kChosen)) EXPECT_NEAR(a, 0.0, 1e-9);
  EXPECT_GT(predicted_accelerations(samples, two, RealismModes::kMostProbable)[0], 1.0);
}

TEST(Evaluate, BaselinesOnConstantMover) {
  auto samples = build_samples(testing::moving_possession(30), SampleConfig{10, 10, 1});
  auto cv = evaluate(ConstantVelocityPredictor{}, samples);
  EXPECT_NEAR(cv.metrics.ade_ft, 0.0, 1e-9);
  EXPECT_NEAR(cv.metrics.fde_ft, 0.0, 1e-9);
  auto cl = evaluate(ConstantLocationPredictor{}, samples);
  EXPECT_EQ(cl.metrics.model_id, "CL");
  EXPECT_EQ(cl.metrics.sample_count, samples.size());
  ASSERT_EQ(cl.metrics.per_horizon_error_ft.size(), 10u);
  // Slot k moves at 5 + k ft/s: mean speed 7, so FDE = 7 * 1.2.
  EXPECT_NEAR(cl.metrics.fde_ft, 7.0 * 1.2, 1e-9);
  EXPECT_NEAR(cl.metrics.per_horizon_error_ft.back(), cl.metrics.fde_ft, 1e-12);
}

TEST(Names, RoundTrip) {
  for (auto m : {RealismModes::kAll, RealismModes::kChosen, RealismModes::kMostProbable}) {
    EXPECT_EQ(realism_modes_from_string(to_string(m)), m);
  }
  EXPECT_EQ(mse_mode_from_string(to_string(MseMode::kMostProbable)), MseMode::kMostProbable);
}

}  // namespace
}  // namespace mbt
