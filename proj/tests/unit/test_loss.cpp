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
#include <random>

#include "fixtures.hpp"
#include "mbt/loss.hpp"

namespace mbt {
namespace {

VelocityProfile vp(std::vector<Velocity2D> v) { return VelocityProfile{std::move(v), 0.12}; }

TEST(Mse, HandValues) {
  EXPECT_EQ(mse_loss(vp({{1, 2}}), vp({{1, 2}})), 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(vp({{3, 4}}), vp({{0, 0}})), 12.5);
  EXPECT_DOUBLE_EQ(mse_loss(vp({{1, 0}, {0, 1}}), vp({{0, 0}, {0, 0}})), 0.5);
  EXPECT_THROW(mse_loss(vp({{1, 0}}), vp({{0, 0}, {0, 0}})), std::invalid_argument);
}

TEST(Distance, ZeroOnIdentityAndKindsDisagree) {
  auto t = vp({{1, 1}, {2, 2}});
  for (auto k : {DistanceKind::kMse, DistanceKind::kLocation, DistanceKind::kVelocity}) {
    EXPECT_EQ(distance(t, t, k), 0.0);
  }
  // Errors that cancel over the horizon: small l, large MSE and v.
  auto truth = vp({{0, 0}, {0, 0}});
  auto zigzag = vp({{3, 0}, {-3, 0}});
  auto drift = vp({{1, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(distance(truth, zigzag, DistanceKind::kLocation), 0.0);
  EXPECT_DOUBLE_EQ(distance(truth, drift, DistanceKind::kLocation), 2.0);
  EXPECT_DOUBLE_EQ(distance(truth, zigzag, DistanceKind::kVelocity), 3.0);
  EXPECT_DOUBLE_EQ(distance(truth, drift, DistanceKind::kVelocity), 1.0);
  std::vector<VelocityProfile> modes{zigzag, drift};
  EXPECT_EQ(winning_mode(truth, modes, DistanceKind::kLocation), 0);
  EXPECT_EQ(winning_mode(truth, modes, DistanceKind::kMse), 1);
  EXPECT_EQ(winning_mode(truth, modes, DistanceKind::kVelocity), 1);
}

TEST(Distance, LocationKindIsFinalDisplacementOverDt) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto t = testing::random_profile(rng, 6);
    auto p = testing::random_profile(rng, 6);
    auto lt = locations_from_velocities({0, 0}, t);
    auto lp = locations_from_velocities({0, 0}, p);
    const double fde = mbt::distance(lt.locations.back(), lp.locations.back());
    EXPECT_NEAR(fde, 0.12 * distance(t, p, DistanceKind::kLocation), 1e-9);
  }
}

TEST(Winner, TiesAndHandDistances) {
  auto truth = vp({{0, 0}});
  std::vector<VelocityProfile> same(3, vp({{1, 1}}));
  EXPECT_EQ(winning_mode(truth, same, DistanceKind::kMse), 0);
  std::vector<VelocityProfile> three{vp({{2.0, 0}}), vp({{0, 0.5}}), vp({{-1.1, 0}})};
  EXPECT_EQ(winning_mode(truth, three, DistanceKind::kLocation), 1);
  std::vector<VelocityProfile> exact{vp({{5, 5}}), truth, vp({{0.1, 0}})};
  EXPECT_EQ(winning_mode(truth, exact, DistanceKind::kVelocity), 1);
}

TEST(Delta, RelaxedWeights) {
  EXPECT_EQ(relaxed_delta(0, 0, 0.0, 4), 1.0);
  EXPECT_EQ(relaxed_delta(1, 0, 0.0, 4), 0.0);
  EXPECT_DOUBLE_EQ(relaxed_delta(2, 2, 0.25, 4), 0.75);
  EXPECT_NEAR(relaxed_delta(0, 2, 0.25, 4), 0.0833333333, 1e-9);
  EXPECT_EQ(relaxed_delta(0, 0, 0.0, 1), 1.0);
  EXPECT_THROW(relaxed_delta(0, 0, 0.1, 1), std::invalid_argument);
}

TEST(Mtp, HandValues) {
  LossConfig cfg;
  cfg.M = 1;
  cfg.epsilon0 = 0;
  auto truth = vp({{1, 2}, {3, 4}});
  auto perfect = mtp_loss(truth, ModePrediction{{truth}, {1.0}}, cfg, 0.0);
  EXPECT_EQ(perfect.total, 0.0);

  cfg.M = 2;
  auto off = vp({{1, 2}, {3, 4 + std::sqrt(40.0)}});  // mse 10
  ASSERT_DOUBLE_EQ(mse_loss(truth, off), 10.0);
  ModePrediction pred{{truth, off}, {0.5, 0.5}};
  auto exact = mtp_loss(truth, pred, cfg, 0.0);
  EXPECT_NEAR(exact.total, 0.6931, 1e-4);
  EXPECT_EQ(exact.winning_mode, 0);
  auto relaxed = mtp_loss(truth, pred, cfg, 0.2);
  EXPECT_NEAR(relaxed.total, 2.6931, 1e-4);
  EXPECT_NEAR(relaxed.classification, std::log(2.0), 1e-12);
  EXPECT_NEAR(relaxed.trajectory, 2.0, 1e-12);
}

TEST(Mtp, ZeroProbabilityIsClampedAndFlagged) {
  LossConfig cfg;
  cfg.M = 2;
  auto truth = vp({{0, 0}});
  auto r = mtp_loss(truth, ModePrediction{{truth, vp({{1, 0}})}, {0.0, 1.0}}, cfg, 0.0);
  EXPECT_EQ(r.clamped_probabilities, 1);
  EXPECT_NEAR(r.total, -std::log(kMinProbability), 1e-9);
  EXPECT_TRUE(std::isfinite(r.total));
}

TEST(Mtp, RejectsBadProbabilities) {
  LossConfig cfg;
  cfg.M = 2;
  auto truth = vp({{0, 0}});
  EXPECT_THROW(mtp_loss(truth, ModePrediction{{truth, truth}, {0.7, 0.7}}, cfg, 0.0),
               std::invalid_argument);
}

TEST(Schedule, LinearAndMultiplicative) {
  LossConfig base = LossConfig::base(4);
  EXPECT_EQ(epsilon_at_epoch(base, 0), 0.25);
  EXPECT_EQ(epsilon_at_epoch(base, 3), 0.10);
  EXPECT_EQ(epsilon_at_epoch(base, 5), 0.0);
  EXPECT_EQ(epsilon_at_epoch(base, 40), 0.0);
  LossConfig fine = LossConfig::finetune(4);
  EXPECT_EQ(epsilon_at_epoch(fine, 0), 0.75);
  EXPECT_EQ(epsilon_at_epoch(fine, 10), 0.65);
  LossConfig flat = base;
  flat.epsilon_decrement = 0;
  EXPECT_EQ(epsilon_at_epoch(flat, 17), 0.25);
  LossConfig mult = base;
  mult.schedule = EpsilonSchedule::kMultiplicative;
  EXPECT_DOUBLE_EQ(epsilon_at_epoch(mult, 2), 0.25 * 0.95 * 0.95);
  EXPECT_GT(epsilon_at_epoch(mult, 100), 0.0);
  EXPECT_THROW(epsilon_at_epoch(base, -1), std::invalid_argument);
  for (int e = 0; e < 30; ++e) EXPECT_LE(epsilon_at_epoch(base, e + 1), epsilon_at_epoch(base, e));
}

TEST(Schedule, SingleModeHasNoRelaxation) {
  EXPECT_EQ(LossConfig::base(1).epsilon0, 0.0);
  EXPECT_EQ(LossConfig::finetune(1).epsilon0, 0.0);
}

TEST(Names, RoundTrip) {
  for (auto k : {DistanceKind::kMse, DistanceKind::kLocation, DistanceKind::kVelocity}) {
    EXPECT_EQ(distance_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(std::string(to_string(DistanceKind::kLocation)), "l");
  EXPECT_THROW(distance_kind_from_string("x"), std::invalid_argument);
  EXPECT_EQ(epsilon_schedule_from_string("multiplicative"), EpsilonSchedule::kMultiplicative);
}

TEST(Batch, MatchesPerSampleLoss) {
  ModelConfig mc;
  mc.L = 2;
  mc.H = 3;
  mc.M = 3;
  mc.recurrent_width = 4;
  NetworkOutput out;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  const int B = 4;
  out.modes.resize(2 * mc.H * mc.M, B);
  out.logits.resize(mc.M, B);
  Eigen::MatrixXd targets(2 * mc.H, B);
  for (Eigen::Index i = 0; i < out.modes.size(); ++i) out.modes.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < out.logits.size(); ++i) out.logits.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = u(rng);
  out.probs = softmax_columns(out.logits);
  LossConfig cfg;
  cfg.M = mc.M;
  cfg.alpha = 0.7;
  auto batch = mtp_loss_batch(out, targets, cfg, 0.1, OutputKind::kVelocity);
  double sum = 0.0;
  for (int b = 0; b < B; ++b) {
    auto prof = [&](const Eigen::VectorXd& col) {
      VelocityProfile p;
      for (int h = 0; h < mc.H; ++h) p.velocities.push_back({col(2 * h), col(2 * h + 1)});
      return p;
    };
    ModePrediction pred;
    for (int m = 0; m < mc.M; ++m) pred.modes.push_back(prof(out.modes.col(b).segment(2 * mc.H * m, 2 * mc.H)));
    pred.probs.assign(out.probs.col(b).data(), out.probs.col(b).data() + mc.M);
    auto r = mtp_loss(prof(targets.col(b)), pred, cfg, 0.1);
    EXPECT_EQ(r.winning_mode, batch.winners[static_cast<std::size_t>(b)]);
    sum += r.total;
  }
  EXPECT_NEAR(batch.loss, sum / B, 1e-12);
}

}  // namespace
}  // namespace mbt
