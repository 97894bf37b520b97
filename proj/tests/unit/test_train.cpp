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
#include <limits>
#include <set>

#include "fixtures.hpp"
#include "mbt/dataset.hpp"
#include "mbt/eval.hpp"
#include "mbt/synth.hpp"
#include "mbt/train.hpp"

namespace mbt {
namespace {

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(3, AdamConfig{0.1});
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 0.0;
  adam.step(p, g);
  // Bias-corrected m / sqrt(v) is sign(g) on the first step.
  EXPECT_NEAR(p(0), -0.1, 1e-7);
  EXPECT_NEAR(p(1), 0.1, 1e-7);
  EXPECT_EQ(p(2), 0.0);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MinimizesAQuadratic) {
  Adam adam(2, AdamConfig{0.05});
  Eigen::VectorXd p(2);
  p << 3.0, -2.0;
  for (int i = 0; i < 2000; ++i) adam.step(p, 2.0 * p);
  EXPECT_LT(p.norm(), 1e-3);
}

TEST(EarlyStopping, PatienceTrace) {
  EarlyStopping s(2);
  const double trace[] = {5, 4, 4.5, 4.6};
  int stopped_after = -1;
  for (int e = 0; e < 4; ++e) {
    s.update(trace[e]);
    if (s.stop()) {
      stopped_after = e;
      break;
    }
  }
  EXPECT_EQ(stopped_after, 3);
  EXPECT_EQ(s.best_epoch(), 1);
  EXPECT_EQ(s.best(), 4.0);
}

TEST(EarlyStopping, IgnoresNonFiniteAndTies) {
  EarlyStopping s(5);
  EXPECT_FALSE(s.update(std::numeric_limits<double>::quiet_NaN()));
  EXPECT_TRUE(s.update(3.0));
  EXPECT_FALSE(s.update(3.0));
  EXPECT_EQ(s.best_epoch(), 1);
}

std::vector<Sample> fork_samples(int n, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_possessions = n;
  spec.seed = seed;
  std::vector<Sample> out;
  auto ps = generate_possessions(spec);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto s = build_samples(ps[i], SampleConfig{10, 10, 2}, static_cast<std::uint32_t>(i));
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

ModelConfig tiny(int M) {
  ModelConfig cfg;
  cfg.M = M;
  cfg.recurrent_width = 8;
  cfg.recurrent_layers = 1;
  cfg.seed = 3;
  return cfg;
}

TrainConfig quick(int M, int epochs) {
  TrainConfig t = TrainConfig::base(M);
  t.batch_size = 32;
  t.learning_rate = 2e-3;
  t.max_epochs = epochs;
  t.seed = 4;
  return t;
}

TEST(Validation, CarvedByPossession) {
  auto samples = fork_samples(20, 1);
  auto split = carve_validation(samples, 0.1, 9);
  std::set<std::uint32_t> fit, val;
  for (const auto& s : split.fit) fit.insert(s.possession_index);
  for (const auto& s : split.validation) val.insert(s.possession_index);
  EXPECT_EQ(val.size(), 2u);
  for (auto v : val) EXPECT_EQ(fit.count(v), 0u);
  EXPECT_FALSE(split.validation_is_train);
  auto single = carve_validation(fork_samples(1, 1), 0.1, 9);
  EXPECT_TRUE(single.validation_is_train);
  EXPECT_EQ(single.validation.size(), single.fit.size());
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  auto samples = fork_samples(4, 2);
  auto r = train(samples, tiny(2), quick(2, 0));
  EXPECT_EQ(r.params.values, init_parameters(tiny(2), 3).values);
  EXPECT_TRUE(r.report.epochs.empty());
  EXPECT_EQ(r.report.stopping_epoch, -1);
}

TEST(Train, DeterministicAndReportsContiguousEpochs) {
  auto samples = fork_samples(12, 2);
  auto a = train(samples, tiny(2), quick(2, 3));
  auto b = train(samples, tiny(2), quick(2, 3));
  EXPECT_EQ(a.params.values, b.params.values);
  EXPECT_EQ(to_json(a.report), to_json(b.report));
  ASSERT_EQ(a.report.epochs.size(), 3u);
  for (int e = 0; e < 3; ++e) {
    EXPECT_EQ(a.report.epochs[e].epoch, e);
    EXPECT_EQ(a.report.epochs[e].epsilon, epsilon_at_epoch(quick(2, 3).loss, e));
  }
  // Returned parameters are those of the best epoch.
  auto split = carve_validation(samples, 0.1, 4);
  NetworkPredictor p(a.params, tiny(2), {});
  EXPECT_NEAR(min_ade(split.validation, p.predict(split.validation)), a.report.best_validation_min_ade_ft,
              1e-12);
  double best = a.report.epochs[0].validation_min_ade_ft;
  for (const auto& e : a.report.epochs) best = std::min(best, e.validation_min_ade_ft);
  EXPECT_EQ(best, a.report.best_validation_min_ade_ft);
}

TEST(Train, LossDecreasesOnForkData) {
  auto samples = fork_samples(40, 5);
  auto r = train(samples, tiny(2), quick(2, 6));
  EXPECT_LT(r.report.epochs.back().train_loss, r.report.epochs.front().train_loss);
}

TEST(Train, NonFiniteObjectiveAborts) {
  auto samples = fork_samples(4, 2);
  samples[0].target.velocities[3].vx = std::numeric_limits<double>::quiet_NaN();
  try {
    train(samples, tiny(2), quick(2, 1));
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.state()["epoch"], 0);
    EXPECT_TRUE(e.state().contains("param_norm"));
  }
}

TEST(Train, RejectsMismatchedConfig) {
  auto samples = fork_samples(4, 2);
  EXPECT_THROW(train(samples, tiny(2), quick(3, 1)), std::invalid_argument);
  ModelConfig longer = tiny(2);
  longer.H = 12;
  TrainConfig t = quick(2, 1);
  EXPECT_THROW(train(samples, longer, t), std::invalid_argument);
}

TEST(Finetune, ZeroEpochsKeepsBase) {
  auto samples = fork_samples(6, 2);
  auto base = train(samples, tiny(2), quick(2, 1));
  TrainConfig ft = TrainConfig::finetune(2);
  ft.max_epochs = 0;
  auto r = finetune(base.params, tiny(2), samples, tiny(2), ft);
  EXPECT_EQ(r.params.values, base.params.values);
  ModelConfig wider = tiny(2);
  wider.recurrent_width = 9;
  EXPECT_THROW(finetune(base.params, tiny(2), samples, wider, ft), std::invalid_argument);
}

TEST(Finetune, StartsAtFineTuneEpsilonAndDoesNotDegrade) {
  auto samples = fork_samples(60, 6);
  auto base = train(samples, tiny(4), quick(4, 8));
  auto mine = filter_by_player(samples, kSyntheticTrackedId);
  TrainConfig ft = TrainConfig::finetune(4);
  ft.max_epochs = 3;
  ft.batch_size = 32;
  ft.seed = 4;
  auto split = carve_validation(mine, ft.validation_fraction, ft.seed);
  NetworkPredictor before(base.params, tiny(4), {});
  const double start = min_ade(split.validation, before.predict(split.validation));
  auto r = finetune(base.params, tiny(4), mine, tiny(4), ft);
  EXPECT_EQ(r.report.epochs[0].epsilon, 0.75);
  EXPECT_LE(r.report.best_validation_min_ade_ft, start * 1.02);
}

TEST(Config, JsonRoundTrip) {
  TrainConfig t = TrainConfig::finetune(4);
  t.loss.distance = DistanceKind::kVelocity;
  t.loss.schedule = EpsilonSchedule::kMultiplicative;
  t.seed = 77;
  EXPECT_EQ(to_json(train_config_from_json(to_json(t))), to_json(t));
  EXPECT_EQ(finetune_subset_from_string("possession"), FinetuneSubset::kPossession);
}

}  // namespace
}  // namespace mbt
