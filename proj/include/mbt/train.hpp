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

// Mini-batch training with Adam, l2 weight penalty and early stopping on a
// validation carve-out, plus warm-started per-player fine-tuning.

#ifndef MBT_TRAIN_HPP_
#define MBT_TRAIN_HPP_

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbt/dataset.hpp"
#include "mbt/loss.hpp"
#include "mbt/model.hpp"

namespace mbt {

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(Eigen::Index size, AdamConfig cfg);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

// Fine-tuning subset: samples where the player is the one predicted, or all
// samples from possessions the player took part in.
enum class FinetuneSubset { kPlayerOfInterest, kPossession };

const char* to_string(FinetuneSubset s);
FinetuneSubset finetune_subset_from_string(const std::string& name);

struct TrainConfig {
  int batch_size = 1024;
  double learning_rate = 5e-4;
  double l2_weight = 1e-3;
  int max_epochs = 50;
  int patience = 5;
  LossConfig loss;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;

  void validate() const;

  static TrainConfig base(int M);
  static TrainConfig finetune(int M);
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean objective over the epoch's samples
  double validation_min_ade_ft = 0.0;
  double epsilon = 0.0;
  double wall_seconds = 0.0;
  bool improved = false;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int stopping_epoch = -1;  // last epoch run, -1 if none
  int best_epoch = -1;
  double best_validation_min_ade_ft = 0.0;
  std::string best_checkpoint;
  std::size_t train_samples = 0;
  std::size_t validation_samples = 0;
  bool validation_is_train = false;  // carve-out was empty
};

// Tracks the best metric seen; stop() once `patience` epochs pass without
// strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);
  // Returns true if `metric` is a new best.
  bool update(double metric);
  bool stop() const { return since_best_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  int patience_;
  int epoch_ = -1;
  int best_epoch_ = -1;
  int since_best_ = 0;
  double best_ = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, nlohmann::json state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const nlohmann::json& state() const { return state_; }

 private:
  nlohmann::json state_;
};

struct TrainResult {
  Parameters params;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Samples split by possession into fit and validation parts.
struct ValidationSplit {
  std::vector<Sample> fit;
  std::vector<Sample> validation;
  bool validation_is_train = false;
};
ValidationSplit carve_validation(std::span<const Sample> samples, double fraction,
                                 std::uint64_t seed);

// Runs the training loop from `init` (fresh fan-in init from cfg.seed when
// null). Returns the parameters of the best validation epoch.
TrainResult train(std::span<const Sample> samples, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const NormalizationSpec& norm = {},
                  const EpochCallback& on_epoch = {}, const Parameters* init = nullptr);

// Same loop warm-started from `base`. Throws std::invalid_argument when the
// base architecture differs from `model_cfg`.
TrainResult finetune(const Parameters& base, const ModelConfig& base_cfg,
                     std::span<const Sample> samples, const ModelConfig& model_cfg,
                     const TrainConfig& train_cfg, const NormalizationSpec& norm = {},
                     const EpochCallback& on_epoch = {});

// One optimization objective evaluation: mean mtp loss over the batch plus
// l2_weight * |W|^2, with its gradient.
struct Objective {
  double value = 0.0;
  double data_loss = 0.0;
  Eigen::VectorXd gradient;
  std::vector<int> winners;
};
Objective objective(const Parameters& params, const ModelConfig& model_cfg, const Batch& batch,
                    const LossConfig& loss_cfg, double epsilon, double l2_weight);

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);
// Timing fields are left out so the summary is reproducible.
nlohmann::json to_json(const TrainReport& r);

}  // namespace mbt

#endif  // MBT_TRAIN_HPP_
