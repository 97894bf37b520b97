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

#include "mbt/train.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "mbt/eval.hpp"

namespace mbt {

Adam::Adam(Eigen::Index size, AdamConfig cfg)
    : cfg_(cfg), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) {
    throw std::invalid_argument("Adam state size mismatch");
  }
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
}

const char* to_string(FinetuneSubset s) {
  return s == FinetuneSubset::kPlayerOfInterest ? "player_of_interest" : "possession";
}

FinetuneSubset finetune_subset_from_string(const std::string& name) {
  if (name == "player_of_interest") return FinetuneSubset::kPlayerOfInterest;
  if (name == "possession") return FinetuneSubset::kPossession;
  throw std::invalid_argument("unknown fine-tune subset '" + name + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(l2_weight >= 0.0)) throw std::invalid_argument("l2_weight must be >= 0");
  if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5)) {
    throw std::invalid_argument("validation_fraction must be in (0, 0.5)");
  }
  loss.validate();
}

TrainConfig TrainConfig::base(int M) {
  TrainConfig c;
  c.loss = LossConfig::base(M);
  return c;
}

TrainConfig TrainConfig::finetune(int M) {
  TrainConfig c;
  c.learning_rate = 1e-5;
  c.loss = LossConfig::finetune(M);
  return c;
}

EarlyStopping::EarlyStopping(int patience) : patience_(patience) {
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

bool EarlyStopping::update(double metric) {
  ++epoch_;
  if (std::isfinite(metric) && (best_epoch_ < 0 || metric < best_)) {
    best_ = metric;
    best_epoch_ = epoch_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

ValidationSplit carve_validation(std::span<const Sample> samples, double fraction,
                                 std::uint64_t seed) {
  std::set<std::uint32_t> unique;
  for (const auto& s : samples) unique.insert(s.possession_index);
  const std::vector<std::uint32_t> ids(unique.begin(), unique.end());
  const IndexSplit split = split_indices(ids.size(), 1.0 - fraction, seed);
  std::set<std::uint32_t> held;
  for (std::size_t k : split.test) held.insert(ids[k]);

  ValidationSplit out;
  for (const auto& s : samples) {
    (held.count(s.possession_index) ? out.validation : out.fit).push_back(s);
  }
  if (out.validation.empty()) {
    out.validation = out.fit;
    out.validation_is_train = true;
  }
  return out;
}

Objective objective(const Parameters& params, const ModelConfig& model_cfg, const Batch& batch,
                    const LossConfig& loss_cfg, double epsilon, double l2_weight) {
  ForwardCache cache;
  const NetworkOutput out = forward(params, model_cfg, batch.inputs, &cache);
  BatchLoss bl = mtp_loss_batch(out, batch.targets, loss_cfg, epsilon, model_cfg.output_kind);
  Objective o;
  o.data_loss = bl.loss;
  o.value = bl.loss + l2_weight * l2_penalty(params, model_cfg);
  o.gradient = backward(params, model_cfg, cache, bl.d_modes, bl.d_logits);
  if (l2_weight > 0.0) add_l2_gradient(params, model_cfg, l2_weight, o.gradient);
  o.winners = std::move(bl.winners);
  return o;
}

namespace {

TrainResult run_loop(Parameters params, std::span<const Sample> samples, const ModelConfig& model_cfg,
                     const TrainConfig& cfg, const NormalizationSpec& norm,
                     const EpochCallback& on_epoch) {
  model_cfg.validate();
  cfg.validate();
  if (cfg.loss.M != model_cfg.M) {
    throw std::invalid_argument(fmt::format("loss M = {} but model M = {}", cfg.loss.M, model_cfg.M));
  }
  if (samples.empty()) throw std::invalid_argument("training set is empty");
  for (const auto& s : samples) {
    if (s.horizon() != model_cfg.H || s.history_steps() != model_cfg.sequence_length()) {
      throw std::invalid_argument("sample shape does not match the model config");
    }
  }

  TrainResult result;
  result.params = params;
  if (cfg.max_epochs == 0) return result;

  const ValidationSplit split = carve_validation(samples, cfg.validation_fraction, cfg.seed);
  TrainReport& report = result.report;
  report.train_samples = split.fit.size();
  report.validation_samples = split.validation.size();
  report.validation_is_train = split.validation_is_train;

  Adam adam(params.values.size(), AdamConfig{cfg.learning_rate});
  EarlyStopping stopper(cfg.patience);
  const std::size_t n = split.fit.size();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double eps = epsilon_at_epoch(cfg.loss, epoch);
    const std::vector<std::size_t> order = epoch_order(n, cfg.seed, epoch);
    double loss_sum = 0.0;
    for (std::size_t begin = 0, b = 0; begin < n; begin += bs, ++b) {
      const std::span<const std::size_t> idx(order.data() + begin, std::min(bs, n - begin));
      const Batch batch = make_batch(split.fit, idx, norm, model_cfg.output_kind);
      const Objective o = objective(params, model_cfg, batch, cfg.loss, eps, cfg.l2_weight);
      if (!std::isfinite(o.value) || !o.gradient.allFinite()) {
        nlohmann::json state = {{"epoch", epoch},
                                {"batch", b},
                                {"objective", std::isfinite(o.value) ? nlohmann::json(o.value) : nlohmann::json("non-finite")},
                                {"epsilon", eps},
                                {"param_norm", params.values.norm()},
                                {"gradient_finite", o.gradient.allFinite()},
                                {"adam_steps", adam.steps()}};
        throw TrainingDiverged(fmt::format("training diverged at epoch {} batch {}", epoch, b),
                               std::move(state));
      }
      loss_sum += o.value * static_cast<double>(idx.size());
      adam.step(params.values, o.gradient);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.epsilon = eps;
    rec.train_loss = loss_sum / static_cast<double>(n);
    const NetworkPredictor predictor(params, model_cfg, norm);
    rec.validation_min_ade_ft = min_ade(split.validation, predictor.predict(split.validation));
    rec.improved = stopper.update(rec.validation_min_ade_ft);
    if (rec.improved) result.params = params;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.epochs.push_back(rec);
    report.stopping_epoch = epoch;
    if (on_epoch) on_epoch(rec);
    if (stopper.stop()) break;
  }
  report.best_epoch = stopper.best_epoch();
  report.best_validation_min_ade_ft = stopper.best();
  return result;
}

}  // namespace

TrainResult train(std::span<const Sample> samples, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const NormalizationSpec& norm,
                  const EpochCallback& on_epoch, const Parameters* init) {
  Parameters params = init ? *init : init_parameters(model_cfg, model_cfg.seed);
  if (params.values.size() != ParameterLayout(model_cfg).size()) {
    throw std::invalid_argument("initial parameters do not match the model config");
  }
  return run_loop(std::move(params), samples, model_cfg, train_cfg, norm, on_epoch);
}

TrainResult finetune(const Parameters& base, const ModelConfig& base_cfg,
                     std::span<const Sample> samples, const ModelConfig& model_cfg,
                     const TrainConfig& train_cfg, const NormalizationSpec& norm,
                     const EpochCallback& on_epoch) {
  if (!base_cfg.same_architecture(model_cfg)) {
    throw std::invalid_argument("base checkpoint architecture does not match the model config");
  }
  if (base.values.size() != ParameterLayout(base_cfg).size()) {
    throw std::invalid_argument("base parameters do not match the base config");
  }
  return run_loop(base, samples, model_cfg, train_cfg, norm, on_epoch);
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"l2_weight", c.l2_weight},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"validation_fraction", c.validation_fraction},
          {"loss",
           {{"alpha", c.loss.alpha},
            {"epsilon0", c.loss.epsilon0},
            {"epsilon_decrement", c.loss.epsilon_decrement},
            {"schedule", to_string(c.loss.schedule)},
            {"distance", to_string(c.loss.distance)},
            {"M", c.loss.M}}}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2_weight = j.at("l2_weight").get<double>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.patience = j.at("patience").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  const auto& l = j.at("loss");
  c.loss.alpha = l.at("alpha").get<double>();
  c.loss.epsilon0 = l.at("epsilon0").get<double>();
  c.loss.epsilon_decrement = l.at("epsilon_decrement").get<double>();
  c.loss.schedule = epsilon_schedule_from_string(l.at("schedule").get<std::string>());
  c.loss.distance = distance_kind_from_string(l.at("distance").get<std::string>());
  c.loss.M = l.at("M").get<int>();
  c.validate();
  return c;
}

nlohmann::json to_json(const TrainReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"validation_min_ade_ft", e.validation_min_ade_ft},
                      {"epsilon", e.epsilon},
                      {"improved", e.improved}});
  }
  return {{"epochs", epochs},
          {"stopping_epoch", r.stopping_epoch},
          {"best_epoch", r.best_epoch},
          {"best_validation_min_ade_ft", r.best_validation_min_ade_ft},
          {"best_checkpoint", r.best_checkpoint},
          {"train_samples", r.train_samples},
          {"validation_samples", r.validation_samples},
          {"validation_is_train", r.validation_is_train}};
}

}  // namespace mbt
