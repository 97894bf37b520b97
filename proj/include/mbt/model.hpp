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

// Multi-modal sequence predictor: a stack of LSTM layers reads the L + 1
// feature steps, and one dense layer maps the last hidden state of the top
// layer to (2H + 1) * M outputs: M profiles of H 2-D values followed by M
// mode logits. Also hosts the constant-location and constant-velocity
// baselines and the model checkpoint format.

#ifndef MBT_MODEL_HPP_
#define MBT_MODEL_HPP_

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/dataset.hpp"

namespace mbt {

struct ModelConfig {
  int L = 10;
  int H = 10;
  int M = 4;
  int recurrent_layers = 2;
  int recurrent_width = 128;
  OutputKind output_kind = OutputKind::kVelocity;
  int feature_width = FeatureLayout::kWidth;
  std::uint64_t seed = 0;

  int sequence_length() const { return L + 1; }
  int profile_size() const { return 2 * H; }
  int output_size() const { return (2 * H + 1) * M; }
  void validate() const;
  // Same architecture (seed ignored).
  bool same_architecture(const ModelConfig& other) const;
};

// Offsets of every weight block inside the flat parameter vector. Matrices
// are stored column-major. LSTM gate rows are ordered input, forget, cell,
// output.
class ParameterLayout {
 public:
  struct Block {
    Eigen::Index offset = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool is_weight = true;  // false for biases (excluded from l2)
    Eigen::Index size() const { return rows * cols; }
  };
  struct Recurrent {
    Block input;
    Block hidden;
    Block bias;
  };

  explicit ParameterLayout(const ModelConfig& cfg);

  const std::vector<Recurrent>& recurrent() const { return recurrent_; }
  const Block& output_weight() const { return out_w_; }
  const Block& output_bias() const { return out_b_; }
  Eigen::Index size() const { return size_; }
  std::vector<Block> blocks() const;

 private:
  std::vector<Recurrent> recurrent_;
  Block out_w_;
  Block out_b_;
  Eigen::Index size_ = 0;
};

struct Parameters {
  Eigen::VectorXd values;
};

std::size_t parameter_count(const ModelConfig& cfg);

// Fan-in uniform: every weight ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) where
// fan_in counts the input and recurrent connections of a gate. Biases start at
// zero except the forget gate, which starts at 1.
Parameters init_parameters(const ModelConfig& cfg, std::uint64_t seed);

// Sum of squared weights (biases excluded) and its gradient added in place.
double l2_penalty(const Parameters& params, const ModelConfig& cfg);
void add_l2_gradient(const Parameters& params, const ModelConfig& cfg, double weight,
                     Eigen::VectorXd& grad);

struct NetworkOutput {
  Eigen::MatrixXd modes;   // 2H * M x B, mode m occupies rows [2Hm, 2H(m+1))
  Eigen::MatrixXd logits;  // M x B
  Eigen::MatrixXd probs;   // M x B, softmax of logits
};

// Activations kept for the backward pass.
struct ForwardCache {
  struct Layer {
    std::vector<Eigen::MatrixXd> gates;  // 4W x B, post-activation
    std::vector<Eigen::MatrixXd> cell;
    std::vector<Eigen::MatrixXd> cell_tanh;
    std::vector<Eigen::MatrixXd> hidden;
  };
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Layer> layers;
};

// `inputs` holds sequence_length() matrices of feature_width x B.
NetworkOutput forward(const Parameters& params, const ModelConfig& cfg,
                      const std::vector<Eigen::MatrixXd>& inputs,
                      ForwardCache* cache = nullptr);

// Gradient of a scalar loss w.r.t. the flat parameter vector, given the
// loss gradient w.r.t. the raw mode outputs and the logits.
Eigen::VectorXd backward(const Parameters& params, const ModelConfig& cfg,
                         const ForwardCache& cache, const Eigen::MatrixXd& d_modes,
                         const Eigen::MatrixXd& d_logits);

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

struct ModePrediction {
  std::vector<VelocityProfile> modes;  // ft/s
  std::vector<double> probs;

  int M() const { return static_cast<int>(modes.size()); }
  int most_probable() const;
};

struct LocationPrediction {
  std::vector<Trajectory> modes;  // ft
  std::vector<double> probs;
};

// Column `col` of a velocity-output network in ft/s. Normalized outputs are
// clamped to [-1, 1] before scaling.
ModePrediction decode_velocity(const NetworkOutput& out, Eigen::Index col,
                               const ModelConfig& cfg, const NormalizationSpec& norm,
                               double dt);
LocationPrediction decode_location(const NetworkOutput& out, Eigen::Index col,
                                   const ModelConfig& cfg, const NormalizationSpec& norm,
                                   double dt);

// Location-output forward pass, denormalized to feet.
std::vector<LocationPrediction> location_head_forward(
    const Parameters& params, const ModelConfig& cfg,
    const std::vector<Eigen::MatrixXd>& inputs, const NormalizationSpec& norm, double dt);

// Velocities implied by predicted locations, anchored at the last observed
// location.
ModePrediction to_velocity_prediction(const LocationPrediction& p, const Location2D& anchor);

// Player stays put.
ModePrediction predict_cl(const Sample& s);
// Player keeps the last observed velocity.
ModePrediction predict_cv(const Sample& s);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string id() const = 0;
  virtual int modes() const = 0;
  virtual std::vector<ModePrediction> predict(std::span<const Sample> samples) const = 0;
};

class ConstantLocationPredictor final : public Predictor {
 public:
  std::string id() const override { return "CL"; }
  int modes() const override { return 1; }
  std::vector<ModePrediction> predict(std::span<const Sample> samples) const override;
};

class ConstantVelocityPredictor final : public Predictor {
 public:
  std::string id() const override { return "CV"; }
  int modes() const override { return 1; }
  std::vector<ModePrediction> predict(std::span<const Sample> samples) const override;
};

class NetworkPredictor final : public Predictor {
 public:
  NetworkPredictor(Parameters params, ModelConfig cfg, NormalizationSpec norm,
                   std::string id = "network", int chunk_size = 1024);

  std::string id() const override { return id_; }
  int modes() const override { return cfg_.M; }
  std::vector<ModePrediction> predict(std::span<const Sample> samples) const override;

 private:
  Parameters params_;
  ModelConfig cfg_;
  NormalizationSpec norm_;
  std::string id_;
  int chunk_size_;
};

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  FeatureLayout layout;
  NormalizationSpec norm;
  Parameters params;
  nlohmann::json provenance = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NormalizationSpec& norm);
NormalizationSpec normalization_from_json(const nlohmann::json& j);

}  // namespace mbt

#endif  // MBT_MODEL_HPP_
