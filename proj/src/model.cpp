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

#include "mbt/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "binary_io.hpp"

namespace mbt {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using ConstMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;

constexpr char kCheckpointMagic[8] = {'M', 'B', 'T', 'C', 'K', 'P', 'T', '\0'};

ConstMap view(const Eigen::VectorXd& v, const ParameterLayout::Block& b) {
  return ConstMap(v.data() + b.offset, b.rows, b.cols);
}

Map view(Eigen::VectorXd& v, const ParameterLayout::Block& b) {
  return Map(v.data() + b.offset, b.rows, b.cols);
}

MatrixXd sigmoid(const MatrixXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

void ModelConfig::validate() const {
  if (L < 1 || H < 1) throw std::invalid_argument("L and H must be >= 1");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (recurrent_layers < 1 || recurrent_width < 1) {
    throw std::invalid_argument("recurrent stack must have at least one unit");
  }
  if (feature_width < 1) throw std::invalid_argument("feature_width must be >= 1");
}

bool ModelConfig::same_architecture(const ModelConfig& o) const {
  return L == o.L && H == o.H && M == o.M && recurrent_layers == o.recurrent_layers &&
         recurrent_width == o.recurrent_width && output_kind == o.output_kind &&
         feature_width == o.feature_width;
}

ParameterLayout::ParameterLayout(const ModelConfig& cfg) {
  cfg.validate();
  const Index w = cfg.recurrent_width;
  Index offset = 0;
  auto take = [&](Index rows, Index cols, bool weight) {
    Block b{offset, rows, cols, weight};
    offset += rows * cols;
    return b;
  };
  Index in = cfg.feature_width;
  for (int l = 0; l < cfg.recurrent_layers; ++l) {
    Recurrent r;
    r.input = take(4 * w, in, true);
    r.hidden = take(4 * w, w, true);
    r.bias = take(4 * w, 1, false);
    recurrent_.push_back(r);
    in = w;
  }
  out_w_ = take(cfg.output_size(), w, true);
  out_b_ = take(cfg.output_size(), 1, false);
  size_ = offset;
}

std::vector<ParameterLayout::Block> ParameterLayout::blocks() const {
  std::vector<Block> out;
  for (const auto& r : recurrent_) {
    out.push_back(r.input);
    out.push_back(r.hidden);
    out.push_back(r.bias);
  }
  out.push_back(out_w_);
  out.push_back(out_b_);
  return out;
}

std::size_t parameter_count(const ModelConfig& cfg) {
  return static_cast<std::size_t>(ParameterLayout(cfg).size());
}

Parameters init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  const ParameterLayout layout(cfg);
  Parameters p;
  p.values = Eigen::VectorXd::Zero(layout.size());
  std::mt19937_64 rng(seed);
  auto fill = [&](const ParameterLayout::Block& b, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* data = p.values.data() + b.offset;
    for (Index i = 0; i < b.size(); ++i) data[i] = dist(rng);
  };
  const Index w = cfg.recurrent_width;
  for (const auto& r : layout.recurrent()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(r.input.cols + w));
    fill(r.input, bound);
    fill(r.hidden, bound);
    p.values.segment(r.bias.offset + w, w).setOnes();
  }
  fill(layout.output_weight(), 1.0 / std::sqrt(static_cast<double>(w)));
  return p;
}

double l2_penalty(const Parameters& params, const ModelConfig& cfg) {
  double sum = 0.0;
  for (const auto& b : ParameterLayout(cfg).blocks()) {
    if (b.is_weight) sum += params.values.segment(b.offset, b.size()).squaredNorm();
  }
  return sum;
}

void add_l2_gradient(const Parameters& params, const ModelConfig& cfg, double weight,
                     Eigen::VectorXd& grad) {
  for (const auto& b : ParameterLayout(cfg).blocks()) {
    if (b.is_weight) {
      grad.segment(b.offset, b.size()) += 2.0 * weight * params.values.segment(b.offset, b.size());
    }
  }
}

MatrixXd softmax_columns(const MatrixXd& logits) {
  MatrixXd out(logits.rows(), logits.cols());
  for (Index c = 0; c < logits.cols(); ++c) {
    const double top = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - top).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

NetworkOutput forward(const Parameters& params, const ModelConfig& cfg,
                      const std::vector<MatrixXd>& inputs, ForwardCache* cache) {
  const ParameterLayout layout(cfg);
  if (params.values.size() != layout.size()) {
    throw std::invalid_argument("parameter vector does not match the model config");
  }
  if (static_cast<int>(inputs.size()) != cfg.sequence_length()) {
    throw std::invalid_argument(fmt::format("expected {} input steps, got {}",
                                            cfg.sequence_length(), inputs.size()));
  }
  const Index batch = inputs.front().cols();
  for (const auto& x : inputs) {
    if (x.rows() != cfg.feature_width || x.cols() != batch) {
      throw std::invalid_argument("input step has the wrong shape");
    }
  }
  const Index w = cfg.recurrent_width;
  const auto steps = inputs.size();

  if (cache) {
    cache->inputs = inputs;
    cache->layers.assign(static_cast<std::size_t>(cfg.recurrent_layers), {});
  }

  const std::vector<MatrixXd>* layer_in = &inputs;
  std::vector<MatrixXd> hidden_seq;
  for (std::size_t l = 0; l < layout.recurrent().size(); ++l) {
    const auto& blk = layout.recurrent()[l];
    const auto wx = view(params.values, blk.input);
    const auto wh = view(params.values, blk.hidden);
    const auto b = view(params.values, blk.bias);

    std::vector<MatrixXd> next_seq(steps);
    MatrixXd h = MatrixXd::Zero(w, batch);
    MatrixXd c = MatrixXd::Zero(w, batch);
    ForwardCache::Layer* lc = cache ? &cache->layers[l] : nullptr;
    if (lc) {
      lc->gates.resize(steps);
      lc->cell.resize(steps);
      lc->cell_tanh.resize(steps);
      lc->hidden.resize(steps);
    }
    for (std::size_t t = 0; t < steps; ++t) {
      MatrixXd z = wx * (*layer_in)[t];
      if (t > 0) z.noalias() += wh * h;
      z.colwise() += b.col(0);
      MatrixXd gates(4 * w, batch);
      gates.topRows(2 * w) = sigmoid(z.topRows(2 * w));
      gates.middleRows(2 * w, w) = z.middleRows(2 * w, w).array().tanh().matrix();
      gates.bottomRows(w) = sigmoid(z.bottomRows(w));
      c = (gates.middleRows(w, w).array() * c.array() +
           gates.topRows(w).array() * gates.middleRows(2 * w, w).array())
              .matrix();
      MatrixXd tc = c.array().tanh().matrix();
      h = (gates.bottomRows(w).array() * tc.array()).matrix();
      next_seq[t] = h;
      if (lc) {
        lc->gates[t] = std::move(gates);
        lc->cell[t] = c;
        lc->cell_tanh[t] = std::move(tc);
        lc->hidden[t] = h;
      }
    }
    hidden_seq = std::move(next_seq);
    layer_in = &hidden_seq;
  }

  const auto wo = view(params.values, layout.output_weight());
  const auto bo = view(params.values, layout.output_bias());
  MatrixXd y = wo * hidden_seq.back();
  y.colwise() += bo.col(0);

  NetworkOutput out;
  const Index profile_rows = static_cast<Index>(cfg.profile_size()) * cfg.M;
  out.modes = y.topRows(profile_rows);
  out.logits = y.bottomRows(cfg.M);
  out.probs = softmax_columns(out.logits);
  return out;
}

Eigen::VectorXd backward(const Parameters& params, const ModelConfig& cfg,
                         const ForwardCache& cache, const MatrixXd& d_modes,
                         const MatrixXd& d_logits) {
  const ParameterLayout layout(cfg);
  const Index w = cfg.recurrent_width;
  const std::size_t steps = cache.inputs.size();
  const Index batch = cache.inputs.front().cols();
  if (cache.layers.size() != layout.recurrent().size()) {
    throw std::invalid_argument("forward cache does not match the model config");
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  MatrixXd d_y(cfg.output_size(), batch);
  d_y.topRows(d_modes.rows()) = d_modes;
  d_y.bottomRows(cfg.M) = d_logits;

  const auto& top_h = cache.layers.back().hidden.back();
  view(grad, layout.output_weight()).noalias() += d_y * top_h.transpose();
  view(grad, layout.output_bias()).col(0) += d_y.rowwise().sum();

  // Gradient w.r.t. each layer's hidden output per step, from the layer above.
  std::vector<MatrixXd> d_above(steps);
  d_above.back() = view(params.values, layout.output_weight()).transpose() * d_y;

  for (std::size_t li = layout.recurrent().size(); li-- > 0;) {
    const auto& blk = layout.recurrent()[li];
    const auto& lc = cache.layers[li];
    const auto wx = view(params.values, blk.input);
    const auto wh = view(params.values, blk.hidden);
    auto g_wx = view(grad, blk.input);
    auto g_wh = view(grad, blk.hidden);
    auto g_b = view(grad, blk.bias);
    const std::vector<MatrixXd>& layer_in = li == 0 ? cache.inputs : cache.layers[li - 1].hidden;

    std::vector<MatrixXd> d_below(steps);
    MatrixXd dh_next = MatrixXd::Zero(w, batch);
    MatrixXd dc_next = MatrixXd::Zero(w, batch);
    MatrixXd dz(4 * w, batch);
    for (std::size_t t = steps; t-- > 0;) {
      MatrixXd dh = dh_next;
      if (d_above[t].size() != 0) dh += d_above[t];
      const auto& gates = lc.gates[t];
      const auto i = gates.topRows(w).array();
      const auto f = gates.middleRows(w, w).array();
      const auto g = gates.middleRows(2 * w, w).array();
      const auto o = gates.bottomRows(w).array();
      const auto tc = lc.cell_tanh[t].array();

      const Eigen::ArrayXXd dc =
          dh.array() * o * (1.0 - tc.square()) + dc_next.array();
      dz.topRows(w) = (dc * g * i * (1.0 - i)).matrix();
      if (t > 0) {
        dz.middleRows(w, w) = (dc * lc.cell[t - 1].array() * f * (1.0 - f)).matrix();
      } else {
        dz.middleRows(w, w).setZero();
      }
      dz.middleRows(2 * w, w) = (dc * i * (1.0 - g.square())).matrix();
      dz.bottomRows(w) = (dh.array() * tc * o * (1.0 - o)).matrix();
      dc_next = (dc * f).matrix();

      g_wx.noalias() += dz * layer_in[t].transpose();
      if (t > 0) g_wh.noalias() += dz * lc.hidden[t - 1].transpose();
      g_b.col(0) += dz.rowwise().sum();
      dh_next.noalias() = wh.transpose() * dz;
      if (li > 0) d_below[t].noalias() = wx.transpose() * dz;
    }
    d_above = std::move(d_below);
  }
  return grad;
}

int ModePrediction::most_probable() const {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

ModePrediction decode_velocity(const NetworkOutput& out, Index col, const ModelConfig& cfg,
                               const NormalizationSpec& norm, double dt) {
  ModePrediction p;
  const Index ps = cfg.profile_size();
  for (int m = 0; m < cfg.M; ++m) {
    VelocityProfile prof;
    prof.dt = dt;
    prof.velocities.reserve(static_cast<std::size_t>(cfg.H));
    for (int h = 0; h < cfg.H; ++h) {
      const double vx = std::clamp(out.modes(m * ps + 2 * h, col), -1.0, 1.0);
      const double vy = std::clamp(out.modes(m * ps + 2 * h + 1, col), -1.0, 1.0);
      prof.velocities.push_back({denormalize(vx, FeatureKind::kVelocity, norm),
                                 denormalize(vy, FeatureKind::kVelocity, norm)});
    }
    p.modes.push_back(std::move(prof));
    p.probs.push_back(out.probs(m, col));
  }
  return p;
}

LocationPrediction decode_location(const NetworkOutput& out, Index col, const ModelConfig& cfg,
                                   const NormalizationSpec& norm, double dt) {
  LocationPrediction p;
  const Index ps = cfg.profile_size();
  for (int m = 0; m < cfg.M; ++m) {
    Trajectory traj;
    traj.dt = dt;
    for (int h = 0; h < cfg.H; ++h) {
      const double x = std::clamp(out.modes(m * ps + 2 * h, col), -1.0, 1.0);
      const double y = std::clamp(out.modes(m * ps + 2 * h + 1, col), -1.0, 1.0);
      traj.locations.push_back({denormalize(x, FeatureKind::kLocationX, norm),
                                denormalize(y, FeatureKind::kLocationY, norm)});
    }
    p.modes.push_back(std::move(traj));
    p.probs.push_back(out.probs(m, col));
  }
  return p;
}

std::vector<LocationPrediction> location_head_forward(const Parameters& params,
                                                      const ModelConfig& cfg,
                                                      const std::vector<MatrixXd>& inputs,
                                                      const NormalizationSpec& norm, double dt) {
  if (cfg.output_kind != OutputKind::kLocation) {
    throw std::invalid_argument("location_head_forward needs a location-output model");
  }
  const NetworkOutput out = forward(params, cfg, inputs);
  std::vector<LocationPrediction> preds;
  for (Index c = 0; c < out.modes.cols(); ++c) preds.push_back(decode_location(out, c, cfg, norm, dt));
  return preds;
}

ModePrediction to_velocity_prediction(const LocationPrediction& p, const Location2D& anchor) {
  ModePrediction out;
  out.probs = p.probs;
  for (const auto& traj : p.modes) out.modes.push_back(velocities_from_locations(anchor, traj));
  return out;
}

ModePrediction predict_cl(const Sample& s) {
  ModePrediction p;
  VelocityProfile prof;
  prof.dt = s.target.dt;
  prof.velocities.assign(static_cast<std::size_t>(s.horizon()), Velocity2D{});
  p.modes.push_back(std::move(prof));
  p.probs = {1.0};
  return p;
}

ModePrediction predict_cv(const Sample& s) {
  ModePrediction p;
  VelocityProfile prof;
  prof.dt = s.target.dt;
  prof.velocities.assign(static_cast<std::size_t>(s.horizon()), s.last_observed_velocity());
  p.modes.push_back(std::move(prof));
  p.probs = {1.0};
  return p;
}

std::vector<ModePrediction> ConstantLocationPredictor::predict(
    std::span<const Sample> samples) const {
  std::vector<ModePrediction> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(predict_cl(s));
  return out;
}

std::vector<ModePrediction> ConstantVelocityPredictor::predict(
    std::span<const Sample> samples) const {
  std::vector<ModePrediction> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(predict_cv(s));
  return out;
}

NetworkPredictor::NetworkPredictor(Parameters params, ModelConfig cfg, NormalizationSpec norm,
                                   std::string id, int chunk_size)
    : params_(std::move(params)),
      cfg_(cfg),
      norm_(norm),
      id_(std::move(id)),
      chunk_size_(std::max(1, chunk_size)) {
  if (params_.values.size() != ParameterLayout(cfg_).size()) {
    throw std::invalid_argument("parameter vector does not match the model config");
  }
}

std::vector<ModePrediction> NetworkPredictor::predict(std::span<const Sample> samples) const {
  std::vector<ModePrediction> out;
  out.reserve(samples.size());
  const auto chunk = static_cast<std::size_t>(chunk_size_);
  for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
    const std::size_t end = std::min(samples.size(), begin + chunk);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const NetworkOutput net = forward(params_, cfg_, encode_features(samples, idx, norm_));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Sample& s = samples[idx[k]];
      if (s.horizon() != cfg_.H) throw std::invalid_argument("sample horizon does not match model");
      const auto col = static_cast<Index>(k);
      if (cfg_.output_kind == OutputKind::kVelocity) {
        out.push_back(decode_velocity(net, col, cfg_, norm_, s.target.dt));
      } else {
        out.push_back(to_velocity_prediction(decode_location(net, col, cfg_, norm_, s.target.dt),
                                              s.anchor_location));
      }
    }
  }
  return out;
}

nlohmann::json to_json(const ModelConfig& cfg) {
  return {{"L", cfg.L},
          {"H", cfg.H},
          {"M", cfg.M},
          {"recurrent_layers", cfg.recurrent_layers},
          {"recurrent_width", cfg.recurrent_width},
          {"output_kind", to_string(cfg.output_kind)},
          {"feature_width", cfg.feature_width},
          {"seed", cfg.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.L = j.at("L").get<int>();
  cfg.H = j.at("H").get<int>();
  cfg.M = j.at("M").get<int>();
  cfg.recurrent_layers = j.at("recurrent_layers").get<int>();
  cfg.recurrent_width = j.at("recurrent_width").get<int>();
  cfg.output_kind = output_kind_from_string(j.at("output_kind").get<std::string>());
  cfg.feature_width = j.at("feature_width").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const NormalizationSpec& n) {
  return {{"court_length_ft", n.court.length_ft},
          {"court_width_ft", n.court.width_ft},
          {"halfcourt_x_ft", n.court.halfcourt_x_ft},
          {"v_max_fps", n.v_max_fps},
          {"shot_clock_max_s", n.shot_clock_max_s}};
}

NormalizationSpec normalization_from_json(const nlohmann::json& j) {
  NormalizationSpec n;
  n.court.length_ft = j.at("court_length_ft").get<double>();
  n.court.width_ft = j.at("court_width_ft").get<double>();
  n.court.halfcourt_x_ft = j.at("halfcourt_x_ft").get<double>();
  n.v_max_fps = j.at("v_max_fps").get<double>();
  n.shot_clock_max_s = j.at("shot_clock_max_s").get<double>();
  n.validate();
  return n;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (ckpt.params.values.size() != ParameterLayout(ckpt.config).size()) {
    throw std::invalid_argument("checkpoint parameters do not match its config");
  }
  nlohmann::json header = {
      {"format", "mbt-checkpoint"},
      {"version", kCheckpointVersion},
      {"model", to_json(ckpt.config)},
      {"feature_layout",
       {{"version", ckpt.layout.version},
        {"width", ckpt.layout.width},
        {"sequence_length", ckpt.layout.sequence_length}}},
      {"normalization", to_json(ckpt.norm)},
      {"parameter_count", ckpt.params.values.size()},
      {"provenance", ckpt.provenance},
  };
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  io::put(out, static_cast<std::uint32_t>(kCheckpointVersion));
  io::put(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(ckpt.params.values.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(ckpt.params.values.size())));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw DataQualityError("not a checkpoint file: " + path.string());
  }
  const auto version = io::get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataQualityError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = io::get<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataQualityError("truncated checkpoint header");
  const auto header = nlohmann::json::parse(text);

  Checkpoint ckpt;
  ckpt.config = model_config_from_json(header.at("model"));
  const auto& fl = header.at("feature_layout");
  ckpt.layout.version = fl.at("version").get<int>();
  ckpt.layout.width = fl.at("width").get<int>();
  ckpt.layout.sequence_length = fl.at("sequence_length").get<int>();
  if (ckpt.layout.version != FeatureLayout::kVersion || ckpt.layout.width != FeatureLayout::kWidth) {
    throw DataQualityError("checkpoint feature layout does not match this build");
  }
  ckpt.norm = normalization_from_json(header.at("normalization"));
  ckpt.provenance = header.value("provenance", nlohmann::json::object());
  const auto count = header.at("parameter_count").get<Index>();
  if (count != ParameterLayout(ckpt.config).size()) {
    throw DataQualityError("checkpoint parameter count does not match its config");
  }
  ckpt.params.values.resize(count);
  in.read(reinterpret_cast<char*>(ckpt.params.values.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(count)));
  if (!in) throw DataQualityError("truncated checkpoint parameters");
  return ckpt;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

}  // namespace mbt
