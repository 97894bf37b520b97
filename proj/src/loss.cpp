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

#include "mbt/loss.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace mbt {
namespace {

using Eigen::Index;
using Eigen::VectorXd;

VectorXd pack(const VelocityProfile& p) {
  VectorXd v(2 * static_cast<Index>(p.size()));
  for (std::size_t h = 0; h < p.size(); ++h) {
    v(2 * static_cast<Index>(h)) = p.velocities[h].vx;
    v(2 * static_cast<Index>(h) + 1) = p.velocities[h].vy;
  }
  return v;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument(fmt::format("profile lengths differ: {} vs {}", a, b));
  if (a == 0) throw std::invalid_argument("empty profile");
}

}  // namespace

const char* to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kMse: return "MSE";
    case DistanceKind::kLocation: return "l";
    case DistanceKind::kVelocity: return "v";
  }
  return "?";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "MSE" || name == "mse") return DistanceKind::kMse;
  if (name == "l") return DistanceKind::kLocation;
  if (name == "v") return DistanceKind::kVelocity;
  throw std::invalid_argument("unknown distance kind '" + name + "' (expected MSE, l or v)");
}

const char* to_string(EpsilonSchedule s) {
  return s == EpsilonSchedule::kLinear ? "linear" : "multiplicative";
}

EpsilonSchedule epsilon_schedule_from_string(const std::string& name) {
  if (name == "linear") return EpsilonSchedule::kLinear;
  if (name == "multiplicative") return EpsilonSchedule::kMultiplicative;
  throw std::invalid_argument("unknown epsilon schedule '" + name + "'");
}

void LossConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(epsilon0 >= 0.0 && epsilon0 < 1.0)) throw std::invalid_argument("epsilon0 must be in [0, 1)");
  if (!(epsilon_decrement >= 0.0)) throw std::invalid_argument("epsilon decrement must be >= 0");
  if (schedule == EpsilonSchedule::kMultiplicative && epsilon_decrement > 1.0) {
    throw std::invalid_argument("multiplicative decrement must be <= 1");
  }
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (M == 1 && epsilon0 > 0.0) throw std::invalid_argument("M = 1 requires epsilon0 = 0");
}

LossConfig LossConfig::base(int M) {
  LossConfig c;
  c.M = M;
  if (M == 1) c.epsilon0 = c.epsilon_decrement = 0.0;
  return c;
}

LossConfig LossConfig::finetune(int M) {
  LossConfig c;
  c.M = M;
  c.epsilon0 = 0.75;
  c.epsilon_decrement = 0.01;
  if (M == 1) c.epsilon0 = c.epsilon_decrement = 0.0;
  return c;
}

double packed_mse(const Eigen::Ref<const VectorXd>& truth, const Eigen::Ref<const VectorXd>& pred) {
  require_same_length(static_cast<std::size_t>(truth.size()), static_cast<std::size_t>(pred.size()));
  return (truth - pred).squaredNorm() / static_cast<double>(truth.size());
}

double packed_distance(const Eigen::Ref<const VectorXd>& truth, const Eigen::Ref<const VectorXd>& pred,
                       DistanceKind kind, OutputKind output) {
  require_same_length(static_cast<std::size_t>(truth.size()), static_cast<std::size_t>(pred.size()));
  const Index n = truth.size();
  const VectorXd err = truth - pred;
  switch (kind) {
    case DistanceKind::kMse:
      return err.squaredNorm() / static_cast<double>(n);
    case DistanceKind::kLocation: {
      if (output == OutputKind::kLocation) return std::hypot(err(n - 2), err(n - 1));
      double sx = 0.0, sy = 0.0;
      for (Index i = 0; i < n; i += 2) {
        sx += err(i);
        sy += err(i + 1);
      }
      return std::hypot(sx, sy);
    }
    case DistanceKind::kVelocity: {
      if (output == OutputKind::kLocation && n >= 4) {
        return std::hypot(err(n - 2) - err(n - 4), err(n - 1) - err(n - 3));
      }
      return std::hypot(err(n - 2), err(n - 1));
    }
  }
  throw std::invalid_argument("unknown distance kind");
}

double mse_loss(const VelocityProfile& truth, const VelocityProfile& pred) {
  require_same_length(truth.size(), pred.size());
  return packed_mse(pack(truth), pack(pred));
}

double distance(const VelocityProfile& truth, const VelocityProfile& pred, DistanceKind kind) {
  require_same_length(truth.size(), pred.size());
  return packed_distance(pack(truth), pack(pred), kind, OutputKind::kVelocity);
}

int winning_mode(const VelocityProfile& truth, std::span<const VelocityProfile> modes,
                 DistanceKind kind) {
  if (modes.empty()) throw std::invalid_argument("no modes");
  int best = 0;
  double best_d = distance(truth, modes[0], kind);
  for (std::size_t m = 1; m < modes.size(); ++m) {
    const double d = distance(truth, modes[m], kind);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(m);
    }
  }
  return best;
}

double relaxed_delta(int m, int m_star, double epsilon, int M) {
  if (M < 1 || m < 0 || m >= M || m_star < 0 || m_star >= M) {
    throw std::invalid_argument("mode index out of range");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in [0, 1)");
  if (M == 1) {
    if (epsilon != 0.0) throw std::invalid_argument("M = 1 requires epsilon = 0");
    return 1.0;
  }
  return m == m_star ? 1.0 - epsilon : epsilon / static_cast<double>(M - 1);
}

LossBreakdown mtp_loss(const VelocityProfile& truth, const ModePrediction& prediction,
                       const LossConfig& cfg, double epsilon) {
  const int M = prediction.M();
  if (M < 1 || static_cast<int>(prediction.probs.size()) != M) {
    throw std::invalid_argument("prediction needs one probability per mode");
  }
  double sum = 0.0;
  for (double p : prediction.probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("probabilities do not sum to 1");

  LossBreakdown b;
  b.winning_mode = winning_mode(truth, prediction.modes, cfg.distance);
  b.delta_weights.resize(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double w = relaxed_delta(m, b.winning_mode, epsilon, M);
    b.delta_weights[static_cast<std::size_t>(m)] = w;
    if (w == 0.0) continue;
    const double p = prediction.probs[static_cast<std::size_t>(m)];
    if (p < kMinProbability) ++b.clamped_probabilities;
    b.classification += w * -std::log(std::max(p, kMinProbability));
    b.trajectory += w * mse_loss(truth, prediction.modes[static_cast<std::size_t>(m)]);
  }
  b.total = b.classification + cfg.alpha * b.trajectory;
  return b;
}

double epsilon_at_epoch(const LossConfig& cfg, int epoch) {
  if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
  if (cfg.schedule == EpsilonSchedule::kMultiplicative) {
    return cfg.epsilon0 * std::pow(1.0 - cfg.epsilon_decrement, epoch);
  }
  // Fixed-point in units of 1e-9 so that 0.25 - 3 * 0.05 is exactly 0.1.
  const long long e0 = std::llround(cfg.epsilon0 * 1e9);
  const long long d = std::llround(cfg.epsilon_decrement * 1e9);
  const long long v = e0 - static_cast<long long>(epoch) * d;
  return v <= 0 ? 0.0 : static_cast<double>(v) / 1e9;
}

BatchLoss mtp_loss_batch(const NetworkOutput& out, const Eigen::MatrixXd& targets,
                         const LossConfig& cfg, double epsilon, OutputKind output) {
  const int M = cfg.M;
  const Index P = targets.rows();
  const Index B = targets.cols();
  if (out.modes.rows() != P * M || out.modes.cols() != B || out.probs.rows() != M) {
    throw std::invalid_argument("network output does not match targets and M");
  }
  BatchLoss r;
  r.d_modes = Eigen::MatrixXd::Zero(out.modes.rows(), B);
  r.d_logits = Eigen::MatrixXd::Zero(M, B);
  r.winners.resize(static_cast<std::size_t>(B));
  const double inv_b = 1.0 / static_cast<double>(B);
  std::vector<double> delta(static_cast<std::size_t>(M));

  for (Index c = 0; c < B; ++c) {
    const auto truth = targets.col(c);
    int win = 0;
    double best = packed_distance(truth, out.modes.col(c).segment(0, P), cfg.distance, output);
    for (int m = 1; m < M; ++m) {
      const double d = packed_distance(truth, out.modes.col(c).segment(m * P, P), cfg.distance, output);
      if (d < best) {
        best = d;
        win = m;
      }
    }
    r.winners[static_cast<std::size_t>(c)] = win;

    double unclamped_weight = 0.0;
    for (int m = 0; m < M; ++m) {
      const double w = relaxed_delta(m, win, epsilon, M);
      delta[static_cast<std::size_t>(m)] = w;
      if (w == 0.0) continue;
      const auto mode = out.modes.col(c).segment(m * P, P);
      const double p = out.probs(m, c);
      double nll;
      if (p < kMinProbability) {
        ++r.clamped_probabilities;
        nll = -std::log(kMinProbability);
      } else {
        nll = -std::log(p);
        unclamped_weight += w;
      }
      const double mse = packed_mse(truth, mode);
      r.classification += w * nll * inv_b;
      r.trajectory += w * mse * inv_b;
      // d mse / d mode = 2 (mode - truth) / 2H
      r.d_modes.col(c).segment(m * P, P) =
          (w * cfg.alpha * 2.0 / static_cast<double>(P) * inv_b) * (mode - truth);
    }
    // d/dz_j sum_m w_m (-log p_m) over unclamped m = p_j * W - w_j [j unclamped]
    for (int j = 0; j < M; ++j) {
      const bool live = out.probs(j, c) >= kMinProbability;
      r.d_logits(j, c) =
          (out.probs(j, c) * unclamped_weight - (live ? delta[static_cast<std::size_t>(j)] : 0.0)) * inv_b;
    }
  }
  r.loss = r.classification + cfg.alpha * r.trajectory;
  return r;
}

}  // namespace mbt
