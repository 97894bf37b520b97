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

// Multiple-trajectory prediction loss.
//
// For a sample with M predicted modes the loss is
//
//   sum_m delta_eps(m, m*) * (-log p_m + alpha * mse(truth, mode_m))
//
// where m* is the mode closest to the truth under the configured distance
// and delta_eps gives 1 - eps to the winner and eps / (M - 1) to every other
// mode. The classification term is the negative log probability: the
// minimizer pushes the winner's probability towards 1.

#ifndef MBT_LOSS_HPP_
#define MBT_LOSS_HPP_

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/model.hpp"

namespace mbt {

// Winner selection criterion.
//   kMse:      mse over the whole profile
//   kLocation: |sum_h (v_h - v^_h)|, i.e. final location error / dt ("l")
//   kVelocity: |v_H - v^_H|, final velocity error ("v")
enum class DistanceKind { kMse, kLocation, kVelocity };

const char* to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

// kLinear:         max(0, eps0 - epoch * decrement)
// kMultiplicative: eps0 * (1 - decrement)^epoch
enum class EpsilonSchedule { kLinear, kMultiplicative };

const char* to_string(EpsilonSchedule s);
EpsilonSchedule epsilon_schedule_from_string(const std::string& name);

inline constexpr double kMinProbability = 1e-12;

struct LossConfig {
  double alpha = 1.0;
  double epsilon0 = 0.25;
  double epsilon_decrement = 0.05;
  EpsilonSchedule schedule = EpsilonSchedule::kLinear;
  DistanceKind distance = DistanceKind::kLocation;
  int M = 4;

  void validate() const;

  static LossConfig base(int M);
  static LossConfig finetune(int M);
};

struct LossBreakdown {
  double total = 0.0;
  double classification = 0.0;  // sum_m delta_m * -log p_m
  double trajectory = 0.0;       // sum_m delta_m * mse_m (alpha not applied)
  int winning_mode = 0;
  std::vector<double> delta_weights;
  int clamped_probabilities = 0;  // weighted modes with p below kMinProbability
};

double mse_loss(const VelocityProfile& truth, const VelocityProfile& pred);
double distance(const VelocityProfile& truth, const VelocityProfile& pred, DistanceKind kind);
int winning_mode(const VelocityProfile& truth, std::span<const VelocityProfile> modes,
                 DistanceKind kind);
double relaxed_delta(int m, int m_star, double epsilon, int M);

LossBreakdown mtp_loss(const VelocityProfile& truth, const ModePrediction& prediction,
                       const LossConfig& cfg, double epsilon);

double epsilon_at_epoch(const LossConfig& cfg, int epoch);

// Profiles packed as 2H interleaved (x, y) values, used on raw network
// outputs. For location outputs the distances switch to location analogues:
// kMse is the mse over locations, kLocation the final location error and
// kVelocity the error of the last displacement.
double packed_mse(const Eigen::Ref<const Eigen::VectorXd>& truth,
                  const Eigen::Ref<const Eigen::VectorXd>& pred);
double packed_distance(const Eigen::Ref<const Eigen::VectorXd>& truth,
                       const Eigen::Ref<const Eigen::VectorXd>& pred, DistanceKind kind,
                       OutputKind output);

struct BatchLoss {
  double loss = 0.0;  // mean over the batch
  double classification = 0.0;
  double trajectory = 0.0;
  Eigen::MatrixXd d_modes;   // d loss / d network modes
  Eigen::MatrixXd d_logits;  // d loss / d logits
  std::vector<int> winners;
  std::size_t clamped_probabilities = 0;
};

// Mean loss over the columns of `targets` (2H x B) and its gradient w.r.t.
// the network outputs. Winners are held fixed while differentiating.
BatchLoss mtp_loss_batch(const NetworkOutput& out, const Eigen::MatrixXd& targets,
                         const LossConfig& cfg, double epsilon, OutputKind output);

}  // namespace mbt

#endif  // MBT_LOSS_HPP_
