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

// Supervised samples built from possessions, train/test splits and batching.
//
// Per-step feature layout (version 1, width 23), all normalized to [-1, 1]:
//   [0, 2)   player of interest x, y
//   [2, 10)  4 teammates x, y, nearest to the player of interest first
//   [10, 20) 5 opponents x, y, nearest first
//   [20, 22) ball x, y
//   [22]     shot clock
// Neighbour order is fixed at the anchor step for the whole window; ties go
// to the lower player id.

#ifndef MBT_DATASET_HPP_
#define MBT_DATASET_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/ingest.hpp"

namespace mbt {

struct FeatureLayout {
  static constexpr int kVersion = 1;
  static constexpr int kWidth = 23;
  int version = kVersion;
  int width = kWidth;
  int sequence_length = 11;  // L + 1
};

struct Sample {
  std::uint32_t possession_index = 0;
  int anchor_index = 0;
  int player_of_interest_id = 0;
  std::array<int, 10> ordered_ids{};  // self, 4 teammates, 5 opponents
  std::vector<Location2D> history_self;  // L + 1 steps, oldest first
  std::array<std::vector<Location2D>, 9> history_others;
  std::vector<Location2D> history_ball;
  std::vector<double> shot_clock_history;
  double shot_clock_s = 24.0;  // at the anchor step
  Location2D anchor_location;
  VelocityProfile target;       // ft/s
  Trajectory target_locations;  // ft

  int history_steps() const { return static_cast<int>(history_self.size()); }
  int horizon() const { return static_cast<int>(target.size()); }
  // (l_t - l_{t-1}) / dt for the player of interest.
  Velocity2D last_observed_velocity() const;
};

struct SampleConfig {
  int L = 10;
  int H = 10;
  int stride = 1;
};

// One sample per valid anchor step and per offensive player. Anchors run
// from L to frames - H - 1. Possessions that are too short yield nothing.
std::vector<Sample> build_samples(const Possession& p, const SampleConfig& cfg,
                                  std::uint32_t possession_index = 0);

struct PossessionInfo {
  std::string id;     // "<game>#<index>"
  std::string label;  // archive label, may be empty
  std::array<int, 10> player_ids{};
};

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> test;
  std::uint64_t seed = 0;
};

// Indices of the possessions that go to each side. Train receives
// round(n * ratio) of a seeded permutation; both lists come back sorted.
struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
IndexSplit split_indices(std::size_t n, double ratio, std::uint64_t seed);

DatasetSplit split_possessions(const std::vector<Possession>& possessions, double ratio,
                               std::uint64_t seed, const SampleConfig& cfg);

std::vector<Sample> filter_by_player(std::span<const Sample> samples, int player_id);
// Samples from any possession the player took part in, on either side.
std::vector<Sample> filter_by_possession_player(std::span<const Sample> samples,
                                                int player_id);

struct Batch {
  std::vector<Eigen::MatrixXd> inputs;  // sequence_length matrices, 23 x B
  Eigen::MatrixXd targets;              // 2H x B, normalized
  std::vector<std::size_t> indices;     // positions in the source span

  Eigen::Index size() const { return targets.cols(); }
};

struct BatchStats {
  std::size_t clamped_velocities = 0;
};

struct BatchOptions {
  int batch_size = 1024;
  std::uint64_t seed = 0;
  int epoch = 0;
  bool shuffle = true;
  OutputKind target_kind = OutputKind::kVelocity;
};

// Normalized network inputs for the given samples.
std::vector<Eigen::MatrixXd> encode_features(std::span<const Sample> samples,
                                             std::span<const std::size_t> indices,
                                             const NormalizationSpec& norm);

Batch make_batch(std::span<const Sample> samples, std::span<const std::size_t> indices,
                 const NormalizationSpec& norm, OutputKind target_kind,
                 BatchStats* stats = nullptr);

// Sample order for one epoch; a pure function of (n, seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch);

// Final short batch is kept.
std::vector<Batch> make_batches(std::span<const Sample> samples,
                                const NormalizationSpec& norm, const BatchOptions& options,
                                BatchStats* stats = nullptr);

struct DatasetHeader {
  int L = 10;
  int H = 10;
  int stride = 1;
  double dt = kDefaultDt;
  FeatureLayout layout;
  NormalizationSpec norm;
  std::uint64_t seed = 0;
  double split_ratio = 0.9;
};

struct Dataset {
  DatasetHeader header;
  std::vector<PossessionInfo> possessions;
  DatasetSplit split;
};

// Builds samples for every possession and splits them at possession level.
Dataset build_dataset(const std::vector<Possession>& possessions, const SampleConfig& cfg,
                      double ratio, std::uint64_t seed, const NormalizationSpec& norm = {});

inline constexpr std::uint32_t kDatasetVersion = 1;
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace mbt

#endif  // MBT_DATASET_HPP_
