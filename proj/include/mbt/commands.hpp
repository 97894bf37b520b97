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

// Implementations behind the `mbt` command line. Each command reads its
// inputs, writes its artifacts under the requested output location and
// records its effective options in every file it writes.

#ifndef MBT_COMMANDS_HPP_
#define MBT_COMMANDS_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbt/dataset.hpp"
#include "mbt/eval.hpp"
#include "mbt/model.hpp"
#include "mbt/plot.hpp"
#include "mbt/synth.hpp"
#include "mbt/train.hpp"

namespace mbt {

inline constexpr const char* kToolVersion = "0.1.0";

// Failure with a short machine-readable reason code ("io", "data",
// "config", "mismatch", "diverged", "missing").
class CommandError : public std::runtime_error {
 public:
  CommandError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Reason code for any exception escaping a command.
std::string error_code(const std::exception& e);

struct IngestOptions {
  std::filesystem::path raw_dir;
  std::filesystem::path out_dir;
  double min_duration_s = 3.0;
  int downsample = 3;
  bool canonicalize = true;
  // "period:team=low_x" or "period:team=high_x"
  std::vector<std::string> direction_overrides;
};

struct IngestSummary {
  std::size_t games = 0;
  std::size_t possessions = 0;
  nlohmann::json stats;
};

IngestSummary cmd_ingest(const IngestOptions& o, std::ostream* log = nullptr);

struct SynthOptions {
  SyntheticSpec spec;
  std::filesystem::path out_dir;
};

std::filesystem::path cmd_synth(const SynthOptions& o, std::ostream* log = nullptr);

struct BuildDatasetOptions {
  std::filesystem::path archives;  // directory of *.poss files or one file
  std::filesystem::path out;
  int L = 10;
  int H = 10;
  int stride = 1;
  double split_ratio = 0.9;
  std::uint64_t seed = 0;
  int player_id = 0;  // keep only this player of interest; 0 keeps all
};

Dataset cmd_build_dataset(const BuildDatasetOptions& o, std::ostream* log = nullptr);

struct TrainOptions {
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  ModelConfig model;
  TrainConfig train;
  int player_id = 0;
};

TrainResult cmd_train(const TrainOptions& o, std::ostream* log = nullptr);

struct FinetuneOptions {
  std::filesystem::path base_checkpoint;
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  int player_id = 0;
  FinetuneSubset subset = FinetuneSubset::kPlayerOfInterest;
  TrainConfig train = TrainConfig::finetune(4);
};

TrainResult cmd_finetune(const FinetuneOptions& o, std::ostream* log = nullptr);

struct EvaluateOptions {
  std::filesystem::path dataset;
  std::vector<std::filesystem::path> checkpoints;
  std::vector<std::string> baselines = {"CL", "CV"};
  std::string split = "test";
  MseMode mse_mode = MseMode::kChosen;
  RealismModes realism_modes = RealismModes::kAll;
  int player_id = 0;
  std::filesystem::path out_dir;
};

struct EvaluateSummary {
  std::vector<Evaluation> evaluations;
  RealismReport realism;
};

EvaluateSummary cmd_evaluate(const EvaluateOptions& o, std::ostream* log = nullptr);

struct PredictOptions {
  std::filesystem::path dataset;
  std::filesystem::path checkpoint;  // empty with baseline set
  std::string baseline;              // "CL" or "CV" instead of a checkpoint
  std::filesystem::path out;
  std::string split = "test";
  std::size_t limit = 0;  // 0 keeps all samples
  int player_id = 0;
};

PredictionFile cmd_predict(const PredictOptions& o, std::ostream* log = nullptr);

struct PlotOptions {
  std::filesystem::path predictions;
  std::size_t sample_id = 0;
  std::filesystem::path metrics;  // calibration plot from an evaluate report
  std::string model_id;           // which model's calibration to draw
  std::filesystem::path out;
};

void cmd_plot(const PlotOptions& o, std::ostream* log = nullptr);

nlohmann::json to_json(const SyntheticSpec& s);

}  // namespace mbt

#endif  // MBT_COMMANDS_HPP_
