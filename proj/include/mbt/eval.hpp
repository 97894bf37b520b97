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

// Displacement metrics, best-of-M selection, probability calibration and
// acceleration realism. Everything is in physical units: feet, ft/s, ft/s^2.

#ifndef MBT_EVAL_HPP_
#define MBT_EVAL_HPP_

#include <nlohmann/json.hpp>

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/dataset.hpp"
#include "mbt/model.hpp"

namespace mbt {

struct DisplacementError {
  double ade = 0.0;
  double fde = 0.0;
};

DisplacementError ade_fde(const Trajectory& truth, const Trajectory& pred);
double mse_metric(const VelocityProfile& truth, const VelocityProfile& pred);

struct BestOfM {
  int chosen_mode = 0;
  double ade = 0.0;
  double fde = 0.0;
  double mse = 0.0;
};

// Integrates every mode from `anchor`, keeps the one with the smallest final
// displacement error (lowest index on ties) and reports its metrics.
BestOfM best_of_m(const Trajectory& truth_locations, const ModePrediction& prediction,
                  const Location2D& anchor);

// Mean over samples of the smallest per-mode ADE.
double min_ade(std::span<const Sample> samples, std::span<const ModePrediction> predictions);

inline constexpr int kCalibrationBins = 20;

// floor(p / 0.05), with p = 1 folded into the last bin.
int calibration_bin(double probability);

struct CalibrationBin {
  std::size_t count = 0;
  std::size_t wins = 0;
  double probability_sum = 0.0;

  double mean_predicted() const { return probability_sum / static_cast<double>(count); }
  double frequency() const { return static_cast<double>(wins) / static_cast<double>(count); }
};

struct CalibrationTable {
  std::array<CalibrationBin, kCalibrationBins> bins{};

  // Bins every mode of one sample; `winner` is the best-of-M mode.
  void add(std::span<const double> probs, int winner);
  void merge(const CalibrationTable& other);
  std::size_t total() const;
  // Largest |mean predicted - frequency| over populated bins.
  double max_gap() const;
};

CalibrationTable calibration(std::span<const Sample> samples,
                             std::span<const ModePrediction> predictions);

// Which predicted modes feed the acceleration statistics.
enum class RealismModes { kAll, kChosen, kMostProbable };

const char* to_string(RealismModes m);
RealismModes realism_modes_from_string(const std::string& name);

inline constexpr std::array<double, 5> kRealismPercentiles = {50.0, 90.0, 99.0, 99.9, 100.0};

// Linear interpolation between closest ranks; q in [0, 100].
double percentile(std::vector<double> values, double q);

struct AccelerationSummary {
  std::string source;
  std::size_t count = 0;
  double max_fps2 = 0.0;
  std::vector<double> percentiles_fps2;  // aligned with kRealismPercentiles
};

AccelerationSummary summarize_accelerations(std::string source, std::vector<double> values);

// Per-step accelerations; the first step is taken against the last observed
// velocity of the sample.
std::vector<double> truth_accelerations(std::span<const Sample> samples);
std::vector<double> predicted_accelerations(std::span<const Sample> samples,
                                            std::span<const ModePrediction> predictions,
                                            RealismModes modes);

struct RealismReport {
  AccelerationSummary ground_truth;
  std::vector<AccelerationSummary> models;
};

// Which mode the reported MSE is taken from for multi-modal predictors.
enum class MseMode { kChosen, kMostProbable };

const char* to_string(MseMode m);
MseMode mse_mode_from_string(const std::string& name);

struct MetricsReport {
  std::string model_id;
  int H = 0;
  int M = 0;
  std::size_t sample_count = 0;
  double ade_ft = 0.0;
  double fde_ft = 0.0;
  double mse_ft2s2 = 0.0;
  MseMode mse_mode = MseMode::kChosen;
  std::vector<double> per_horizon_error_ft;  // mean location error at step h
};

struct EvaluationOptions {
  MseMode mse_mode = MseMode::kChosen;
  RealismModes realism_modes = RealismModes::kAll;
};

struct Evaluation {
  MetricsReport metrics;
  CalibrationTable calibration;
  AccelerationSummary accelerations;
  std::vector<int> chosen_modes;
};

Evaluation evaluate(const std::string& model_id, std::span<const Sample> samples,
                    std::span<const ModePrediction> predictions,
                    const EvaluationOptions& options = {});
Evaluation evaluate(const Predictor& predictor, std::span<const Sample> samples,
                    const EvaluationOptions& options = {});

nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const CalibrationTable& t);
CalibrationTable calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AccelerationSummary& s);
nlohmann::json to_json(const RealismReport& r);

std::string format_metrics_table(std::span<const MetricsReport> reports);
std::string format_calibration_table(const CalibrationTable& t);
std::string format_realism_table(const RealismReport& r);

}  // namespace mbt

#endif  // MBT_EVAL_HPP_
