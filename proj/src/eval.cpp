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

#include "mbt/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbt {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument(fmt::format("lengths differ: {} vs {}", a, b));
  if (a == 0) throw std::invalid_argument("empty trajectory");
}

void require_aligned(std::span<const Sample> samples, std::span<const ModePrediction> preds) {
  if (samples.size() != preds.size()) {
    throw std::invalid_argument("one prediction per sample is required");
  }
}

}  // namespace

DisplacementError ade_fde(const Trajectory& truth, const Trajectory& pred) {
  require_same_length(truth.size(), pred.size());
  double sum = 0.0;
  double last = 0.0;
  for (std::size_t h = 0; h < truth.size(); ++h) {
    last = distance(truth.locations[h], pred.locations[h]);
    sum += last;
  }
  return {sum / static_cast<double>(truth.size()), last};
}

double mse_metric(const VelocityProfile& truth, const VelocityProfile& pred) {
  require_same_length(truth.size(), pred.size());
  double sum = 0.0;
  for (std::size_t h = 0; h < truth.size(); ++h) {
    const Velocity2D e = truth.velocities[h] - pred.velocities[h];
    sum += e.vx * e.vx + e.vy * e.vy;
  }
  return sum / (2.0 * static_cast<double>(truth.size()));
}

BestOfM best_of_m(const Trajectory& truth_locations, const ModePrediction& prediction,
                  const Location2D& anchor) {
  if (prediction.M() < 1) throw std::invalid_argument("prediction has no modes");
  BestOfM best;
  double best_fde = std::numeric_limits<double>::infinity();
  for (int m = 0; m < prediction.M(); ++m) {
    Trajectory traj = locations_from_velocities(anchor, prediction.modes[static_cast<std::size_t>(m)]);
    const DisplacementError e = ade_fde(truth_locations, traj);
    if (e.fde < best_fde) {
      best_fde = e.fde;
      best.chosen_mode = m;
      best.ade = e.ade;
      best.fde = e.fde;
    }
  }
  const VelocityProfile truth_vel = velocities_from_locations(anchor, truth_locations);
  best.mse = mse_metric(truth_vel, prediction.modes[static_cast<std::size_t>(best.chosen_mode)]);
  return best;
}

double min_ade(std::span<const Sample> samples, std::span<const ModePrediction> predictions) {
  require_aligned(samples, predictions);
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mode : predictions[i].modes) {
      const Trajectory traj = locations_from_velocities(samples[i].anchor_location, mode);
      best = std::min(best, ade_fde(samples[i].target_locations, traj).ade);
    }
    sum += best;
  }
  return sum / static_cast<double>(samples.size());
}

int calibration_bin(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw std::invalid_argument("probability outside [0, 1]");
  }
  return std::min(kCalibrationBins - 1, static_cast<int>(std::floor(probability * kCalibrationBins)));
}

void CalibrationTable::add(std::span<const double> probs, int winner) {
  for (std::size_t m = 0; m < probs.size(); ++m) {
    CalibrationBin& b = bins[static_cast<std::size_t>(calibration_bin(probs[m]))];
    ++b.count;
    b.probability_sum += probs[m];
    if (static_cast<int>(m) == winner) ++b.wins;
  }
}

void CalibrationTable::merge(const CalibrationTable& other) {
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].count += other.bins[k].count;
    bins[k].wins += other.bins[k].wins;
    bins[k].probability_sum += other.bins[k].probability_sum;
  }
}

std::size_t CalibrationTable::total() const {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.count;
  return n;
}

double CalibrationTable::max_gap() const {
  double gap = 0.0;
  for (const auto& b : bins) {
    if (b.count > 0) gap = std::max(gap, std::abs(b.mean_predicted() - b.frequency()));
  }
  return gap;
}

CalibrationTable calibration(std::span<const Sample> samples,
                             std::span<const ModePrediction> predictions) {
  require_aligned(samples, predictions);
  CalibrationTable t;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (predictions[i].M() < 2) throw std::invalid_argument("calibration needs M >= 2");
    const BestOfM b = best_of_m(samples[i].target_locations, predictions[i], samples[i].anchor_location);
    t.add(predictions[i].probs, b.chosen_mode);
  }
  return t;
}

const char* to_string(RealismModes m) {
  switch (m) {
    case RealismModes::kAll: return "all";
    case RealismModes::kChosen: return "chosen";
    case RealismModes::kMostProbable: return "most_probable";
  }
  return "?";
}

RealismModes realism_modes_from_string(const std::string& name) {
  if (name == "all") return RealismModes::kAll;
  if (name == "chosen") return RealismModes::kChosen;
  if (name == "most_probable") return RealismModes::kMostProbable;
  throw std::invalid_argument("unknown realism mode selection '" + name + "'");
}

namespace {

double sorted_percentile(const std::vector<double>& values, double q) {
  const double rank = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile outside [0, 100]");
  std::sort(values.begin(), values.end());
  return sorted_percentile(values, q);
}

AccelerationSummary summarize_accelerations(std::string source, std::vector<double> values) {
  AccelerationSummary s;
  s.source = std::move(source);
  s.count = values.size();
  s.percentiles_fps2.assign(kRealismPercentiles.size(), 0.0);
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.max_fps2 = values.back();
  for (std::size_t k = 0; k < kRealismPercentiles.size(); ++k) {
    s.percentiles_fps2[k] = sorted_percentile(values, kRealismPercentiles[k]);
  }
  return s;
}

std::vector<double> truth_accelerations(std::span<const Sample> samples) {
  std::vector<double> out;
  for (const auto& s : samples) {
    const auto a = acceleration_profile(s.target, s.last_observed_velocity());
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

std::vector<double> predicted_accelerations(std::span<const Sample> samples,
                                            std::span<const ModePrediction> predictions,
                                            RealismModes modes) {
  require_aligned(samples, predictions);
  std::vector<double> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Velocity2D v0 = samples[i].last_observed_velocity();
    const ModePrediction& p = predictions[i];
    auto take = [&](int m) {
      const auto a = acceleration_profile(p.modes[static_cast<std::size_t>(m)], v0);
      out.insert(out.end(), a.begin(), a.end());
    };
    switch (modes) {
      case RealismModes::kAll:
        for (int m = 0; m < p.M(); ++m) take(m);
        break;
      case RealismModes::kChosen:
        take(best_of_m(samples[i].target_locations, p, samples[i].anchor_location).chosen_mode);
        break;
      case RealismModes::kMostProbable:
        take(p.most_probable());
        break;
    }
  }
  return out;
}

const char* to_string(MseMode m) { return m == MseMode::kChosen ? "chosen" : "most_probable"; }

MseMode mse_mode_from_string(const std::string& name) {
  if (name == "chosen") return MseMode::kChosen;
  if (name == "most_probable") return MseMode::kMostProbable;
  throw std::invalid_argument("unknown mse mode '" + name + "'");
}

Evaluation evaluate(const std::string& model_id, std::span<const Sample> samples,
                    std::span<const ModePrediction> predictions, const EvaluationOptions& options) {
  require_aligned(samples, predictions);
  Evaluation ev;
  MetricsReport& r = ev.metrics;
  r.model_id = model_id;
  r.mse_mode = options.mse_mode;
  r.sample_count = samples.size();
  if (samples.empty()) {
    ev.accelerations = summarize_accelerations(model_id, {});
    return ev;
  }
  r.H = samples.front().horizon();
  r.M = predictions.front().M();
  r.per_horizon_error_ft.assign(static_cast<std::size_t>(r.H), 0.0);
  ev.chosen_modes.reserve(samples.size());

  double ade = 0.0, fde = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const ModePrediction& p = predictions[i];
    if (s.horizon() != r.H || p.M() != r.M) {
      throw std::invalid_argument("samples and predictions must share H and M");
    }
    const BestOfM b = best_of_m(s.target_locations, p, s.anchor_location);
    ev.chosen_modes.push_back(b.chosen_mode);
    ade += b.ade;
    fde += b.fde;
    if (options.mse_mode == MseMode::kChosen) {
      mse += b.mse;
    } else {
      mse += mse_metric(s.target, p.modes[static_cast<std::size_t>(p.most_probable())]);
    }
    const Trajectory chosen =
        locations_from_velocities(s.anchor_location, p.modes[static_cast<std::size_t>(b.chosen_mode)]);
    for (int h = 0; h < r.H; ++h) {
      const auto k = static_cast<std::size_t>(h);
      r.per_horizon_error_ft[k] += distance(s.target_locations.locations[k], chosen.locations[k]);
    }
    if (r.M >= 2) ev.calibration.add(p.probs, b.chosen_mode);
  }
  const auto n = static_cast<double>(samples.size());
  r.ade_ft = ade / n;
  r.fde_ft = fde / n;
  r.mse_ft2s2 = mse / n;
  for (double& e : r.per_horizon_error_ft) e /= n;
  ev.accelerations = summarize_accelerations(
      model_id, predicted_accelerations(samples, predictions, options.realism_modes));
  return ev;
}

Evaluation evaluate(const Predictor& predictor, std::span<const Sample> samples,
                    const EvaluationOptions& options) {
  const auto preds = predictor.predict(samples);
  return evaluate(predictor.id(), samples, preds, options);
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"model_id", r.model_id},
          {"H", r.H},
          {"M", r.M},
          {"sample_count", r.sample_count},
          {"ade_ft", r.ade_ft},
          {"fde_ft", r.fde_ft},
          {"mse_ft2s2", r.mse_ft2s2},
          {"mse_mode", to_string(r.mse_mode)},
          {"per_horizon_error_ft", r.per_horizon_error_ft}};
}

nlohmann::json to_json(const CalibrationTable& t) {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t k = 0; k < t.bins.size(); ++k) {
    const auto& b = t.bins[k];
    nlohmann::json j = {{"lower", static_cast<double>(k) / kCalibrationBins},
                        {"upper", static_cast<double>(k + 1) / kCalibrationBins},
                        {"count", b.count},
                        {"wins", b.wins},
                        {"probability_sum", b.probability_sum}};
    if (b.count > 0) {
      j["mean_predicted"] = b.mean_predicted();
      j["frequency"] = b.frequency();
    }
    bins.push_back(std::move(j));
  }
  return {{"bins", bins}, {"total", t.total()}};
}

CalibrationTable calibration_from_json(const nlohmann::json& j) {
  CalibrationTable t;
  const auto& bins = j.at("bins");
  if (bins.size() != t.bins.size()) throw DataQualityError("calibration table needs 20 bins");
  for (std::size_t k = 0; k < t.bins.size(); ++k) {
    t.bins[k].count = bins[k].at("count").get<std::size_t>();
    t.bins[k].wins = bins[k].at("wins").get<std::size_t>();
    t.bins[k].probability_sum = bins[k].at("probability_sum").get<double>();
  }
  return t;
}

nlohmann::json to_json(const AccelerationSummary& s) {
  nlohmann::json pct = nlohmann::json::array();
  for (std::size_t k = 0; k < s.percentiles_fps2.size(); ++k) {
    pct.push_back({{"percentile", kRealismPercentiles[k]},
                   {"fps2", s.percentiles_fps2[k]},
                   {"mps2", s.percentiles_fps2[k] * kFeetToMeters}});
  }
  return {{"source", s.source},
          {"count", s.count},
          {"max_fps2", s.max_fps2},
          {"max_mps2", s.max_fps2 * kFeetToMeters},
          {"percentiles", pct}};
}

nlohmann::json to_json(const RealismReport& r) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : r.models) models.push_back(to_json(m));
  return {{"ground_truth", to_json(r.ground_truth)}, {"models", models}};
}

std::string format_metrics_table(std::span<const MetricsReport> reports) {
  std::string out = fmt::format("{:<16} {:>4} {:>3} {:>9} {:>9} {:>9} {:>11}\n", "model", "H", "M",
                                "samples", "ADE ft", "FDE ft", "MSE ft2/s2");
  for (const auto& r : reports) {
    out += fmt::format("{:<16} {:>4} {:>3} {:>9} {:>9.3f} {:>9.3f} {:>11.3f}\n", r.model_id, r.H, r.M,
                       r.sample_count, r.ade_ft, r.fde_ft, r.mse_ft2s2);
  }
  return out;
}

std::string format_calibration_table(const CalibrationTable& t) {
  std::string out = fmt::format("{:<12} {:>8} {:>10} {:>10}\n", "bin", "count", "predicted", "empirical");
  for (std::size_t k = 0; k < t.bins.size(); ++k) {
    const auto& b = t.bins[k];
    const std::string label = fmt::format("[{:.2f},{:.2f})", 0.05 * static_cast<double>(k),
                                          0.05 * static_cast<double>(k + 1));
    if (b.count == 0) {
      out += fmt::format("{:<12} {:>8} {:>10} {:>10}\n", label, 0, "-", "-");
    } else {
      out += fmt::format("{:<12} {:>8} {:>10.4f} {:>10.4f}\n", label, b.count, b.mean_predicted(),
                         b.frequency());
    }
  }
  return out;
}

std::string format_realism_table(const RealismReport& r) {
  std::string out = fmt::format("{:<16} {:>9}", "source", "steps");
  for (double q : kRealismPercentiles) out += fmt::format(" {:>10}", fmt::format("p{}", q));
  out += "   (ft/s^2; m/s^2 in parentheses)\n";
  auto row = [&](const AccelerationSummary& s) {
    out += fmt::format("{:<16} {:>9}", s.source, s.count);
    for (double v : s.percentiles_fps2) out += fmt::format(" {:>10.2f}", v);
    out += fmt::format("   (max {:.2f})\n", s.max_fps2 * kFeetToMeters);
  };
  row(r.ground_truth);
  for (const auto& m : r.models) row(m);
  return out;
}

}  // namespace mbt
