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

// Prediction files and static SVG output: a court diagram per predicted
// sample and a reliability diagram for mode probabilities.
//
// Possession colors: red attackers, blue defenders, orange ball, grey input
// history of the predicted player, green ground truth, yellow predictions.

#ifndef MBT_PLOT_HPP_
#define MBT_PLOT_HPP_

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mbt/core.hpp"
#include "mbt/dataset.hpp"
#include "mbt/eval.hpp"
#include "mbt/model.hpp"

namespace mbt {

inline constexpr int kPredictionFileVersion = 1;

enum class EntityRole { kAttacker, kDefender, kBall };

const char* to_string(EntityRole r);
EntityRole entity_role_from_string(const std::string& name);

struct Entity {
  int id = 0;  // -1 for the ball
  EntityRole role = EntityRole::kAttacker;
  Location2D location;
};

struct PredictionRecord {
  std::size_t sample_id = 0;
  std::string possession_id;
  int anchor_index = 0;
  int player_id = 0;
  Location2D anchor;
  std::vector<Location2D> history;       // oldest first, ends at the anchor
  std::vector<Location2D> ground_truth;  // H steps
  std::array<Entity, 11> entities{};     // 10 players then the ball, at the anchor
  std::vector<double> probabilities;
  std::vector<std::vector<Location2D>> modes;  // M x H locations
};

struct PredictionFile {
  std::string model_id;
  int H = 0;
  int M = 0;
  double dt = kDefaultDt;
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<PredictionRecord> records;
};

PredictionRecord make_prediction_record(std::size_t sample_id, const Sample& s,
                                        const ModePrediction& p, std::string possession_id);

nlohmann::json to_json(const PredictionFile& f);
PredictionFile prediction_file_from_json(const nlohmann::json& j);
void write_prediction_file(const std::filesystem::path& path, const PredictionFile& f);
PredictionFile read_prediction_file(const std::filesystem::path& path);

// Court diagram for one record: exactly M + 2 <path> elements (history,
// ground truth, one per mode) and 11 <circle class="entity"> markers.
std::string possession_svg(const PredictionRecord& r);

std::string calibration_svg(const CalibrationTable& t, const std::string& title);

}  // namespace mbt

#endif  // MBT_PLOT_HPP_
