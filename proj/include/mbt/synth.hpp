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

// Synthetic half-court possessions with a known generating process.
//
// kFork: the tracked offensive player runs straight towards the basket, then
// at `fork_frame` turns onto one of K headings spread evenly over
// [-turn_deg, +turn_deg], chosen with `fork_probabilities`. The turn is an
// arc at constant speed with centripetal acceleration `turn_accel_fps2`,
// which may not exceed the physical cap `accel_cap_fps2`. The other nine players follow paths that depend only on
// the frame index.
//
// kConstantVelocity: all five offensive players move in straight lines at
// `speed_fps` on random headings.
//
// Every offensive location gets iid N(0, noise_std_ft^2) noise per axis.

#ifndef MBT_SYNTH_HPP_
#define MBT_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mbt/archive.hpp"
#include "mbt/ingest.hpp"

namespace mbt {

enum class SyntheticScenario { kFork, kConstantVelocity };

const char* to_string(SyntheticScenario s);
SyntheticScenario synthetic_scenario_from_string(const std::string& name);

inline constexpr int kSyntheticTrackedId = 1;

struct SyntheticSpec {
  SyntheticScenario scenario = SyntheticScenario::kFork;
  int n_possessions = 2000;
  std::vector<double> fork_probabilities = {0.5, 0.5};
  double speed_fps = 10.0;
  double noise_std_ft = 0.02;
  std::uint64_t seed = 0;
  int frames = 27;
  int fork_frame = 17;  // first frame off the straight stem
  double turn_deg = 60.0;
  double turn_accel_fps2 = 20.0;
  double accel_cap_fps2 = 30.0;
  double dt = kDefaultDt;

  void validate() const;
};

std::vector<Possession> generate_possessions(const SyntheticSpec& spec);
PossessionArchive synthesize(const SyntheticSpec& spec);

// Branch index stored in a fork possession's label, -1 if absent.
int synthetic_branch(const Possession& p);
int synthetic_branch(const std::string& label);

// Noise-free location of the tracked player at time t on branch k, relative
// to the start point.
Location2D fork_offset(const SyntheticSpec& spec, int branch, double t);

}  // namespace mbt

#endif  // MBT_SYNTH_HPP_
