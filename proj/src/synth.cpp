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

#include "mbt/synth.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mbt {
namespace {

constexpr double kPi = std::numbers::pi;

// Teammate and defender anchor points; everyone drifts on a small circle.
constexpr std::array<Location2D, 4> kTeammateBase = {{{80, 8}, {78, 42}, {68, 15}, {66, 36}}};
constexpr std::array<Location2D, 5> kDefenderBase = {{{82, 25}, {84, 10}, {82, 40}, {72, 17}, {71, 34}}};

Location2D scripted(const Location2D& base, int slot, double t) {
  const double phase = 0.9 * slot;
  const double r = 1.5 + 0.25 * slot;
  const double w = 0.8 + 0.1 * slot;
  return {base.x + r * std::cos(w * t + phase), base.y + r * std::sin(w * t + phase)};
}

double branch_heading(const SyntheticSpec& spec, int branch) {
  const auto K = static_cast<int>(spec.fork_probabilities.size());
  if (K == 1) return 0.0;
  const double turn = spec.turn_deg * kPi / 180.0;
  return -turn + 2.0 * turn * branch / (K - 1);
}

void fill_scripted(Frame& f, int k, const SyntheticSpec& spec, bool teammates) {
  const double t = k * spec.dt;
  if (teammates) {
    for (int i = 0; i < 4; ++i) f.players[static_cast<std::size_t>(1 + i)] = scripted(kTeammateBase[static_cast<std::size_t>(i)], i, t);
  }
  for (int i = 0; i < 5; ++i) f.players[static_cast<std::size_t>(5 + i)] = scripted(kDefenderBase[static_cast<std::size_t>(i)], 4 + i, t);
  f.t = t;
  f.shot_clock_s = 20.0 - t;
}

Possession blank(const SyntheticSpec& spec, int index) {
  Possession p;
  p.game_id = fmt::format("synthetic-{}", spec.seed);
  p.period = 1;
  p.start_game_clock_s = 720.0 - 10.0 * index;
  p.dt = spec.dt;
  p.offense_ids = {kSyntheticTrackedId, 2, 3, 4, 5};
  p.defense_ids = {6, 7, 8, 9, 10};
  p.attacked_basket = Basket::kHighX;
  p.direction_source = "synthetic";
  p.frames.resize(static_cast<std::size_t>(spec.frames));
  return p;
}

}  // namespace

const char* to_string(SyntheticScenario s) {
  return s == SyntheticScenario::kFork ? "fork" : "constant_velocity";
}

SyntheticScenario synthetic_scenario_from_string(const std::string& name) {
  if (name == "fork") return SyntheticScenario::kFork;
  if (name == "constant_velocity") return SyntheticScenario::kConstantVelocity;
  throw std::invalid_argument("unknown synthetic scenario '" + name + "'");
}

void SyntheticSpec::validate() const {
  if (n_possessions < 0) throw std::invalid_argument("n_possessions must be >= 0");
  if (fork_probabilities.empty()) throw std::invalid_argument("fork_probabilities is empty");
  double sum = 0.0;
  for (double p : fork_probabilities) {
    if (!(p >= 0.0)) throw std::invalid_argument("fork probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("fork probabilities must sum to 1");
  if (!(speed_fps > 0.0)) throw std::invalid_argument("speed_fps must be > 0");
  if (!(noise_std_ft >= 0.0)) throw std::invalid_argument("noise_std_ft must be >= 0");
  if (frames < 2) throw std::invalid_argument("frames must be >= 2");
  if (fork_frame < 1 || fork_frame >= frames) throw std::invalid_argument("fork_frame out of range");
  if (!(turn_deg >= 0.0 && turn_deg <= 180.0)) throw std::invalid_argument("turn_deg must be in [0, 180]");
  if (!(accel_cap_fps2 > 0.0)) throw std::invalid_argument("accel_cap_fps2 must be > 0");
  if (!(turn_accel_fps2 > 0.0 && turn_accel_fps2 <= accel_cap_fps2)) {
    throw std::invalid_argument("turn_accel_fps2 must be in (0, accel_cap_fps2]");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

Location2D fork_offset(const SyntheticSpec& spec, int branch, double t) {
  const double s = spec.speed_fps;
  const double t_fork = (spec.fork_frame - 1) * spec.dt;
  if (t <= t_fork) return {s * t, 0.0};
  const double heading = branch_heading(spec, branch);
  const double tau = t - t_fork;
  if (heading == 0.0) return {s * t, 0.0};
  const double omega = spec.turn_accel_fps2 / s;
  const double r = s / omega;
  const double sign = heading > 0.0 ? 1.0 : -1.0;
  const double turn_time = std::abs(heading) / omega;
  const double arc = std::min(tau, turn_time);
  Location2D p{s * t_fork + r * std::sin(omega * arc), sign * r * (1.0 - std::cos(omega * arc))};
  if (tau > turn_time) {
    p.x += s * (tau - turn_time) * std::cos(heading);
    p.y += s * (tau - turn_time) * std::sin(heading);
  }
  return p;
}

std::vector<Possession> generate_possessions(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::discrete_distribution<int> pick(spec.fork_probabilities.begin(), spec.fork_probabilities.end());
  auto jitter = [&](Location2D l) {
    if (spec.noise_std_ft > 0.0) {
      l.x += spec.noise_std_ft * noise(rng);
      l.y += spec.noise_std_ft * noise(rng);
    }
    return l;
  };

  std::vector<Possession> out;
  out.reserve(static_cast<std::size_t>(spec.n_possessions));
  for (int i = 0; i < spec.n_possessions; ++i) {
    Possession p = blank(spec, i);
    if (spec.scenario == SyntheticScenario::kFork) {
      const int branch = pick(rng);
      const Location2D start{52.0 + 6.0 * unit(rng), 20.0 + 10.0 * unit(rng)};
      p.label = fmt::format("branch={}", branch);
      for (int k = 0; k < spec.frames; ++k) {
        Frame& f = p.frames[static_cast<std::size_t>(k)];
        fill_scripted(f, k, spec, true);
        const Location2D off = fork_offset(spec, branch, k * spec.dt);
        f.players[0] = jitter({start.x + off.x, start.y + off.y});
        f.ball = f.players[1];
      }
    } else {
      std::array<Location2D, 5> start;
      std::array<Velocity2D, 5> vel;
      for (int j = 0; j < 5; ++j) {
        start[static_cast<std::size_t>(j)] = {55.0 + 30.0 * unit(rng), 8.0 + 34.0 * unit(rng)};
        const double heading = 2.0 * kPi * unit(rng);
        vel[static_cast<std::size_t>(j)] = {spec.speed_fps * std::cos(heading), spec.speed_fps * std::sin(heading)};
      }
      p.label = "constant_velocity";
      for (int k = 0; k < spec.frames; ++k) {
        Frame& f = p.frames[static_cast<std::size_t>(k)];
        fill_scripted(f, k, spec, false);
        const double t = k * spec.dt;
        for (std::size_t j = 0; j < 5; ++j) {
          f.players[j] = jitter({start[j].x + vel[j].vx * t, start[j].y + vel[j].vy * t});
        }
        f.ball = {f.players[0].x + 1.0, f.players[0].y};
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

PossessionArchive synthesize(const SyntheticSpec& spec) {
  PossessionArchive a;
  a.game_id = fmt::format("synthetic-{}", spec.seed);
  a.possessions = generate_possessions(spec);
  return a;
}

int synthetic_branch(const std::string& label) {
  constexpr std::string_view prefix = "branch=";
  if (label.rfind(prefix, 0) != 0) return -1;
  try {
    return std::stoi(label.substr(prefix.size()));
  } catch (const std::exception&) {
    return -1;
  }
}

int synthetic_branch(const Possession& p) { return synthetic_branch(p.label); }

}  // namespace mbt
