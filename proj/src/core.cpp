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

#include "mbt/core.hpp"

#include <algorithm>

namespace mbt {
namespace {

bool finite(const Location2D& l) { return std::isfinite(l.x) && std::isfinite(l.y); }
bool finite(const Velocity2D& v) { return std::isfinite(v.vx) && std::isfinite(v.vy); }

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("time step must be positive and finite");
  }
}

}  // namespace

void CourtSpec::validate() const {
  if (!(length_ft > 0.0 && width_ft > 0.0 && halfcourt_x_ft > 0.0)) {
    throw std::invalid_argument("court dimensions must be positive");
  }
  if (std::abs(halfcourt_x_ft - length_ft / 2.0) > 1e-12) {
    throw std::invalid_argument("halfcourt_x_ft must equal length_ft / 2");
  }
}

void Trajectory::validate() const {
  check_dt(dt);
  if (locations.empty()) throw std::invalid_argument("empty trajectory");
}

void VelocityProfile::validate() const {
  check_dt(dt);
  if (velocities.empty()) throw std::invalid_argument("empty velocity profile");
}

const char* to_string(OutputKind kind) {
  return kind == OutputKind::kVelocity ? "velocity" : "location";
}

OutputKind output_kind_from_string(const std::string& name) {
  if (name == "velocity") return OutputKind::kVelocity;
  if (name == "location") return OutputKind::kLocation;
  throw std::invalid_argument("unknown output kind '" + name + "'");
}

void NormalizationSpec::validate() const {
  court.validate();
  if (!(v_max_fps > 0.0)) throw std::invalid_argument("v_max_fps must be positive");
  if (!(shot_clock_max_s > 0.0)) {
    throw std::invalid_argument("shot_clock_max_s must be positive");
  }
}

double normalize(double value, FeatureKind kind, const NormalizationSpec& spec) {
  switch (kind) {
    case FeatureKind::kLocationX:
      return value / (spec.court.length_ft / 2.0) - 1.0;
    case FeatureKind::kLocationY:
      return value / (spec.court.width_ft / 2.0) - 1.0;
    case FeatureKind::kShotClock:
      return value / (spec.shot_clock_max_s / 2.0) - 1.0;
    case FeatureKind::kVelocity:
      return std::clamp(value / spec.v_max_fps, -1.0, 1.0);
  }
  throw std::invalid_argument("unknown feature kind");
}

double denormalize(double value, FeatureKind kind, const NormalizationSpec& spec) {
  switch (kind) {
    case FeatureKind::kLocationX:
      return (value + 1.0) * (spec.court.length_ft / 2.0);
    case FeatureKind::kLocationY:
      return (value + 1.0) * (spec.court.width_ft / 2.0);
    case FeatureKind::kShotClock:
      return (value + 1.0) * (spec.shot_clock_max_s / 2.0);
    case FeatureKind::kVelocity:
      return value * spec.v_max_fps;
  }
  throw std::invalid_argument("unknown feature kind");
}

VelocityProfile velocities_from_locations(const Location2D& current,
                                          const Trajectory& traj) {
  check_dt(traj.dt);
  if (!finite(current)) throw DataQualityError("non-finite current location");
  VelocityProfile out;
  out.dt = traj.dt;
  out.velocities.reserve(traj.size());
  Location2D prev = current;
  for (const auto& loc : traj.locations) {
    if (!finite(loc)) throw DataQualityError("non-finite trajectory location");
    out.velocities.push_back({(loc.x - prev.x) / traj.dt, (loc.y - prev.y) / traj.dt});
    prev = loc;
  }
  return out;
}

Trajectory locations_from_velocities(const Location2D& current,
                                     const VelocityProfile& vel) {
  check_dt(vel.dt);
  if (!finite(current)) throw DataQualityError("non-finite current location");
  Trajectory out;
  out.dt = vel.dt;
  out.locations.reserve(vel.size());
  Location2D pos = current;
  for (const auto& v : vel.velocities) {
    if (!finite(v)) throw DataQualityError("non-finite velocity");
    pos.x += vel.dt * v.vx;
    pos.y += vel.dt * v.vy;
    out.locations.push_back(pos);
  }
  return out;
}

std::vector<double> acceleration_profile(const VelocityProfile& vel,
                                         const Velocity2D& v0) {
  check_dt(vel.dt);
  if (!finite(v0)) throw DataQualityError("non-finite initial velocity");
  std::vector<double> out;
  out.reserve(vel.size());
  Velocity2D prev = v0;
  for (const auto& v : vel.velocities) {
    if (!finite(v)) throw DataQualityError("non-finite velocity");
    out.push_back(norm(v - prev) / vel.dt);
    prev = v;
  }
  return out;
}

}  // namespace mbt
