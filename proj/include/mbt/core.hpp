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

// Domain types, court coordinates, kinematic conversions and feature
// normalization shared by every other module.
//
// Coordinates are in feet with the origin at the upper-left corner of the
// court: x runs along the 94 ft length, y along the 50 ft width.

#ifndef MBT_CORE_HPP_
#define MBT_CORE_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbt {

inline constexpr double kFeetToMeters = 0.3048;
inline constexpr double kRawFrameDt = 0.04;
inline constexpr double kDefaultDt = 0.12;

// Raised when input data is unusable (non-finite values, truncated records).
class DataQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened for reading or writing.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CourtSpec {
  double length_ft = 94.0;
  double width_ft = 50.0;
  double halfcourt_x_ft = 47.0;

  void validate() const;
};

struct Location2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location2D&, const Location2D&) = default;
};

struct Velocity2D {
  double vx = 0.0;
  double vy = 0.0;

  friend bool operator==(const Velocity2D&, const Velocity2D&) = default;
};

inline double distance(const Location2D& a, const Location2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double norm(const Velocity2D& v) { return std::hypot(v.vx, v.vy); }

inline Velocity2D operator-(const Velocity2D& a, const Velocity2D& b) {
  return {a.vx - b.vx, a.vy - b.vy};
}

inline Velocity2D operator+(const Velocity2D& a, const Velocity2D& b) {
  return {a.vx + b.vx, a.vy + b.vy};
}

// Future (or past) locations sampled every `dt` seconds.
struct Trajectory {
  std::vector<Location2D> locations;
  double dt = kDefaultDt;

  std::size_t size() const { return locations.size(); }
  void validate() const;
};

// Per-step velocities, ft/s. velocities[h] moves the player from step h-1 to h.
struct VelocityProfile {
  std::vector<Velocity2D> velocities;
  double dt = kDefaultDt;

  std::size_t size() const { return velocities.size(); }
  void validate() const;
};

enum class FeatureKind { kLocationX, kLocationY, kVelocity, kShotClock };

// What the network emits per mode: velocities (the default) or locations.
enum class OutputKind { kVelocity, kLocation };

const char* to_string(OutputKind kind);
OutputKind output_kind_from_string(const std::string& name);

// Maps raw features into [-1, 1].
struct NormalizationSpec {
  CourtSpec court;
  // Velocity scale. Values beyond +-v_max_fps are clamped.
  double v_max_fps = 40.0;
  double shot_clock_max_s = 24.0;

  void validate() const;
};

// Linear map of a raw value into [-1, 1]. Velocities are clamped; locations
// and shot clock are not (raw data can sit slightly off court).
double normalize(double value, FeatureKind kind, const NormalizationSpec& spec);
double denormalize(double value, FeatureKind kind, const NormalizationSpec& spec);

// velocities[h] = (locations[h] - prev) / dt, with prev = current for h = 0.
VelocityProfile velocities_from_locations(const Location2D& current,
                                          const Trajectory& traj);

// Inverse of velocities_from_locations.
Trajectory locations_from_velocities(const Location2D& current,
                                     const VelocityProfile& vel);

// a[h] = |vel[h] - prev| / dt in ft/s^2, with prev = v0 for h = 0.
std::vector<double> acceleration_profile(const VelocityProfile& vel,
                                         const Velocity2D& v0);

}  // namespace mbt

#endif  // MBT_CORE_HPP_
