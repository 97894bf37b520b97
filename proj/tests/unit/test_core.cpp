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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mbt/core.hpp"

namespace mbt {
namespace {

TEST(Velocities, StationaryPlayerHasZeroVelocity) {
  Trajectory t{{{10, 10}, {10, 10}, {10, 10}}, 0.12};
  auto v = velocities_from_locations({10, 10}, t);
  for (const auto& x : v.velocities) EXPECT_EQ(x, (Velocity2D{0, 0}));
}

TEST(Velocities, DividesStepsByDt) {
  auto v = velocities_from_locations({0, 0}, Trajectory{{{0.6, 0}, {1.2, 0}}, 0.12});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v.velocities[0].vx, 5.0, 1e-12);
  EXPECT_NEAR(v.velocities[1].vx, 5.0, 1e-12);
  EXPECT_EQ(v.velocities[1].vy, 0.0);
}

TEST(Velocities, IntegrationInvertsDifferencing) {
  auto t = locations_from_velocities({0, 0}, VelocityProfile{{{5, 0}, {5, 0}}, 0.12});
  EXPECT_NEAR(t.locations[0].x, 0.6, 1e-12);
  EXPECT_NEAR(t.locations[1].x, 1.2, 1e-12);

  auto one = locations_from_velocities({1, 1}, VelocityProfile{{{10, -10}}, 0.12});
  EXPECT_NEAR(one.locations[0].x, 2.2, 1e-12);
  EXPECT_NEAR(one.locations[0].y, -0.2, 1e-12);

  auto still = locations_from_velocities({5, 5}, VelocityProfile{{{0, 0}}, 0.12});
  EXPECT_EQ(still.locations[0], (Location2D{5, 5}));
}

TEST(Velocities, RoundTrip) {
  Trajectory t{{{1.5, 2.0}, {2.25, 1.0}, {-3.0, 4.0}}, 0.12};
  auto back = locations_from_velocities({0.5, 0.5}, velocities_from_locations({0.5, 0.5}, t));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(back.locations[i].x, t.locations[i].x, 1e-9);
    EXPECT_NEAR(back.locations[i].y, t.locations[i].y, 1e-9);
  }
}

TEST(Velocities, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(velocities_from_locations({0, 0}, Trajectory{{{nan, 0}}, 0.12}), DataQualityError);
  EXPECT_THROW(velocities_from_locations({nan, 0}, Trajectory{{{0, 0}}, 0.12}), DataQualityError);
  EXPECT_THROW(locations_from_velocities({0, 0}, VelocityProfile{{{0, INFINITY}}, 0.12}),
               DataQualityError);
}

TEST(Acceleration, ConstantVelocityIsZero) {
  auto a = acceleration_profile(VelocityProfile{{{3, 4}, {3, 4}, {3, 4}}, 0.12}, {3, 4});
  for (double x : a) EXPECT_EQ(x, 0.0);
}

TEST(Acceleration, HandValue) {
  auto a = acceleration_profile(VelocityProfile{{{1.2, 0}}, 0.12}, {0, 0});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0], 10.0, 1e-12);
  EXPECT_NEAR(a[0] * kFeetToMeters, 3.048, 1e-12);
}

TEST(Normalize, CourtAndShotClock) {
  NormalizationSpec n;
  EXPECT_DOUBLE_EQ(normalize(47, FeatureKind::kLocationX, n), 0.0);
  EXPECT_DOUBLE_EQ(normalize(0, FeatureKind::kLocationX, n), -1.0);
  EXPECT_DOUBLE_EQ(normalize(94, FeatureKind::kLocationX, n), 1.0);
  EXPECT_DOUBLE_EQ(normalize(24, FeatureKind::kShotClock, n), 1.0);
  EXPECT_DOUBLE_EQ(normalize(12, FeatureKind::kShotClock, n), 0.0);
  EXPECT_DOUBLE_EQ(normalize(25, FeatureKind::kLocationY, n), 0.0);
}

TEST(Normalize, VelocityIsClamped) {
  NormalizationSpec n;
  EXPECT_DOUBLE_EQ(normalize(2 * n.v_max_fps, FeatureKind::kVelocity, n), 1.0);
  EXPECT_DOUBLE_EQ(normalize(-2 * n.v_max_fps, FeatureKind::kVelocity, n), -1.0);
}

TEST(Normalize, DenormalizeInverts) {
  NormalizationSpec n;
  for (double x : {-3.0, 0.0, 12.5, 47.0, 93.9}) {
    EXPECT_NEAR(denormalize(normalize(x, FeatureKind::kLocationX, n), FeatureKind::kLocationX, n), x,
                1e-12);
  }
  EXPECT_NEAR(denormalize(normalize(13.0, FeatureKind::kVelocity, n), FeatureKind::kVelocity, n), 13.0,
              1e-12);
}

TEST(OutputKindNames, RoundTrip) {
  for (auto k : {OutputKind::kVelocity, OutputKind::kLocation}) {
    EXPECT_EQ(output_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(output_kind_from_string("acceleration"), std::invalid_argument);
}

}  // namespace
}  // namespace mbt
