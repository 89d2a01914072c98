/*
 * Copyright 2026 The OASYS Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <random>

#include "oasys/geometry.hpp"

namespace oasys {

// Horizontal position estimate with a radial uncertainty proxy.
struct NavEstimate {
    Vec2 position{};
    double sigma = 0.0;  // m
};

// Submerged update: no odometry, so only the uncertainty grows.
NavEstimate dead_reckon_update(const NavEstimate& nav, double drift_rate, double dt);

// Surface GPS fix: truth plus gaussian noise of `gps_noise` metres per axis.
// Draws exactly two normals from `rng` (east, then north).
NavEstimate gps_fix(const Vec2& truth, double gps_noise, std::mt19937_64& rng);

}  // namespace oasys
