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

#include "oasys/navigation.hpp"

#include <stdexcept>

namespace oasys {

NavEstimate dead_reckon_update(const NavEstimate& nav, double drift_rate, double dt) {
    if (dt < 0.0) throw std::invalid_argument("dead_reckon_update: negative dt");
    NavEstimate out = nav;
    out.sigma += drift_rate * dt;
    return out;
}

NavEstimate gps_fix(const Vec2& truth, double gps_noise, std::mt19937_64& rng) {
    NavEstimate out;
    out.sigma = gps_noise;
    if (gps_noise <= 0.0) {
        out.position = truth;
        return out;
    }
    std::normal_distribution<double> noise(0.0, gps_noise);
    const double de = noise(rng);
    const double dn = noise(rng);
    out.position = {truth.east + de, truth.north + dn};
    return out;
}

}  // namespace oasys
