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

#include <vector>

#include "oasys/geometry.hpp"

namespace oasys {

struct CtdPoint {
    double depth = 0.0;         // m
    double temperature = 0.0;   // degC
    double conductivity = 0.0;  // S/m
};

// Piecewise-linear water column, held constant beyond the end points.
struct CtdProfile {
    std::vector<CtdPoint> points{{0.0, 12.0, 3.80}, {50.0, 9.0, 3.60}, {200.0, 7.0, 3.45}};

    CtdPoint at(double depth) const;
    void validate() const;
};

struct CtdSample {
    double time = 0.0;
    double depth = 0.0;
    double temperature = 0.0;
    double conductivity = 0.0;
    Vec2 position_estimate{};
};

}  // namespace oasys
