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

#include "oasys/ctd.hpp"

#include <algorithm>
#include <stdexcept>

namespace oasys {

CtdPoint CtdProfile::at(double depth) const {
    if (points.empty()) return {depth, 0.0, 0.0};
    if (depth <= points.front().depth) return {depth, points.front().temperature, points.front().conductivity};
    if (depth >= points.back().depth) return {depth, points.back().temperature, points.back().conductivity};
    auto hi = std::upper_bound(points.begin(), points.end(), depth,
                               [](double d, const CtdPoint& p) { return d < p.depth; });
    auto lo = std::prev(hi);
    const double s = (depth - lo->depth) / (hi->depth - lo->depth);
    return {depth, lo->temperature + s * (hi->temperature - lo->temperature),
            lo->conductivity + s * (hi->conductivity - lo->conductivity)};
}

void CtdProfile::validate() const {
    if (points.empty()) throw std::invalid_argument("ctd profile needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].depth > points[i - 1].depth))
            throw std::invalid_argument("ctd profile depths must be strictly increasing");
}

}  // namespace oasys
