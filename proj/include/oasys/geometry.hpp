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

#include <cmath>

namespace oasys {

// Local tangent plane, metres east/north of the scenario origin.
struct Vec2 {
    double east = 0.0;
    double north = 0.0;

    Vec2 operator+(const Vec2& o) const { return {east + o.east, north + o.north}; }
    Vec2 operator-(const Vec2& o) const { return {east - o.east, north - o.north}; }
    Vec2 operator*(double s) const { return {east * s, north * s}; }
    Vec2& operator+=(const Vec2& o) {
        east += o.east;
        north += o.north;
        return *this;
    }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(east, north); }
};

// Position with vertical component positive up (altitude above the sea surface,
// negative below it).
struct Vec3 {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    bool operator==(const Vec3&) const = default;
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline double distance(const Vec3& a, const Vec3& b) {
    const double de = a.east - b.east;
    const double dn = a.north - b.north;
    const double du = a.up - b.up;
    return std::sqrt(de * de + dn * dn + du * du);
}

// Moves from `from` toward `to` by at most `step` metres.
inline Vec2 move_toward(const Vec2& from, const Vec2& to, double step) {
    const Vec2 d = to - from;
    const double len = d.norm();
    if (len <= step || len == 0.0) return to;
    return from + d * (step / len);
}

}  // namespace oasys
