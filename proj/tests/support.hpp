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

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "oasys/engine.hpp"
#include "oasys/scenario.hpp"

namespace oasys::testing {

// Seeded value source for property tests. Each case gets its own seed so a
// failure names the exact case to replay.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    template <class T, std::size_t N>
    T pick(const T (&items)[N]) {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(N) - 1))];
    }
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline std::uint64_t case_seed(std::uint64_t base, int i) { return base * 1000003ULL + static_cast<std::uint64_t>(i); }

inline std::string scenario_path(const std::string& name) { return std::string(OASYS_SCENARIO_DIR) + "/" + name; }

inline ScenarioConfig load_fixture(const std::string& name) { return load_scenario_file(scenario_path(name)); }

}  // namespace oasys::testing
