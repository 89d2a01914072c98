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

// Batch runner: run, validate and replay-hash subcommands.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "oasys/engine.hpp"
#include "oasys/scenario.hpp"
#include "oasys/telemetry.hpp"

int main(int argc, char** argv) {
    CLI::App app{"OASYS multi-vehicle simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<double> decimation;
    std::string out_dir = "out";
    double realtime = 0.0;
    auto* run = app.add_subcommand("run", "Run a scenario and write telemetry, events and summaries");
    run->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--duration", duration, "Override the duration (s)");
    run->add_option("--decimation", decimation, "Telemetry state-row interval (s)");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--realtime", realtime, "Pace at this multiple of wall-clock time (0 = as fast as possible)")
        ->check(CLI::NonNegativeNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario file and print its resolved settings");
    validate->add_option("scenario", validate_path, "Scenario file")->required()->check(CLI::ExistingFile);

    std::string hash_path;
    auto* replay = app.add_subcommand("replay-hash", "Print the SHA-256 digest of a telemetry file");
    replay->add_option("telemetry", hash_path, "telemetry.jsonl")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const oasys::ScenarioConfig c = oasys::load_scenario_file(validate_path);
            std::cout << "ok: " << c.name << " duration=" << c.duration << " s dt=" << c.dt << " s seed=" << c.seed
                      << " mugs=" << c.mugs.size() << " uavs=" << c.uavs.size() << " usv=" << (c.usv ? 1 : 0) << '\n';
            for (const auto& m : c.mugs)
                std::cout << "  mug " << m.id << ": battery " << m.params.battery.capacity << " Wh, target depth "
                          << m.params.target_depth << " m\n";
            return 0;
        }
        if (*replay) {
            std::cout << oasys::telemetry_file_digest(hash_path) << '\n';
            return 0;
        }
        oasys::SimulationOptions opts;
        opts.seed = seed;
        opts.duration = duration;
        opts.decimation = decimation;
        opts.output_dir = out_dir;
        oasys::Simulation sim(oasys::load_scenario_file(scenario_path), opts);
        oasys::RunSummary s;
        if (realtime > 0.0) {
            const auto tick = std::chrono::duration<double>(sim.config().dt / realtime);
            auto next = std::chrono::steady_clock::now();
            while (!sim.finished()) {
                sim.step();
                next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(tick);
                std::this_thread::sleep_until(next);
            }
        }
        s = sim.run();
        std::cout << oasys::summary_json(s) << '\n';
        return s.status == "completed" ? 0 : 2;
    } catch (const oasys::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
