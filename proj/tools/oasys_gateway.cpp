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

// Mission-control gateway: paces one simulation and serves the operator view.
//
// Flags may also come from the environment: OASYS_BIND, OASYS_HTTP_PORT,
// OASYS_STREAM_PORT, OASYS_SCENARIO, OASYS_SPEED, OASYS_DEBUG_TRUTH, OASYS_STATIC_DIR.

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "oasys/gateway.hpp"
#include "oasys/gateway_server.hpp"
#include "oasys/scenario.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OASYS mission-control gateway"};
    oasys::ServerOptions server;
    oasys::RunnerOptions runner_opts;
    std::string scenario_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> static_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--scenario", scenario_path, "Scenario to attach")->envname("OASYS_SCENARIO")->required()
        ->check(CLI::ExistingFile);
    app.add_option("--bind", server.bind, "Bind address")->envname("OASYS_BIND")->capture_default_str();
    app.add_option("--port", server.http_port, "HTTP port (0 = any)")->envname("OASYS_HTTP_PORT")->capture_default_str();
    app.add_option("--stream-port", server.stream_port, "WebSocket port (0 = any)")
        ->envname("OASYS_STREAM_PORT")
        ->capture_default_str();
    app.add_option("--speed", runner_opts.speed, "Sim seconds per wall second (0 = unpaced)")
        ->envname("OASYS_SPEED")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--paused", runner_opts.start_paused, "Start paused");
    app.add_flag("--debug-truth", runner_opts.debug_truth, "Add ground truth to snapshots (development only)")
        ->envname("OASYS_DEBUG_TRUTH");
    app.add_option("--buffer", runner_opts.feed_capacity, "Per-subscriber stream buffer (documents)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", seed, "Override the scenario seed");
    app.add_option("--out", out_dir, "Write telemetry and summaries here");
    app.add_option("--static", static_dir, "Serve console assets from this directory")->envname("OASYS_STATIC_DIR");
    CLI11_PARSE(app, argc, argv);
    server.static_dir = static_dir;

    try {
        oasys::SimulationOptions sim_opts;
        sim_opts.seed = seed;
        sim_opts.output_dir = out_dir;
        oasys::PacedRunner runner(oasys::load_scenario_file(scenario_path), sim_opts, runner_opts);
        oasys::GatewayServer gateway(runner, server);
        gateway.start();
        runner.start();
        std::cerr << "oasys-gateway: http://" << server.bind << ':' << gateway.http_port() << "  ws://" << server.bind
                  << ':' << gateway.stream_port() << '\n';
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        gateway.stop();
        runner.stop();
        return 0;
    } catch (const oasys::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
