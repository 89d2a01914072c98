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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oasys/engine.hpp"

namespace oasys {

inline constexpr const char* kSaSchema = "oasys.sa/1";

// Parses a command document. Returns the command or a human-readable error.
std::variant<OperatorCommand, std::string> parse_command(const nlohmann::json& doc);
nlohmann::json command_json(const OperatorCommand& cmd);

// One entry of the operator view, built from the knowledge base only.
nlohmann::json known_vehicle_json(const KnownVehicle& v, double now);

struct PacingStatus {
    bool paused = false;
    double speed = 1.0;  // sim seconds per wall second; 0 = as fast as possible
    bool running = false;
};

// Full operator view. Ground truth is added under "truth" only when asked.
nlohmann::json sa_snapshot(const Simulation& sim, const PacingStatus& pacing, bool debug_truth, std::uint64_t seq);

// Mission events the operator is allowed to see (coordinator and dock side).
bool operator_visible(const std::string& event_kind);

// Builds one consolidated update per tick: a delta when the operator view
// changed, a heartbeat otherwise.
class DeltaTracker {
public:
    explicit DeltaTracker(bool debug_truth = false) : debug_truth_(debug_truth) {}

    // Marks the current state as already sent (after a full snapshot).
    void reset(const Simulation& sim);
    nlohmann::json next(const Simulation& sim, std::uint64_t seq);

private:
    bool debug_truth_;
    std::map<std::string, std::string> sent_;  // vehicle id -> serialized report
    std::size_t log_cursor_ = 0;
    std::size_t plans_hash_ = 0;
};

// Bounded per-subscriber queues. A subscriber that falls behind by more than
// its capacity gets an overflow notice and is closed.
class UpdateFeed {
public:
    class Subscription {
    public:
        // Waits up to `timeout` for the next document.
        std::optional<std::string> pop(std::chrono::milliseconds timeout);
        std::optional<std::string> try_pop();
        bool closed() const;
        bool overflowed() const;
        void close();
        std::size_t pending() const;

    private:
        friend class UpdateFeed;
        explicit Subscription(std::size_t capacity) : capacity_(capacity) {}
        void push(std::string doc);

        mutable std::mutex mu_;
        std::condition_variable cv_;
        std::deque<std::string> queue_;
        std::size_t capacity_;
        bool closed_ = false;
        bool overflowed_ = false;
    };

    explicit UpdateFeed(std::size_t capacity = 1024) : capacity_(capacity) {}

    // `first` is queued before any later publish.
    std::shared_ptr<Subscription> subscribe(std::string first);
    void publish(const std::string& doc);
    std::size_t subscribers() const;
    std::size_t capacity() const { return capacity_; }

private:
    mutable std::mutex mu_;
    std::vector<std::weak_ptr<Subscription>> subs_;
    std::size_t capacity_;
};

struct CommandAck {
    std::string command_id;
    CommandStatus status = CommandStatus::Rejected;
    std::string reason;
    bool acoustic = false;
    double sim_time = 0.0;
};
nlohmann::json ack_json(const CommandAck& ack);

struct RunnerOptions {
    bool debug_truth = false;
    double speed = 1.0;
    bool start_paused = false;
    std::size_t feed_capacity = 1024;
    std::chrono::milliseconds idle_heartbeat{1000};  // while paused or finished
};

// Owns the simulation and paces it against the wall clock. Readers see whole
// ticks only; vehicle commands wait in a mailbox drained between ticks.
class PacedRunner {
public:
    PacedRunner(ScenarioConfig config, SimulationOptions sim_options, RunnerOptions options);
    ~PacedRunner();
    PacedRunner(const PacedRunner&) = delete;
    PacedRunner& operator=(const PacedRunner&) = delete;

    void start();  // spawns the pacing thread
    void stop();

    // Without a pacing thread: drains the mailbox, advances up to n ticks.
    void step(std::size_t n = 1);

    nlohmann::json snapshot();
    nlohmann::json health();
    CommandAck submit(const OperatorCommand& cmd);
    std::shared_ptr<UpdateFeed::Subscription> subscribe();

    PacingStatus pacing() const;
    std::size_t subscribers() const { return feed_.subscribers(); }

    // Runs `fn` against the simulation between ticks (tests and tools).
    void inspect(const std::function<void(const Simulation&)>& fn);

private:
    struct Pending {
        OperatorCommand cmd;
        std::promise<CommandAck> done;
    };

    void loop();
    void drain_mailbox_locked();
    void step_locked();
    CommandAck sim_control(const OperatorCommand& cmd);
    PacingStatus pacing_locked() const;

    RunnerOptions options_;
    mutable std::mutex sim_mu_;  // held for a whole tick
    Simulation sim_;
    DeltaTracker tracker_;
    UpdateFeed feed_;
    std::uint64_t seq_ = 0;

    mutable std::mutex ctl_mu_;
    std::condition_variable ctl_cv_;
    std::deque<std::shared_ptr<Pending>> mailbox_;
    std::map<std::string, CommandAck> control_acks_;
    bool paused_ = false;
    double speed_ = 1.0;
    bool stopping_ = false;
    std::thread thread_;
};

}  // namespace oasys
