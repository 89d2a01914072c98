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

#include "oasys/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oasys {

using nlohmann::json;

namespace {

constexpr std::size_t kRecentEvents = 50;

json point_json(const Vec2& p) { return json{{"east", p.east}, {"north", p.north}}; }

std::optional<Vec2> parse_point(const json& j) {
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Vec2{j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.size() == 2 && j.contains("east") && j.contains("north") && j["east"].is_number() &&
        j["north"].is_number())
        return Vec2{j["east"].get<double>(), j["north"].get<double>()};
    return std::nullopt;
}

bool finite(const Vec2& p) { return std::isfinite(p.east) && std::isfinite(p.north); }

json plan_json(const SortiePlan& p) {
    json legs = json::array();
    for (const Vec2& l : p.legs) legs.push_back(point_json(l));
    json j{{"plan_id", p.plan_id},          {"uav", p.uav_id},
           {"objective", to_string(p.objective)}, {"station", point_json(p.station)},
           {"legs", legs},                  {"energy_wh", p.energy_estimate},
           {"reserve_wh", p.reserve_wh()},  {"launch_time", p.launch_time},
           {"duration_s", p.duration_estimate}};
    if (!p.mug_id.empty()) j["mug"] = p.mug_id;
    if (p.objective == SortieObjective::Relay) j["relay_duration_s"] = p.relay_duration;
    return j;
}

json plans_json(const Simulation& sim) {
    json out = json::array();
    for (const SortiePlan& p : sim.active_plans()) out.push_back(plan_json(p));
    return out;
}

std::string_view location_name(MugLocation::Kind k) {
    switch (k) {
        case MugLocation::Kind::Water: return "water";
        case MugLocation::Kind::Bay: return "bay";
        case MugLocation::Kind::Carried: return "carried";
    }
    return "unknown";
}

json truth_json(const WorldState& w) {
    json t = json::object();
    json mugs = json::array();
    for (const auto& [id, m] : w.mugs) {
        json j{{"id", id},
               {"position", point_json(m.kin.position)},
               {"depth", m.kin.depth},
               {"mode", to_string(m.mode)},
               {"battery_wh", m.battery.charge},
               {"location", location_name(w.mug_location.at(id).kind)}};
        mugs.push_back(j);
    }
    json uavs = json::array();
    for (const auto& [id, u] : w.uavs)
        uavs.push_back({{"id", id},
                        {"position", point_json(u.position)},
                        {"altitude", u.altitude},
                        {"mode", to_string(u.mode)},
                        {"battery_wh", u.battery.charge}});
    t["mugs"] = mugs;
    t["uavs"] = uavs;
    if (w.usv) t["usv"] = {{"id", w.usv->id}, {"position", point_json(w.usv->position)}, {"battery_wh", w.usv->battery.charge}};
    return t;
}

// Report content without anything that changes merely because time passes.
std::string report_key(const KnownVehicle& v) {
    const VehicleReport& r = v.report;
    json j{{"type", r.vehicle_type}, {"mode", r.mode},       {"e", r.position_estimate.east},
           {"n", r.position_estimate.north}, {"alt", r.altitude}, {"depth", r.depth},
           {"sigma", r.sigma},       {"wh", r.battery_wh},    {"yo", r.yo_count},
           {"td", r.target_depth},   {"task", r.task},        {"q", r.queue_depth},
           {"ctd", r.ctd_samples},   {"at", r.sampled_at},    {"rx", v.received_at},
           {"fh", v.first_hand}};
    return j.dump();
}

std::size_t plans_signature(const Simulation& sim) {
    std::size_t h = sim.active_plans().size();
    for (const SortiePlan& p : sim.active_plans()) h = h * 1000003u + std::hash<std::uint64_t>{}(p.plan_id);
    return h;
}

json base_doc(const char* kind, const Simulation& sim, std::uint64_t seq) {
    return json{{"schema", kSaSchema}, {"kind", kind}, {"seq", seq}, {"sim_time", sim.now()}, {"tick", sim.world().tick}};
}

}  // namespace

std::variant<OperatorCommand, std::string> parse_command(const json& doc) {
    if (!doc.is_object()) return std::string("command must be a JSON object");
    static const std::set<std::string> known{"schema", "command_id", "target", "verb", "value", "point", "track", "issued_at"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) return "unknown field '" + key + "'";
    if (doc.contains("schema") && doc["schema"] != kSaSchema)
        return std::string("schema mismatch: expected ") + kSaSchema;
    if (!doc.contains("command_id") || !doc["command_id"].is_string() || doc["command_id"].get<std::string>().empty())
        return std::string("command_id must be a non-empty string");
    if (!doc.contains("verb") || !doc["verb"].is_string()) return std::string("verb must be a string");
    const auto verb = parse_verb(doc["verb"].get<std::string>());
    if (!verb) return "unknown verb '" + doc["verb"].get<std::string>() + "'";

    OperatorCommand cmd;
    cmd.command_id = doc["command_id"].get<std::string>();
    cmd.verb = *verb;
    if (doc.contains("target")) {
        if (!doc["target"].is_string()) return std::string("target must be a string");
        cmd.target = doc["target"].get<std::string>();
    }
    if (is_sim_control(cmd.verb)) {
        if (cmd.target.empty()) cmd.target = "sim";
        if (cmd.target != "sim") return std::string("sim-control verbs target 'sim'");
    } else if (cmd.target.empty()) {
        return std::string("target is required");
    }
    if (doc.contains("issued_at")) {
        if (!doc["issued_at"].is_number()) return std::string("issued_at must be a number");
        cmd.issued_at = doc["issued_at"].get<double>();
    }
    const bool needs_value = cmd.verb == CommandVerb::SetTargetDepth || cmd.verb == CommandVerb::SetSimSpeed;
    if (needs_value) {
        if (!doc.contains("value") || !doc["value"].is_number()) return std::string("value must be a number");
        cmd.value = doc["value"].get<double>();
        if (!std::isfinite(cmd.value)) return std::string("value must be finite");
        if (cmd.verb == CommandVerb::SetSimSpeed && cmd.value < 0.0) return std::string("speed must be >= 0");
        if (cmd.verb == CommandVerb::SetTargetDepth && cmd.value <= 0.0) return std::string("target depth must be > 0");
    }
    if (cmd.verb == CommandVerb::SetDropPoint) {
        const auto p = doc.contains("point") ? parse_point(doc["point"]) : std::nullopt;
        if (!p || !finite(*p)) return std::string("point must be [east, north]");
        cmd.point = *p;
    }
    if (cmd.verb == CommandVerb::RetaskUsvTrack) {
        if (!doc.contains("track") || !doc["track"].is_array() || doc["track"].empty())
            return std::string("track must be a non-empty array of points");
        for (const json& item : doc["track"]) {
            const auto p = parse_point(item);
            if (!p || !finite(*p)) return std::string("track must be a non-empty array of points");
            cmd.track.push_back(*p);
        }
    }
    return cmd;
}

json command_json(const OperatorCommand& cmd) {
    json j{{"schema", kSaSchema}, {"command_id", cmd.command_id}, {"target", cmd.target}, {"verb", to_string(cmd.verb)}};
    if (cmd.verb == CommandVerb::SetTargetDepth || cmd.verb == CommandVerb::SetSimSpeed) j["value"] = cmd.value;
    if (cmd.verb == CommandVerb::SetDropPoint) j["point"] = {cmd.point.east, cmd.point.north};
    if (cmd.verb == CommandVerb::RetaskUsvTrack) {
        json t = json::array();
        for (const Vec2& p : cmd.track) t.push_back({p.east, p.north});
        j["track"] = t;
    }
    if (cmd.issued_at != 0.0) j["issued_at"] = cmd.issued_at;
    return j;
}

json known_vehicle_json(const KnownVehicle& v, double now) {
    const VehicleReport& r = v.report;
    return json{{"id", r.vehicle_id},
                {"type", r.vehicle_type},
                {"mode", r.mode},
                {"position", point_json(r.position_estimate)},
                {"altitude", r.altitude},
                {"depth", r.depth},
                {"sigma", r.sigma},
                {"battery_wh", r.battery_wh},
                {"yo_count", r.yo_count},
                {"target_depth", r.target_depth},
                {"task", r.task},
                {"queue_depth", r.queue_depth},
                {"ctd_samples", r.ctd_samples},
                {"sampled_at", r.sampled_at},
                {"received_at", v.received_at},
                {"staleness_s", now - r.sampled_at},
                {"first_hand", v.first_hand},
                {"hops", v.hops}};
}

bool operator_visible(const std::string& kind) {
    static const std::set<std::string> visible{
        "run_start",       "plan_issued",     "plan_deferred", "plan_rejected",    "sortie_launched",
        "sortie_complete", "mug_deployed",    "mug_recovered", "simulation_fault", "command_submitted",
        "forced_sortie",   "forced_sortie_skipped",
    };
    return visible.count(kind) > 0;
}

json sa_snapshot(const Simulation& sim, const PacingStatus& pacing, bool debug_truth, std::uint64_t seq) {
    json doc = base_doc("snapshot", sim, seq);
    doc["scenario"] = sim.config().name;
    doc["finished"] = sim.finished();
    if (!sim.fault().empty()) doc["fault"] = sim.fault();
    doc["pacing"] = {{"paused", pacing.paused}, {"speed", pacing.speed}, {"running", pacing.running}};
    json vehicles = json::array();
    for (const auto& [id, v] : sim.knowledge().vehicles()) vehicles.push_back(known_vehicle_json(v, sim.now()));
    doc["vehicles"] = vehicles;
    doc["plans"] = plans_json(sim);
    json recent = json::array();
    const auto& log = sim.world().log;
    for (auto it = log.rbegin(); it != log.rend() && recent.size() < kRecentEvents; ++it)
        if (debug_truth || operator_visible(it->kind)) recent.push_back(json::parse(it->json));
    std::reverse(recent.begin(), recent.end());
    doc["events"] = recent;
    doc["debug_truth"] = debug_truth;
    if (debug_truth) doc["truth"] = truth_json(sim.world());
    return doc;
}

void DeltaTracker::reset(const Simulation& sim) {
    sent_.clear();
    for (const auto& [id, v] : sim.knowledge().vehicles()) sent_[id] = report_key(v);
    log_cursor_ = sim.world().log.size();
    plans_hash_ = plans_signature(sim);
}

json DeltaTracker::next(const Simulation& sim, std::uint64_t seq) {
    json changed = json::array();
    json removed = json::array();
    const auto& known = sim.knowledge().vehicles();
    for (const auto& [id, v] : known) {
        std::string key = report_key(v);
        auto it = sent_.find(id);
        if (it == sent_.end() || it->second != key) {
            changed.push_back(known_vehicle_json(v, sim.now()));
            sent_[id] = std::move(key);
        }
    }
    for (auto it = sent_.begin(); it != sent_.end();) {
        if (!known.count(it->first)) {
            removed.push_back(it->first);
            it = sent_.erase(it);
        } else {
            ++it;
        }
    }
    json events = json::array();
    const auto& log = sim.world().log;
    for (; log_cursor_ < log.size(); ++log_cursor_)
        if (debug_truth_ || operator_visible(log[log_cursor_].kind)) events.push_back(json::parse(log[log_cursor_].json));
    const std::size_t plans = plans_signature(sim);
    const bool plans_changed = plans != plans_hash_;
    plans_hash_ = plans;

    if (changed.empty() && removed.empty() && events.empty() && !plans_changed) return base_doc("heartbeat", sim, seq);
    json doc = base_doc("delta", sim, seq);
    doc["vehicles"] = changed;
    doc["removed"] = removed;
    doc["events"] = events;
    if (plans_changed) doc["plans"] = plans_json(sim);
    if (sim.finished()) doc["finished"] = true;
    return doc;
}

// --- UpdateFeed ---

void UpdateFeed::Subscription::push(std::string doc) {
    {
        std::lock_guard lk(mu_);
        if (closed_) return;
        if (queue_.size() >= capacity_) {
            overflowed_ = true;
            closed_ = true;
            queue_.clear();
            queue_.push_back(json{{"schema", kSaSchema}, {"kind", "overflow"}, {"reason", "subscriber too slow"},
                                  {"capacity", capacity_}}
                                 .dump());
        } else {
            queue_.push_back(std::move(doc));
        }
    }
    cv_.notify_all();
}

std::optional<std::string> UpdateFeed::Subscription::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lk(mu_);
    cv_.wait_for(lk, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    std::string doc = std::move(queue_.front());
    queue_.pop_front();
    return doc;
}

std::optional<std::string> UpdateFeed::Subscription::try_pop() { return pop(std::chrono::milliseconds(0)); }

bool UpdateFeed::Subscription::closed() const {
    std::lock_guard lk(mu_);
    return closed_;
}

bool UpdateFeed::Subscription::overflowed() const {
    std::lock_guard lk(mu_);
    return overflowed_;
}

void UpdateFeed::Subscription::close() {
    {
        std::lock_guard lk(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

std::size_t UpdateFeed::Subscription::pending() const {
    std::lock_guard lk(mu_);
    return queue_.size();
}

std::shared_ptr<UpdateFeed::Subscription> UpdateFeed::subscribe(std::string first) {
    std::shared_ptr<Subscription> sub(new Subscription(capacity_));
    sub->push(std::move(first));
    std::lock_guard lk(mu_);
    subs_.push_back(sub);
    return sub;
}

void UpdateFeed::publish(const std::string& doc) {
    std::vector<std::shared_ptr<Subscription>> live;
    {
        std::lock_guard lk(mu_);
        auto keep = subs_.begin();
        for (auto& w : subs_) {
            auto s = w.lock();
            if (!s || s->closed()) continue;
            live.push_back(s);
            *keep++ = w;
        }
        subs_.erase(keep, subs_.end());
    }
    for (auto& s : live) s->push(doc);
}

std::size_t UpdateFeed::subscribers() const {
    std::lock_guard lk(mu_);
    std::size_t n = 0;
    for (const auto& w : subs_)
        if (auto s = w.lock(); s && !s->closed()) ++n;
    return n;
}

json ack_json(const CommandAck& ack) {
    json j{{"schema", kSaSchema},   {"kind", "ack"},          {"command_id", ack.command_id},
           {"status", to_string(ack.status)}, {"acoustic", ack.acoustic}, {"sim_time", ack.sim_time}};
    if (!ack.reason.empty()) j["reason"] = ack.reason;
    return j;
}

// --- PacedRunner ---

PacedRunner::PacedRunner(ScenarioConfig config, SimulationOptions sim_options, RunnerOptions options)
    : options_(options),
      sim_(std::move(config), std::move(sim_options)),
      tracker_(options.debug_truth),
      feed_(options.feed_capacity),
      paused_(options.start_paused),
      speed_(options.speed) {
    tracker_.reset(sim_);
}

PacedRunner::~PacedRunner() { stop(); }

void PacedRunner::start() {
    if (thread_.joinable()) return;
    {
        std::lock_guard lk(ctl_mu_);
        stopping_ = false;
    }
    thread_ = std::thread([this] { loop(); });
}

void PacedRunner::stop() {
    {
        std::lock_guard lk(ctl_mu_);
        stopping_ = true;
    }
    ctl_cv_.notify_all();
    if (thread_.joinable()) thread_.join();
    // Anything still queued gets an answer.
    std::lock_guard lk(sim_mu_);
    drain_mailbox_locked();
}

PacingStatus PacedRunner::pacing_locked() const {
    return PacingStatus{paused_, speed_, thread_.joinable() && !stopping_};
}

PacingStatus PacedRunner::pacing() const {
    std::lock_guard lk(ctl_mu_);
    return pacing_locked();
}

void PacedRunner::drain_mailbox_locked() {
    std::deque<std::shared_ptr<Pending>> batch;
    {
        std::lock_guard lk(ctl_mu_);
        batch.swap(mailbox_);
    }
    for (auto& p : batch) {
        CommandAck ack;
        ack.command_id = p->cmd.command_id;
        ack.sim_time = sim_.now();
        try {
            const CommandOutcome out = sim_.submit(p->cmd);
            ack.status = out.status;
            ack.reason = out.reason;
            ack.acoustic = out.acoustic;
        } catch (const std::exception& e) {
            ack.status = CommandStatus::Rejected;
            ack.reason = e.what();
        }
        p->done.set_value(ack);
    }
}

void PacedRunner::step_locked() {
    if (sim_.finished()) return;
    sim_.step();
    if (sim_.finished()) sim_.run();  // final audit and output files
    feed_.publish(tracker_.next(sim_, ++seq_).dump());
}

void PacedRunner::step(std::size_t n) {
    std::lock_guard lk(sim_mu_);
    drain_mailbox_locked();
    for (std::size_t i = 0; i < n && !sim_.finished(); ++i) step_locked();
}

json PacedRunner::snapshot() {
    const PacingStatus p = pacing();
    std::lock_guard lk(sim_mu_);
    return sa_snapshot(sim_, p, options_.debug_truth, seq_);
}

json PacedRunner::health() {
    const PacingStatus p = pacing();
    std::lock_guard lk(sim_mu_);
    json j{{"schema", kSaSchema},
           {"kind", "health"},
           {"status", sim_.fault().empty() ? "ok" : "fault"},
           {"scenario", sim_.config().name},
           {"sim_time", sim_.now()},
           {"tick", sim_.world().tick},
           {"finished", sim_.finished()},
           {"paused", p.paused},
           {"speed", p.speed},
           {"running", p.running},
           {"subscribers", feed_.subscribers()},
           {"debug_truth", options_.debug_truth}};
    if (!sim_.fault().empty()) j["fault"] = sim_.fault();
    return j;
}

std::shared_ptr<UpdateFeed::Subscription> PacedRunner::subscribe() {
    const PacingStatus p = pacing();
    std::lock_guard lk(sim_mu_);
    return feed_.subscribe(sa_snapshot(sim_, p, options_.debug_truth, seq_).dump());
}

void PacedRunner::inspect(const std::function<void(const Simulation&)>& fn) {
    std::lock_guard lk(sim_mu_);
    fn(sim_);
}

CommandAck PacedRunner::sim_control(const OperatorCommand& cmd) {
    std::lock_guard lk(ctl_mu_);
    if (auto it = control_acks_.find(cmd.command_id); it != control_acks_.end()) return it->second;
    CommandAck ack;
    ack.command_id = cmd.command_id;
    ack.status = CommandStatus::Accepted;
    switch (cmd.verb) {
        case CommandVerb::PauseSim: paused_ = true; break;
        case CommandVerb::ResumeSim: paused_ = false; break;
        case CommandVerb::SetSimSpeed:
            if (!(cmd.value >= 0.0) || !std::isfinite(cmd.value)) {
                ack.status = CommandStatus::Rejected;
                ack.reason = "speed must be a finite value >= 0";
            } else {
                speed_ = cmd.value;
            }
            break;
        default:
            ack.status = CommandStatus::Rejected;
            ack.reason = "not a sim-control verb";
    }
    control_acks_[cmd.command_id] = ack;
    ctl_cv_.notify_all();
    return ack;
}

CommandAck PacedRunner::submit(const OperatorCommand& cmd) {
    if (is_sim_control(cmd.verb)) {
        CommandAck ack = sim_control(cmd);
        std::lock_guard lk(sim_mu_);
        ack.sim_time = sim_.now();
        return ack;
    }
    auto pending = std::make_shared<Pending>();
    pending->cmd = cmd;
    std::future<CommandAck> result = pending->done.get_future();
    bool threaded = false;
    {
        std::lock_guard lk(ctl_mu_);
        mailbox_.push_back(pending);
        threaded = thread_.joinable() && !stopping_;
    }
    if (threaded) {
        ctl_cv_.notify_all();
    } else {
        std::lock_guard lk(sim_mu_);
        drain_mailbox_locked();
    }
    return result.get();
}

void PacedRunner::loop() {
    using clock = std::chrono::steady_clock;
    auto next_tick = clock::now();
    for (;;) {
        {
            std::lock_guard lk(sim_mu_);
            drain_mailbox_locked();
        }
        bool finished = false;
        {
            std::lock_guard lk(sim_mu_);
            finished = sim_.finished();
        }
        bool idle = false;
        double speed = 1.0;
        {
            // Lock order is sim_mu_ before ctl_mu_; never take sim_mu_ while holding ctl_mu_.
            std::unique_lock lk(ctl_mu_);
            if (stopping_) return;
            speed = speed_;
            idle = paused_ || finished;
            if (idle) {
                const bool woke = ctl_cv_.wait_for(lk, options_.idle_heartbeat,
                                                   [&] { return stopping_ || !mailbox_.empty() || (!finished && !paused_); });
                if (stopping_) return;
                lk.unlock();
                if (!woke) {
                    std::lock_guard slk(sim_mu_);
                    json hb = base_doc("heartbeat", sim_, ++seq_);
                    hb["paused"] = true;
                    if (sim_.finished()) hb["finished"] = true;
                    feed_.publish(hb.dump());
                }
                next_tick = clock::now();
                continue;
            }
            if (speed > 0.0 && clock::now() < next_tick) {
                ctl_cv_.wait_until(lk, next_tick, [&] { return stopping_ || !mailbox_.empty() || paused_; });
                continue;  // re-check mailbox, pause and the deadline
            }
        }
        double dt = 1.0;
        {
            std::lock_guard lk(sim_mu_);
            drain_mailbox_locked();
            dt = sim_.config().dt;
            step_locked();
        }
        if (speed > 0.0) {
            next_tick += std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(dt / speed));
            // Do not try to catch up after a long stall.
            if (next_tick < clock::now() - std::chrono::seconds(1)) next_tick = clock::now();
        }
    }
}

}  // namespace oasys
