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

#include "oasys/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace oasys {

using nlohmann::json;

namespace {

constexpr std::size_t kCommandSize = 24;  // bytes on the wire for a scalar command
constexpr std::size_t kUavReportSize = 48;

json point_json(const Vec2& p) { return json{{"east", p.east}, {"north", p.north}}; }

json plan_json(const SortiePlan& p) {
    json legs = json::array();
    for (const Vec2& l : p.legs) legs.push_back(point_json(l));
    return json{{"plan_id", p.plan_id},
                {"uav", p.uav_id},
                {"objective", to_string(p.objective)},
                {"mug", p.mug_id},
                {"station", point_json(p.station)},
                {"legs", legs},
                {"energy_wh", p.energy_estimate},
                {"reserve_fraction", p.reserve_fraction},
                {"launch_time", p.launch_time},
                {"duration_s", p.duration_estimate},
                {"relay_duration_s", p.relay_duration},
                {"relay_altitude", p.relay_altitude}};
}

json event_json(double time, const std::string& kind, const std::string& vehicle) {
    json j{{"schema", kTelemetrySchema}, {"row", "event"}, {"t", time}, {"kind", kind}};
    if (!vehicle.empty()) j["vehicle"] = vehicle;
    return j;
}

}  // namespace

void EventQueue::push(double time, EventKind kind, std::string target, OperatorCommand command) {
    const std::uint64_t seq = next_seq_++;
    events_.emplace(std::make_pair(time, seq), ScheduledEvent{time, seq, kind, std::move(target), std::move(command)});
}

std::vector<ScheduledEvent> EventQueue::pop_before(double limit) {
    std::vector<ScheduledEvent> out;
    while (!events_.empty() && events_.begin()->first.first < limit) {
        out.push_back(std::move(events_.begin()->second));
        events_.erase(events_.begin());
    }
    return out;
}

std::optional<double> EventQueue::earliest() const {
    if (events_.empty()) return std::nullopt;
    return events_.begin()->first.first;
}

std::string_view to_string(CommandStatus status) {
    switch (status) {
        case CommandStatus::Accepted: return "accepted";
        case CommandStatus::Rejected: return "rejected";
        case CommandStatus::QueuedForUplink: return "queued_for_uplink";
    }
    return "unknown";
}

Simulation::Simulation(ScenarioConfig config, SimulationOptions options)
    : config_(std::move(config)), options_(std::move(options)), knowledge_(config_.uplink_latency) {
    if (options_.seed) config_.seed = *options_.seed;
    if (options_.duration) config_.duration = *options_.duration;
    if (options_.decimation) config_.decimation = *options_.decimation;
    config_.validate();

    world_.env = config_.env;
    world_.rng.seed(config_.seed);
    world_.network = Network(config_.comms);
    knowledge_ = KnowledgeBase(config_.uplink_latency);
    decimation_ticks_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config_.decimation / config_.dt)));
    decision_ticks_ =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config_.coordinator.decision_interval / config_.dt)));
    total_ticks_ = static_cast<std::uint64_t>(std::ceil(config_.duration / config_.dt - 1e-9));
    sink_ = std::make_unique<TelemetrySink>(options_.output_dir);

    RadioParams radio = config_.radio;
    if (config_.usv) {
        const UsvSpec& s = *config_.usv;
        world_.usv = make_usv(s.id, s.params, s.position, s.track);
        RadioParams r = radio;
        r.underwater_capable = true;  // hull modem for acoustic commands
        world_.network.add_node(s.id, r);
    }
    for (const UavSpec& s : config_.uavs) {
        world_.uavs.emplace(s.id, make_uav(s.id, s.params, world_.usv ? world_.usv->position : Vec2{}));
        RadioParams r = radio;
        r.store_carry = true;
        world_.network.add_node(s.id, r);
    }
    for (const MugSpec& s : config_.mugs) {
        MugAgent m = make_mug(s.id, s.params, world_.env);
        RadioParams r = radio;
        r.underwater_capable = true;
        world_.network.add_node(s.id, r);
        if (s.in_bay) {
            m.kin.position = world_.usv->position;
            world_.mug_location[s.id] = {MugLocation::Kind::Bay, {}};
            world_.usv->mug_bay.push_back(s.id);
            if (s.drop_point) world_.coordinator.deployments.push_back({s.id, *s.drop_point, s.deploy_at});
        } else {
            std::vector<MugModeChange> changes;
            deploy_mug(m, s.position, 0.0, &changes);
            world_.mug_location[s.id] = {MugLocation::Kind::Water, {}};
            ever_deployed_ = true;
            for (const MugModeChange& c : changes) {
                json j = event_json(0.0, "mode_change", s.id);
                j["from"] = to_string(c.from);
                j["to"] = to_string(c.to);
                j["cause"] = to_string(c.event);
                log(0.0, "mode_change", s.id, j.dump());
            }
        }
        world_.mugs.emplace(s.id, std::move(m));
    }
    for (const ScheduledCommand& c : config_.commands)
        world_.events.push(c.at, EventKind::OperatorCommand, c.command.target, c.command);
    if (config_.faults.forced_sortie)
        world_.events.push(config_.faults.forced_sortie->at, EventKind::ForcedSortie, config_.faults.forced_sortie->uav_id);

    for (const auto& [id, m] : world_.mugs) initial_total_ += m.battery.initial;
    for (const auto& [id, u] : world_.uavs) initial_total_ += u.battery.initial;
    if (world_.usv) initial_total_ += world_.usv->battery.initial;

    // Geometry for the first tick's link context.
    for (const auto& [id, m] : world_.mugs) {
        const bool wet = world_.mug_location[id].kind == MugLocation::Kind::Water;
        world_.network.set_geometry(id, {m.kin.position, wet && m.kin.depth <= 0.0 ? config_.mug_antenna_height : 0.0,
                                         m.kin.depth, wet});
    }
    for (const auto& [id, u] : world_.uavs) world_.network.set_geometry(id, {u.position, u.altitude, 0.0, true});
    if (world_.usv) world_.network.set_geometry(world_.usv->id, {world_.usv->position, world_.usv->params.mast_height, 0.0, true});

    observe_first_hand();
    json start = event_json(0.0, "run_start", "");
    start["scenario"] = config_.name;
    start["seed"] = config_.seed;
    start["dt"] = config_.dt;
    start["duration"] = config_.duration;
    tick_events_.insert(tick_events_.begin(), LogEvent{0.0, "run_start", "", start.dump()});
    for (const LogEvent& e : tick_events_) {
        sink_->telemetry_line(e.json);
        sink_->event_line(e.json);
        world_.log.push_back(e);
    }
    tick_events_.clear();
    emit_state_rows();
}

void Simulation::log(double time, const std::string& kind, const std::string& vehicle, std::string text) {
    tick_events_.push_back(LogEvent{time, kind, vehicle, std::move(text)});
}

bool Simulation::finished() const { return !fault_.empty() || complete_ || world_.tick >= total_ticks_; }

void Simulation::observe_first_hand() {
    if (!world_.usv) return;
    const UsvAgent& usv = *world_.usv;
    const double now = world_.sim_time;
    knowledge_.observe_first_hand(make_report(usv, now), now);
    for (const auto& [id, u] : world_.uavs)
        if (u.mode == UavMode::DockedCharging) knowledge_.observe_first_hand(make_report(u, now), now);
    for (const auto& [id, m] : world_.mugs)
        if (world_.mug_location.at(id).kind == MugLocation::Kind::Bay) {
            VehicleReport r = make_report(m, now);
            r.position_estimate = usv.position;
            r.task = "stowed";
            knowledge_.observe_first_hand(r, now);
        }
}

CoordinatorSnapshot Simulation::coordinator_snapshot() const {
    CoordinatorSnapshot s;
    s.now = world_.sim_time;
    s.env = world_.env;
    if (world_.usv) s.usv = *world_.usv;
    for (const auto& [id, u] : world_.uavs) s.uavs.push_back(u);
    for (const auto& [id, m] : world_.mugs) {
        const MugLocation& loc = world_.mug_location.at(id);
        MugView v;
        v.id = id;
        v.mode = m.mode;
        v.estimate = m.nav.position;
        v.sigma = m.nav.sigma;
        v.in_bay = loc.kind == MugLocation::Kind::Bay;
        v.carried = loc.kind == MugLocation::Kind::Carried;
        v.surfaced = loc.kind == MugLocation::Kind::Water && m.kin.depth <= 0.0;
        if (world_.usv) {
            v.queued_to_usv = world_.network.pending_to(id, world_.usv->id);
            v.queued_bytes = world_.network.pending_bytes_to(id, world_.usv->id);
            v.direct_link = world_.network.link(id, world_.usv->id).available;
        }
        s.mugs.push_back(v);
    }
    s.radio_bandwidth = config_.radio.bandwidth;
    s.mug_antenna_height = config_.mug_antenna_height;
    s.usv_antenna_height = world_.usv ? world_.usv->params.mast_height : 0.0;
    return s;
}

void Simulation::step() {
    if (finished()) throw std::logic_error("step: simulation already finished");
    try {
        const double now = world_.sim_time;
        const double dt = config_.dt;
        Network& net = world_.network;
        const std::string usv_id = world_.usv ? world_.usv->id : std::string();

        // (1) Environment: static fields; solar is evaluated by the USV tick.
        // (2) Agents in ascending id, reading a context fixed at tick start.
        const Vec2 usv_pos0 = world_.usv ? world_.usv->position : Vec2{};
        const double usv_speed0 = world_.usv && !world_.usv->track.empty() ? world_.usv->params.speed : 0.0;
        std::map<std::string, bool> mug_uav_link;
        for (const auto& [uid, u] : world_.uavs)
            if (u.sortie && !u.sortie->mug_id.empty() && world_.mugs.count(u.sortie->mug_id))
                mug_uav_link[uid] = net.link(u.sortie->mug_id, uid).available;

        std::vector<std::pair<std::string, char>> order;
        for (const auto& [id, m] : world_.mugs) order.emplace_back(id, 'm');
        for (const auto& [id, u] : world_.uavs) order.emplace_back(id, 'a');
        if (world_.usv) order.emplace_back(world_.usv->id, 's');
        std::sort(order.begin(), order.end());

        if (world_.usv) world_.usv->dock_occupant.reset();
        std::vector<DropEvent> drops;

        for (const auto& [id, type] : order) {
            if (type == 'm') {
                MugAgent& m = world_.mugs.at(id);
                if (world_.mug_location.at(id).kind != MugLocation::Kind::Water || is_stowed(m.mode)) continue;
                MugContext ctx{world_.env, now, dt, net.pending_handoff(id), tx_seconds_[id], &world_.rng};
                MugTickResult r = mug_tick(m, ctx);
                consumed_ += r.consumed_wh;
                for (const MugModeChange& c : r.changes) {
                    json j = event_json(c.time, "mode_change", id);
                    j["from"] = to_string(c.from);
                    j["to"] = to_string(c.to);
                    j["cause"] = to_string(c.event);
                    j["depth"] = r.agent.kin.depth;
                    log(c.time, "mode_change", id, j.dump());
                }
                if (r.overdepth) {
                    json j = event_json(now, "fault_overdepth", id);
                    j["depth"] = r.agent.kin.depth;
                    log(now, "fault_overdepth", id, j.dump());
                }
                m = std::move(r.agent);
                if (world_.usv) {
                    for (const VehicleReport& rep : r.reports) {
                        const std::size_t size = m.params.report_base_size + m.params.sample_size * rep.ctd_samples;
                        net.send(id, usv_id, MessageKind::Telemetry, size, rep, now, &drops);
                    }
                }
            } else if (type == 'a') {
                UavAgent& u = world_.uavs.at(id);
                UavContext ctx{world_.env, now, dt, usv_pos0, usv_speed0, std::nullopt};
                if (u.sortie && !u.sortie->mug_id.empty() && world_.mugs.count(u.sortie->mug_id)) {
                    const MugAgent& m = world_.mugs.at(u.sortie->mug_id);
                    const bool wet = world_.mug_location.at(m.id).kind == MugLocation::Kind::Water;
                    MugSighting s;
                    s.mug_id = m.id;
                    s.true_position = m.kin.position;
                    s.awaiting_pickup = wet && m.mode == MugMode::WaitRecovery && m.kin.depth <= 0.0;
                    if (wet && mug_uav_link[id]) s.broadcast_estimate = m.nav.position;
                    ctx.mug = s;
                }
                UavTickResult r = uav_tick(u, ctx);
                consumed_ += r.consumed_wh;
                for (const UavModeChange& c : r.changes) {
                    json j = event_json(c.time, "mode_change", id);
                    j["from"] = to_string(c.from);
                    j["to"] = to_string(c.to);
                    j["cause"] = to_string(c.event);
                    j["battery_wh"] = r.agent.battery.charge;
                    log(c.time, "mode_change", id, j.dump());
                }
                if (r.schedule_hover_completion)
                    world_.events.push(*r.schedule_hover_completion, EventKind::HoverComplete, id);
                if (r.pickup_failed) {
                    ++pickups_failed_;
                    log(now, "pickup_failed", id, event_json(now, "pickup_failed", id).dump());
                }
                if (r.aborted) {
                    ++sorties_aborted_;
                    json j = event_json(now, "sortie_aborted", id);
                    j["battery_wh"] = r.agent.battery.charge;
                    log(now, "sortie_aborted", id, j.dump());
                }
                if (r.emergency_landed) {
                    ++emergency_landings_;
                    json j = event_json(now, "emergency_land", id);
                    j["battery_wh"] = r.agent.battery.charge;
                    j["position"] = point_json(r.agent.position);
                    log(now, "emergency_land", id, j.dump());
                }
                if (r.completed_sortie) {
                    const double margin = r.agent.battery.charge - r.completed_sortie->reserve_wh();
                    dock_margins_.push_back(margin);
                    if (margin < -1e-9) ++reserve_violations_;
                    ++sorties_completed_;
                    json j = event_json(now, "sortie_complete", id);
                    j["plan_id"] = r.completed_sortie->plan_id;
                    j["objective"] = to_string(r.completed_sortie->objective);
                    j["battery_wh"] = r.agent.battery.charge;
                    j["reserve_wh"] = r.completed_sortie->reserve_wh();
                    log(now, "sortie_complete", id, j.dump());
                }
                if (r.delivered_mug && world_.usv) {
                    world_.mug_location[*r.delivered_mug] = {MugLocation::Kind::Bay, {}};
                    world_.usv->mug_bay.push_back(*r.delivered_mug);
                    json j = event_json(now, "mug_recovered", *r.delivered_mug);
                    j["uav"] = id;
                    log(now, "mug_recovered", *r.delivered_mug, j.dump());
                }
                u = std::move(r.agent);
                if (world_.usv) {
                    for (const VehicleReport& rep : r.reports)
                        net.send(id, usv_id, MessageKind::Telemetry, kUavReportSize, rep, now, &drops);
                    if (r.requested_charge_power > 0.0 && !world_.usv->dock_occupant) {
                        UsvAgent& usv = *world_.usv;
                        const DockTransfer t = dock_transfer(usv.battery, u.battery, r.requested_charge_power, dt,
                                                             usv.params.dock_reserve_fraction * usv.battery.capacity);
                        usv.battery = t.usv;
                        u.battery = t.uav;
                        usv.dock_occupant = id;
                    }
                }
            } else {
                UsvAgent& usv = *world_.usv;
                UsvTickResult r = usv_tick(usv, world_.env, now, dt);
                harvested_ += r.harvested_wh;
                consumed_ += r.consumed_wh;
                usv = std::move(r.agent);
            }
        }

        // Stowed and carried MUGs ride along.
        for (auto& [id, m] : world_.mugs) {
            const MugLocation& loc = world_.mug_location.at(id);
            if (loc.kind == MugLocation::Kind::Bay && world_.usv) m.kin.position = world_.usv->position;
            if (loc.kind == MugLocation::Kind::Carried) m.kin.position = world_.uavs.at(loc.carrier).position;
        }

        // (3) Communications on the post-move geometry.
        for (const auto& [id, m] : world_.mugs) {
            const bool wet = world_.mug_location.at(id).kind == MugLocation::Kind::Water;
            const bool powered = wet && m.mode != MugMode::FaultLowBattery && m.battery.charge > 0.0;
            net.set_geometry(id, {m.kin.position, wet && m.kin.depth <= 0.0 ? config_.mug_antenna_height : 0.0,
                                  m.kin.depth, powered});
        }
        for (const auto& [id, u] : world_.uavs)
            net.set_geometry(id, {u.position, u.altitude, 0.0, u.mode != UavMode::EmergencyLand});
        if (world_.usv) net.set_geometry(usv_id, {world_.usv->position, world_.usv->params.mast_height, 0.0, true});

        CommsStepReport report = net.step(now, dt, world_.rng);
        tx_seconds_ = report.tx_seconds;
        duplicates_ += report.duplicates_suppressed;
        drops.insert(drops.end(), report.drops.begin(), report.drops.end());
        for (const Delivery& d : report.deliveries) apply_delivery(d);
        for (const DropEvent& d : drops) {
            json j = event_json(d.time, "message_dropped", d.at);
            j["message"] = to_string(d.id);
            j["lost"] = d.lost;
            log(d.time, "message_dropped", d.at, j.dump());
        }

        // (4) Coordinator decision step.
        if (config_.coordinator.enabled && world_.usv && world_.tick % decision_ticks_ == 0) {
            const Decision dec = decide(world_.coordinator, coordinator_snapshot(), config_.coordinator);
            for (const PlanEvent& e : dec.events) {
                json j = event_json(e.time, std::string(to_string(e.kind)), e.uav_id);
                j["objective"] = to_string(e.objective);
                j["mug"] = e.mug_id;
                if (!e.reason.empty()) j["reason"] = e.reason;
                if (e.kind == PlanEventKind::Deferred) j["retry_at"] = e.retry_at;
                j["energy_wh"] = e.energy_wh;
                if (e.plan_id) j["plan_id"] = e.plan_id;
                log(e.time, std::string(to_string(e.kind)), e.uav_id, j.dump());
            }
            for (const SortiePlan& p : dec.launches) launch_sortie(p);
        }

        // (5) Timed events falling inside this tick.
        for (const ScheduledEvent& ev : world_.events.pop_before(now + dt - 1e-9)) dispatch(ev);

        // (6) Advance the clock and emit telemetry.
        ++world_.tick;
        world_.sim_time = static_cast<double>(world_.tick) * dt;
        knowledge_.advance(world_.sim_time);
        observe_first_hand();

        std::stable_sort(tick_events_.begin(), tick_events_.end(),
                         [](const LogEvent& a, const LogEvent& b) { return a.time < b.time; });
        for (LogEvent& e : tick_events_) {
            sink_->telemetry_line(e.json);
            sink_->event_line(e.json);
            world_.log.push_back(std::move(e));
        }
        tick_events_.clear();
        if (world_.tick % decimation_ticks_ == 0) emit_state_rows();

        check_invariants();

        if (config_.stop_when_complete && ever_deployed_ && world_.coordinator.deployments.empty()) {
            const bool bay = std::all_of(world_.mug_location.begin(), world_.mug_location.end(),
                                         [](const auto& kv) { return kv.second.kind == MugLocation::Kind::Bay; });
            const bool docked = std::all_of(world_.uavs.begin(), world_.uavs.end(),
                                            [](const auto& kv) { return kv.second.mode == UavMode::DockedCharging; });
            if (bay && docked) complete_ = true;
        }
    } catch (const std::exception& e) {
        fault(e.what());
    }
}

void Simulation::fault(const std::string& what) {
    fault_ = what;
    json j = event_json(world_.sim_time, "simulation_fault", "");
    j["message"] = what;
    for (LogEvent& e : tick_events_) {
        sink_->telemetry_line(e.json);
        sink_->event_line(e.json);
        world_.log.push_back(std::move(e));
    }
    tick_events_.clear();
    LogEvent e{world_.sim_time, "simulation_fault", "", j.dump()};
    sink_->telemetry_line(e.json);
    sink_->event_line(e.json);
    world_.log.push_back(e);
}

void Simulation::check_invariants() {
    auto store_ok = [&](const std::string& who, const EnergyStore& s) {
        const double tol = 1e-9 * std::max(1.0, s.capacity);
        if (s.charge < -tol || s.charge > s.capacity + tol)
            throw std::runtime_error("invariant: " + who + " charge " + std::to_string(s.charge) + " outside [0, capacity]");
        if (std::abs(s.ledger_residual()) > tol)
            throw std::runtime_error("invariant: " + who + " battery ledger does not close");
    };
    for (const auto& [id, m] : world_.mugs) {
        store_ok(id, m.battery);
        if (m.kin.depth < 0.0) throw std::runtime_error("invariant: " + id + " depth below surface");
    }
    for (const auto& [id, u] : world_.uavs) {
        store_ok(id, u.battery);
        if (u.carrying && u.mode != UavMode::TransitBack && u.mode != UavMode::EmergencyLand)
            throw std::runtime_error("invariant: " + id + " carrying a MUG outside the return leg");
    }
    if (world_.usv) store_ok(world_.usv->id, world_.usv->battery);
    const ConservationCounts c = world_.network.conservation();
    if (c.created != c.delivered + c.dropped + c.in_flight || c.in_flight != c.in_flight_observed)
        throw std::runtime_error("invariant: message conservation broken");
    if (const auto t = world_.events.earliest(); t && *t < world_.sim_time - 1e-9)
        throw std::runtime_error("invariant: event scheduled in the past");
}

void Simulation::apply_delivery(const Delivery& d) {
    const Message& msg = d.msg;
    json j = event_json(d.time, "message_delivered", d.at);
    j["message"] = to_string(msg.id);
    j["message_kind"] = to_string(msg.kind);
    j["bytes"] = msg.payload_size;
    j["created_at"] = msg.created_at;
    j["hops"] = msg.hops;
    if (d.acoustic) j["acoustic"] = true;
    if (msg.kind != MessageKind::Ack) log(d.time, "message_delivered", d.at, j.dump());

    if (msg.kind == MessageKind::Telemetry && world_.usv && d.at == world_.usv->id) {
        knowledge_.ingest(msg, d.time);
    } else if (msg.kind == MessageKind::Command) {
        const auto* cmd = std::get_if<OperatorCommand>(&msg.body);
        if (!cmd) return;
        const bool applied = apply_command_at(d.at, *cmd, d.time);
        command_deliveries_.push_back({cmd->command_id, d.at, d.time, applied});
    }
}

bool Simulation::apply_command_at(const std::string& vehicle, const OperatorCommand& cmd, double now) {
    if (!applied_commands_[vehicle].insert(cmd.command_id).second) return false;
    bool ok = false;
    if (auto it = world_.mugs.find(vehicle); it != world_.mugs.end()) {
        std::vector<MugModeChange> changes;
        ok = apply_mug_command(it->second, cmd, now, &changes);
        for (const MugModeChange& c : changes) {
            json j = event_json(now, "mode_change", vehicle);
            j["from"] = to_string(c.from);
            j["to"] = to_string(c.to);
            j["cause"] = to_string(c.event);
            log(now, "mode_change", vehicle, j.dump());
        }
    } else if (auto ut = world_.uavs.find(vehicle); ut != world_.uavs.end()) {
        std::vector<UavModeChange> changes;
        ok = apply_uav_command(ut->second, cmd, now, &changes);
        if (ok) ++sorties_aborted_;
        for (const UavModeChange& c : changes) {
            json j = event_json(now, "mode_change", vehicle);
            j["from"] = to_string(c.from);
            j["to"] = to_string(c.to);
            j["cause"] = to_string(c.event);
            log(now, "mode_change", vehicle, j.dump());
        }
    } else if (world_.usv && world_.usv->id == vehicle) {
        ok = apply_usv_command(*world_.usv, cmd);
    }
    json j = event_json(now, "command_applied", vehicle);
    j["command_id"] = cmd.command_id;
    j["verb"] = to_string(cmd.verb);
    j["applied"] = ok;
    log(now, "command_applied", vehicle, j.dump());
    return ok;
}

void Simulation::launch_sortie(const SortiePlan& plan) {
    UavAgent& u = world_.uavs.at(plan.uav_id);
    std::vector<UavModeChange> changes;
    launch(u, plan, world_.sim_time, &changes);
    if (plan.objective == SortieObjective::Deploy) {
        world_.mug_location[plan.mug_id] = {MugLocation::Kind::Carried, plan.uav_id};
        auto& bay = world_.usv->mug_bay;
        bay.erase(std::remove(bay.begin(), bay.end(), plan.mug_id), bay.end());
    }
    json j = event_json(world_.sim_time, "sortie_launched", plan.uav_id);
    j["plan"] = plan_json(plan);
    log(world_.sim_time, "sortie_launched", plan.uav_id, j.dump());
    for (const UavModeChange& c : changes) {
        json m = event_json(c.time, "mode_change", plan.uav_id);
        m["from"] = to_string(c.from);
        m["to"] = to_string(c.to);
        m["cause"] = to_string(c.event);
        log(c.time, "mode_change", plan.uav_id, m.dump());
    }
}

void Simulation::dispatch(const ScheduledEvent& ev) {
    switch (ev.kind) {
        case EventKind::HoverComplete: {
            UavAgent& u = world_.uavs.at(ev.target);
            if (u.mode != UavMode::HoverPickup || !u.sortie || !u.hover_complete_at ||
                std::abs(*u.hover_complete_at - ev.time) > 1e-9)
                return;  // superseded by an abort
            std::vector<UavModeChange> changes;
            const std::string mug_id = u.sortie->mug_id;
            const SortieObjective objective = u.sortie->objective;
            if (objective == SortieObjective::Recover) {
                MugAgent& m = world_.mugs.at(mug_id);
                const bool present = world_.mug_location.at(mug_id).kind == MugLocation::Kind::Water &&
                                     m.mode == MugMode::WaitRecovery &&
                                     distance(u.position, m.kin.position) <= u.params.capture_radius;
                if (!present) {
                    fire(u, UavEvent::PickupFailed, ev.time, &changes);
                    ++pickups_failed_;
                    log(ev.time, "pickup_failed", ev.target, event_json(ev.time, "pickup_failed", ev.target).dump());
                } else {
                    complete_hover(u, ev.time, &changes);
                    std::vector<MugModeChange> mc;
                    fire(m, MugEvent::PickedUp, ev.time, &mc);
                    world_.mug_location[mug_id] = {MugLocation::Kind::Carried, ev.target};
                    for (const MugModeChange& c : mc) {
                        json j = event_json(ev.time, "mode_change", mug_id);
                        j["from"] = to_string(c.from);
                        j["to"] = to_string(c.to);
                        j["cause"] = to_string(c.event);
                        log(ev.time, "mode_change", mug_id, j.dump());
                    }
                    json j = event_json(ev.time, "pickup_complete", ev.target);
                    j["mug"] = mug_id;
                    log(ev.time, "pickup_complete", ev.target, j.dump());
                }
            } else {
                complete_hover(u, ev.time, &changes);
                MugAgent& m = world_.mugs.at(mug_id);
                std::vector<MugModeChange> mc;
                deploy_mug(m, u.position, ev.time, &mc);
                world_.mug_location[mug_id] = {MugLocation::Kind::Water, {}};
                ever_deployed_ = true;
                for (const MugModeChange& c : mc) {
                    json j = event_json(ev.time, "mode_change", mug_id);
                    j["from"] = to_string(c.from);
                    j["to"] = to_string(c.to);
                    j["cause"] = to_string(c.event);
                    log(ev.time, "mode_change", mug_id, j.dump());
                }
                json j = event_json(ev.time, "mug_deployed", mug_id);
                j["uav"] = ev.target;
                j["position"] = point_json(u.position);
                log(ev.time, "mug_deployed", mug_id, j.dump());
            }
            for (const UavModeChange& c : changes) {
                json j = event_json(c.time, "mode_change", ev.target);
                j["from"] = to_string(c.from);
                j["to"] = to_string(c.to);
                j["cause"] = to_string(c.event);
                log(c.time, "mode_change", ev.target, j.dump());
            }
            break;
        }
        case EventKind::OperatorCommand: {
            if (is_sim_control(ev.command.verb)) {
                json j = event_json(ev.time, "sim_control_ignored", "");
                j["command_id"] = ev.command.command_id;
                j["verb"] = to_string(ev.command.verb);
                log(ev.time, "sim_control_ignored", "", j.dump());
                break;
            }
            submit(ev.command);
            break;
        }
        case EventKind::ForcedSortie: {
            const ForcedSortie& f = *config_.faults.forced_sortie;
            UavAgent& u = world_.uavs.at(f.uav_id);
            if (u.mode != UavMode::DockedCharging) {
                log(ev.time, "forced_sortie_skipped", f.uav_id, event_json(ev.time, "forced_sortie_skipped", f.uav_id).dump());
                break;
            }
            const UavPowerModel& pm = u.params.power;
            const double leg = distance(u.position, f.station);
            SortiePlan p;
            p.plan_id = world_.coordinator.next_plan_id++;
            p.uav_id = f.uav_id;
            p.objective = SortieObjective::Relay;
            p.station = f.station;
            p.relay_duration = f.duration;
            p.relay_altitude = config_.coordinator.relay_altitude;
            p.legs = {u.position, f.station, u.position};
            p.energy_estimate = uav_leg_energy(leg, f.duration, false, pm) + uav_leg_energy(leg, 0.0, false, pm);
            p.duration_estimate = 2.0 * leg / pm.cruise_speed + f.duration;
            p.launch_time = world_.sim_time;
            p.enforce_reserve = false;
            log(ev.time, "forced_sortie", f.uav_id, event_json(ev.time, "forced_sortie", f.uav_id).dump());
            launch_sortie(p);
            break;
        }
    }
}

CommandOutcome Simulation::submit(const OperatorCommand& cmd) {
    if (auto it = submitted_.find(cmd.command_id); it != submitted_.end()) return it->second;
    CommandOutcome out;
    const double now = world_.sim_time;
    auto reject = [&](std::string reason) {
        out.status = CommandStatus::Rejected;
        out.reason = std::move(reason);
    };
    const auto mug = world_.mugs.find(cmd.target);
    const auto uav = world_.uavs.find(cmd.target);
    const bool is_usv = world_.usv && world_.usv->id == cmd.target;

    auto uplink = [&](CommandStatus status) {
        Network& net = world_.network;
        net.send(world_.usv->id, cmd.target, MessageKind::Command, kCommandSize, cmd, now);
        out.status = status;
        if (mug != world_.mugs.end() && world_.mug_location.at(cmd.target).kind == MugLocation::Kind::Water) {
            const AcousticResult a = acoustic_command(net.node(world_.usv->id), net.node(cmd.target), kCommandSize,
                                                      config_.dt, net.config());
            if (a.delivered) {
                net.send_acoustic(world_.usv->id, cmd.target, kCommandSize, cmd, now, config_.dt);
                out.acoustic = true;
            }
        }
    };

    if (cmd.command_id.empty()) {
        reject("command_id is required");
    } else if (is_sim_control(cmd.verb)) {
        reject("sim-control verbs are handled by the pacing layer");
    } else if (!world_.usv) {
        reject("no USV to uplink from");
    } else if (mug == world_.mugs.end() && uav == world_.uavs.end() && !is_usv) {
        reject("unknown vehicle '" + cmd.target + "'");
    } else {
        switch (cmd.verb) {
            case CommandVerb::SetTargetDepth: {
                if (mug == world_.mugs.end()) { reject("SET_TARGET_DEPTH applies to MUGs only"); break; }
                const double crush = mug->second.params.crush_depth;
                if (!(cmd.value > 0.0 && cmd.value <= crush)) {
                    reject("target depth must be in (0, " + std::to_string(static_cast<int>(crush)) + "] m");
                    break;
                }
                if (world_.mug_location.at(cmd.target).kind == MugLocation::Kind::Bay) {
                    mug->second.target_depth = cmd.value;
                    applied_commands_[cmd.target].insert(cmd.command_id);
                    out.status = CommandStatus::Accepted;
                } else if (world_.mug_location.at(cmd.target).kind == MugLocation::Kind::Carried) {
                    reject("MUG is being carried");
                } else {
                    uplink(CommandStatus::QueuedForUplink);
                }
                break;
            }
            case CommandVerb::SetDropPoint: {
                if (mug == world_.mugs.end()) { reject("SET_DROP_POINT applies to MUGs only"); break; }
                if (world_.mug_location.at(cmd.target).kind != MugLocation::Kind::Bay) { reject("MUG is not in the bay"); break; }
                if (!drop_point_ok(config_.seafloor_depth, config_.coordinator)) { reject("drop point too shallow"); break; }
                auto& deps = world_.coordinator.deployments;
                auto it = std::find_if(deps.begin(), deps.end(), [&](const DeploymentRequest& d) { return d.mug_id == cmd.target; });
                if (it != deps.end()) it->drop_point = cmd.point;
                else deps.push_back({cmd.target, cmd.point, now});
                world_.coordinator.retry_at.erase(std::string(to_string(SortieObjective::Deploy)) + ":" + cmd.target);
                applied_commands_[cmd.target].insert(cmd.command_id);
                out.status = CommandStatus::Accepted;
                break;
            }
            case CommandVerb::RequestRecovery: {
                if (mug == world_.mugs.end()) { reject("REQUEST_RECOVERY applies to MUGs only"); break; }
                const MugLocation::Kind where = world_.mug_location.at(cmd.target).kind;
                if (where != MugLocation::Kind::Water) { reject("MUG is not in the water"); break; }
                // Accepted into the mission plan; the MUG learns of it over the link.
                uplink(CommandStatus::Accepted);
                break;
            }
            case CommandVerb::AbortSortie: {
                if (uav == world_.uavs.end()) { reject("ABORT_SORTIE applies to UAVs only"); break; }
                const UavMode m = uav->second.mode;
                if (m != UavMode::TransitOut && m != UavMode::HoverPickup && m != UavMode::RelayLoiter) {
                    reject(std::string("no abortable sortie (mode ") + std::string(to_string(m)) + ")");
                    break;
                }
                uplink(CommandStatus::QueuedForUplink);
                break;
            }
            case CommandVerb::RetaskUsvTrack: {
                if (!is_usv) { reject("RETASK_USV_TRACK applies to the USV only"); break; }
                apply_command_at(cmd.target, cmd, now);
                out.status = CommandStatus::Accepted;
                break;
            }
            default: reject("unsupported verb"); break;
        }
    }
    submitted_[cmd.command_id] = out;
    json j = event_json(now, "command_submitted", cmd.target);
    j["command_id"] = cmd.command_id;
    j["verb"] = to_string(cmd.verb);
    j["status"] = to_string(out.status);
    if (!out.reason.empty()) j["reason"] = out.reason;
    if (out.acoustic) j["acoustic"] = true;
    log(now, "command_submitted", cmd.target, j.dump());
    return out;
}

void Simulation::emit_state_rows() {
    const double t = world_.sim_time;
    std::vector<std::pair<std::string, json>> rows;
    for (const auto& [id, m] : world_.mugs) {
        json j{{"schema", kTelemetrySchema}, {"row", "state"}, {"t", t}, {"vehicle", id}, {"type", "mug"}};
        j["mode"] = to_string(m.mode);
        j["location"] = world_.mug_location.at(id).kind == MugLocation::Kind::Water  ? "water"
                        : world_.mug_location.at(id).kind == MugLocation::Kind::Bay ? "bay"
                                                                                     : "carried";
        j["truth"] = {{"east", m.kin.position.east}, {"north", m.kin.position.north}, {"depth", m.kin.depth}};
        j["estimate"] = point_json(m.nav.position);
        j["sigma"] = m.nav.sigma;
        j["battery_wh"] = m.battery.charge;
        j["yo_count"] = m.yo_count;
        j["target_depth"] = m.target_depth;
        j["piston_fraction"] = m.vbs.piston_fraction;
        j["queue_depth"] = world_.network.queue_depth(id);
        rows.emplace_back(id, std::move(j));
    }
    for (const auto& [id, u] : world_.uavs) {
        json j{{"schema", kTelemetrySchema}, {"row", "state"}, {"t", t}, {"vehicle", id}, {"type", "uav"}};
        j["mode"] = to_string(u.mode);
        j["truth"] = {{"east", u.position.east}, {"north", u.position.north}, {"altitude", u.altitude}};
        j["estimate"] = point_json(u.position);
        j["sigma"] = 0.0;
        j["battery_wh"] = u.battery.charge;
        j["yo_count"] = 0;
        j["queue_depth"] = world_.network.queue_depth(id);
        if (u.carrying) j["carrying"] = *u.carrying;
        rows.emplace_back(id, std::move(j));
    }
    if (world_.usv) {
        const UsvAgent& s = *world_.usv;
        json j{{"schema", kTelemetrySchema}, {"row", "state"}, {"t", t}, {"vehicle", s.id}, {"type", "usv"}};
        j["mode"] = s.track.empty() ? "STATION_KEEPING" : "TRACK_FOLLOWING";
        j["truth"] = {{"east", s.position.east}, {"north", s.position.north}, {"altitude", s.params.mast_height}};
        j["estimate"] = point_json(s.position);
        j["sigma"] = 0.0;
        j["battery_wh"] = s.battery.charge;
        j["yo_count"] = 0;
        j["queue_depth"] = world_.network.queue_depth(s.id);
        rows.emplace_back(s.id, std::move(j));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [id, j] : rows) sink_->telemetry_line(j.dump());
}

std::string Simulation::telemetry_digest() { return sink_->digest(); }

RunSummary Simulation::summary() const {
    RunSummary s;
    s.scenario = config_.name;
    s.seed = config_.seed;
    if (!fault_.empty()) {
        s.status = "fault";
        s.fault = fault_;
    }
    s.sim_time = world_.sim_time;
    s.ticks = world_.tick;
    for (const auto& [id, m] : world_.mugs) {
        MugSummary ms;
        ms.id = id;
        ms.yo_count = m.yo_count;
        ms.mode = std::string(to_string(m.mode));
        ms.final_charge = m.battery.charge;
        ms.max_depth = m.max_depth_reached;
        ms.deployed_at = m.deployed_at;
        ms.mission_end_at = m.mission_end_at;
        ms.ctd_samples = m.total_samples;
        if (m.deployed_at && m.mission_end_at) {
            ms.endurance_days = (*m.mission_end_at - *m.deployed_at) / 86400.0;
        } else if (m.deployed_at) {
            // Linear projection of the drain so far down to the reserve floor.
            const double elapsed = world_.sim_time - *m.deployed_at;
            const double used = m.battery.initial - m.battery.charge;
            const double usable = m.battery.initial - m.battery.reserve_floor;
            if (elapsed > 0.0 && used > 0.0) {
                ms.endurance_days = elapsed * usable / used / 86400.0;
                ms.endurance_projected = true;
            }
        }
        s.mugs.push_back(ms);
        s.final_charge[id] = m.battery.charge;
    }
    for (const auto& [id, u] : world_.uavs) s.final_charge[id] = u.battery.charge;
    if (world_.usv) s.final_charge[world_.usv->id] = world_.usv->battery.charge;
    s.messages = world_.network.conservation();
    s.duplicates_suppressed = duplicates_;
    s.sorties_launched = world_.coordinator.sorties_launched;
    s.sorties_deferred = world_.coordinator.deferrals;
    s.sorties_completed = sorties_completed_;
    s.sorties_aborted = sorties_aborted_;
    s.pickups_failed = pickups_failed_;
    s.emergency_landings = emergency_landings_;
    s.reserve_violations = reserve_violations_;
    s.min_dock_margin_wh = dock_margins_.empty() ? 0.0 : *std::min_element(dock_margins_.begin(), dock_margins_.end());

    double final_total = 0.0;
    for (const auto& [id, m] : world_.mugs) final_total += m.battery.charge;
    for (const auto& [id, u] : world_.uavs) final_total += u.battery.charge;
    if (world_.usv) final_total += world_.usv->battery.charge;
    s.energy.store_delta = final_total - initial_total_;
    s.energy.harvested = harvested_;
    s.energy.consumed = consumed_;
    s.energy.residual = s.energy.store_delta - (harvested_ - consumed_);
    s.energy.relative = std::abs(s.energy.residual) / std::max(1.0, harvested_ + consumed_);
    s.telemetry_rows = sink_->telemetry_rows();
    return s;
}

RunSummary Simulation::run() {
    while (!finished()) step();
    if (fault_.empty()) {
        const RunSummary pre = summary();
        if (!pre.energy.closed()) fault("invariant: global energy audit does not close");
    }
    sink_->flush();
    RunSummary s = summary();
    s.telemetry_digest = sink_->digest();
    if (options_.output_dir) write_summary_files(s, *options_.output_dir);
    return s;
}

std::string summary_json(const RunSummary& s) {
    json mugs = json::array();
    for (const MugSummary& m : s.mugs) {
        json j{{"id", m.id},         {"yo_count", m.yo_count},       {"mode", m.mode},
               {"final_charge_wh", m.final_charge}, {"max_depth_m", m.max_depth}, {"ctd_samples", m.ctd_samples}};
        j["deployed_at"] = m.deployed_at ? json(*m.deployed_at) : json(nullptr);
        j["mission_end_at"] = m.mission_end_at ? json(*m.mission_end_at) : json(nullptr);
        j["endurance_days"] = m.endurance_days ? json(*m.endurance_days) : json(nullptr);
        j["endurance_projected"] = m.endurance_projected;
        mugs.push_back(j);
    }
    json j{{"schema", "oasys.summary/1"},
           {"scenario", s.scenario},
           {"seed", s.seed},
           {"status", s.status},
           {"sim_time", s.sim_time},
           {"ticks", s.ticks},
           {"mugs", mugs},
           {"messages",
            {{"created", s.messages.created},
             {"delivered", s.messages.delivered},
             {"dropped", s.messages.dropped},
             {"in_flight", s.messages.in_flight},
             {"duplicates_suppressed", s.duplicates_suppressed}}},
           {"sorties",
            {{"launched", s.sorties_launched},
             {"completed", s.sorties_completed},
             {"deferred", s.sorties_deferred},
             {"aborted", s.sorties_aborted},
             {"pickups_failed", s.pickups_failed},
             {"emergency_landings", s.emergency_landings},
             {"reserve_violations", s.reserve_violations},
             {"min_dock_margin_wh", s.min_dock_margin_wh}}},
           {"final_charge_wh", s.final_charge},
           {"energy_audit",
            {{"store_delta_wh", s.energy.store_delta},
             {"harvested_wh", s.energy.harvested},
             {"consumed_wh", s.energy.consumed},
             {"residual_wh", s.energy.residual},
             {"relative", s.energy.relative},
             {"closed", s.energy.closed()}}},
           {"telemetry_digest", s.telemetry_digest},
           {"telemetry_rows", s.telemetry_rows}};
    if (!s.fault.empty()) j["fault"] = s.fault;
    return j.dump(2);
}

void write_summary_files(const RunSummary& s, const std::string& directory) {
    namespace fs = std::filesystem;
    const std::string jpath = (fs::path(directory) / "run_summary.json").string();
    std::ofstream js(jpath, std::ios::trunc);
    if (!js) throw std::runtime_error("cannot open '" + jpath + "' for writing");
    js << summary_json(s) << '\n';

    const std::string cpath = (fs::path(directory) / "summary.csv").string();
    std::ofstream csv(cpath, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open '" + cpath + "' for writing");
    csv << "vehicle,type,final_mode,final_charge_wh,yo_count,max_depth_m,endurance_days,endurance_projected\n";
    for (const MugSummary& m : s.mugs) {
        csv << m.id << ",mug," << m.mode << ',' << m.final_charge << ',' << m.yo_count << ',' << m.max_depth << ',';
        if (m.endurance_days) csv << *m.endurance_days;
        csv << ',' << (m.endurance_projected ? "true" : "false") << '\n';
    }
    for (const auto& [id, charge] : s.final_charge) {
        if (std::any_of(s.mugs.begin(), s.mugs.end(), [&](const MugSummary& m) { return m.id == id; })) continue;
        csv << id << ",support,," << charge << ",,,,\n";
    }
    if (!js || !csv) throw std::runtime_error("write failed in '" + directory + "'");
}

}  // namespace oasys
