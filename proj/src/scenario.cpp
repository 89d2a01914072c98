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

#include "oasys/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace oasys {

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)), message_(message) {}

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ScenarioError(field, "expected a number, got '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw ScenarioError(field, "expected a number, got '" + t + "'");
    return v;
}

Vec2 parse_point(const std::string& field, const std::string& text) {
    const std::string t = trim(text);
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
        throw ScenarioError(field, "expected 'east,north', got '" + t + "'");
    return {parse_number(field, t.substr(0, comma)), parse_number(field, t.substr(comma + 1))};
}

std::vector<Vec2> parse_points(const std::string& field, const std::string& text) {
    std::vector<Vec2> out;
    std::istringstream in(text);
    std::string token;
    while (in >> token) out.push_back(parse_point(field, token));
    return out;
}

// Reads keys from one section and rejects any it does not know.
class Section {
public:
    Section(std::string name, const ptree& tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        const auto child = tree_.get_child_optional(ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return trim(child->data());
    }
    std::string field(const std::string& key) const { return name_ + "." + key; }

    void number(const std::string& key, double& out) {
        if (auto v = raw(key)) out = parse_number(field(key), *v);
    }
    void count(const std::string& key, std::size_t& out) {
        if (auto v = raw(key)) {
            const double d = parse_number(field(key), *v);
            if (d < 0.0 || d != std::floor(d)) throw ScenarioError(field(key), "expected a non-negative integer");
            out = static_cast<std::size_t>(d);
        }
    }
    void integer(const std::string& key, int& out) {
        if (auto v = raw(key)) {
            const double d = parse_number(field(key), *v);
            if (d != std::floor(d)) throw ScenarioError(field(key), "expected an integer");
            out = static_cast<int>(d);
        }
    }
    void flag(const std::string& key, bool& out) {
        if (auto v = raw(key)) {
            if (*v == "true" || *v == "1" || *v == "yes") out = true;
            else if (*v == "false" || *v == "0" || *v == "no") out = false;
            else throw ScenarioError(field(key), "expected true or false, got '" + *v + "'");
        }
    }
    void point(const std::string& key, Vec2& out) {
        if (auto v = raw(key)) out = parse_point(field(key), *v);
    }
    void text(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = *v;
    }

    void finish() const {
        for (const auto& [key, child] : tree_) {
            (void)child;
            if (!used_.count(key)) throw ScenarioError(field(key), "unknown field");
        }
    }

private:
    std::string name_;
    const ptree& tree_;
    std::set<std::string> used_;
};

// Battery keys shared by every vehicle section. An unset reserve floor keeps
// its default share of the configured capacity.
void read_battery(Section& s, EnergyStore& store) {
    const double reserve_share = store.reserve_floor / store.capacity;
    const bool was_full = store.charge >= store.capacity;
    double capacity = store.capacity;
    s.number("battery_capacity", capacity);
    if (!(capacity > 0.0)) throw ScenarioError(s.field("battery_capacity"), "must be > 0");
    double charge = was_full ? capacity : std::min(store.charge, capacity);
    s.number("battery_charge", charge);
    if (charge < 0.0 || charge > capacity)
        throw ScenarioError(s.field("battery_charge"), "must be within [0, battery_capacity]");
    double voltage = store.voltage_nominal;
    s.number("battery_voltage", voltage);
    double reserve = reserve_share * capacity;
    s.number("reserve_floor", reserve);
    store = EnergyStore::make(capacity, charge, voltage, reserve);
}

void read_simulation(Section& s, ScenarioConfig& c) {
    s.text("name", c.name);
    s.number("duration", c.duration);
    s.number("dt", c.dt);
    if (auto v = s.raw("seed")) {
        const std::string t = *v;
        if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit))
            throw ScenarioError(s.field("seed"), "expected an unsigned 64-bit integer");
        try {
            c.seed = std::stoull(t);
        } catch (const std::exception&) {
            throw ScenarioError(s.field("seed"), "expected an unsigned 64-bit integer");
        }
    }
    s.number("decimation", c.decimation);
    s.flag("stop_when_complete", c.stop_when_complete);
}

void read_environment(Section& s, ScenarioConfig& c) {
    Environment& e = c.env;
    s.number("water_density", e.water_density);
    s.number("gravity", e.gravity);
    s.number("surface_pressure", e.surface_pressure);
    bool deep_set = false;
    if (auto v = s.raw("current")) {
        e.current.surface = parse_point(s.field("current"), *v);
    }
    if (auto v = s.raw("deep_current")) {
        e.current.deep = parse_point(s.field("deep_current"), *v);
        deep_set = true;
    }
    if (!deep_set) e.current.deep = e.current.surface;
    s.number("current_reference_depth", e.current.reference_depth);
    s.number("max_current", e.current.max_speed);
    s.number("solar_peak", e.solar_peak);
    s.number("day_length", e.day_length);
    s.number("seafloor_depth", c.seafloor_depth);
}

void read_comms(Section& s, ScenarioConfig& c) {
    s.number("bandwidth", c.radio.bandwidth);
    s.number("frequency", c.radio.frequency);
    s.count("queue_capacity", c.comms.queue_capacity);
    s.number("acoustic_range", c.comms.acoustic_range);
    s.number("sound_speed", c.comms.sound_speed);
    s.count("max_acoustic_payload", c.comms.max_acoustic_payload);
    s.number("dropout_probability", c.comms.dropout_probability);
    s.number("retransmit_timeout", c.comms.retransmit_timeout);
    s.count("ack_size", c.comms.ack_size);
    s.number("mug_antenna_height", c.mug_antenna_height);
    s.number("uplink_latency", c.uplink_latency);
}

void read_coordinator(Section& s, ScenarioConfig& c) {
    CoordinatorConfig& k = c.coordinator;
    s.flag("enabled", k.enabled);
    s.number("decision_interval", k.decision_interval);
    s.number("reserve_fraction", k.reserve_fraction);
    s.count("relay_threshold", k.relay_threshold);
    s.number("relay_altitude", k.relay_altitude);
    s.number("relay_min_duration", k.relay_min_duration);
    s.number("relay_link_margin", k.relay_link_margin);
    s.number("horizon", k.horizon);
    s.number("forecast_dt", k.forecast_dt);
    s.number("min_drop_depth", k.min_drop_depth);
    s.number("search_allowance", k.search_allowance);
    s.flag("auto_recover", k.auto_recover);
}

MugSpec read_mug(Section& s, const std::string& id) {
    MugSpec m;
    m.id = id;
    MugParams& p = m.params;
    std::string start = "bay";
    s.text("start", start);
    if (start != "bay" && start != "water") throw ScenarioError(s.field("start"), "expected 'bay' or 'water'");
    m.in_bay = start == "bay";
    s.point("position", m.position);
    if (auto v = s.raw("drop_point")) m.drop_point = parse_point(s.field("drop_point"), *v);
    s.number("deploy_at", m.deploy_at);

    double mass = p.body.mass, diameter = p.body.diameter, length = p.body.length, cd = p.body.drag_coefficient;
    s.number("mass", mass);
    s.number("diameter", diameter);
    s.number("length", length);
    s.number("drag_coefficient", cd);
    if (!(diameter > 0.0)) throw ScenarioError(s.field("diameter"), "must be > 0");
    const double added = p.body.added_mass_fraction;
    p.body = MugBody::with_diameter(mass, diameter, length, cd);
    p.body.added_mass_fraction = added;
    s.number("added_mass_fraction", p.body.added_mass_fraction);
    s.number("max_displaced_volume", p.vbs.max_displaced_volume);
    s.number("stroke_length", p.vbs.stroke_length);
    s.number("piston_area", p.vbs.piston_area);
    s.number("neutral_fraction", p.neutral_fraction);
    s.number("target_depth", p.target_depth);
    s.number("crush_depth", p.crush_depth);
    s.number("hotel_power", p.hotel_power);
    s.number("transmit_power", p.transmit_power);
    s.number("gps_noise", p.gps_noise);
    double drift = p.drift_rate * 3600.0;
    s.number("drift_per_hour", drift);
    p.drift_rate = drift / 3600.0;
    s.number("fix_duration", p.fix_duration);
    s.number("transmit_timeout", p.transmit_timeout);
    s.number("sample_interval", p.sample_interval);
    s.number("telemetry_interval", p.telemetry_interval);
    s.number("recovery_fix_interval", p.recovery_fix_interval);
    s.count("report_base_size", p.report_base_size);
    s.count("sample_size", p.sample_size);
    s.number("current_limit", p.motor.current_limit);
    s.number("oil_current_multiplier", p.motor.oil_current_multiplier);
    s.number("bus_voltage", p.motor.bus_voltage_nominal);
    s.number("drivetrain_efficiency", p.motor.drivetrain_efficiency);
    s.number("no_load_current", p.motor.no_load_current);
    s.number("max_piston_speed", p.motor.max_piston_speed);
    s.number("glide_ratio", p.glide.glide_ratio);
    double pitch_deg = p.glide.pitch * 180.0 / M_PI, heading_deg = p.glide.heading * 180.0 / M_PI;
    s.number("glide_pitch_deg", pitch_deg);
    s.number("glide_heading_deg", heading_deg);
    p.glide.pitch = pitch_deg * M_PI / 180.0;
    p.glide.heading = heading_deg * M_PI / 180.0;
    if (auto v = s.raw("ctd_profile")) {
        p.ctd.points.clear();
        std::istringstream in(*v);
        std::string token;
        while (in >> token) {
            std::vector<double> parts;
            std::istringstream t(token);
            std::string part;
            while (std::getline(t, part, ':')) parts.push_back(parse_number(s.field("ctd_profile"), part));
            if (parts.size() != 3) throw ScenarioError(s.field("ctd_profile"), "expected 'depth:temperature:conductivity' entries");
            p.ctd.points.push_back({parts[0], parts[1], parts[2]});
        }
    }
    p.battery.voltage_nominal = p.motor.bus_voltage_nominal;
    read_battery(s, p.battery);
    return m;
}

UavSpec read_uav(Section& s, const std::string& id) {
    UavSpec u;
    u.id = id;
    UavParams& p = u.params;
    s.number("hover_power", p.power.hover_power);
    s.number("cruise_power", p.power.cruise_power);
    s.number("cruise_speed", p.power.cruise_speed);
    s.number("payload_power_multiplier", p.power.payload_power_multiplier);
    s.number("recharge_power", p.power.recharge_power);
    read_battery(s, p.power.battery);
    s.number("capture_radius", p.capture_radius);
    s.number("pickup_time", p.pickup_time);
    s.number("release_time", p.release_time);
    s.number("cruise_altitude", p.cruise_altitude);
    s.number("deck_height", p.deck_height);
    s.number("hover_altitude", p.hover_altitude);
    s.number("dock_radius", p.dock_radius);
    s.number("emergency_floor_fraction", p.emergency_floor_fraction);
    s.integer("max_search_legs", p.max_search_legs);
    return u;
}

UsvSpec read_usv(Section& s, const std::string& id) {
    UsvSpec u;
    u.id = id;
    s.point("position", u.position);
    if (auto v = s.raw("track")) u.track = parse_points(s.field("track"), *v);
    s.number("speed", u.params.speed);
    s.number("hotel_power", u.params.hotel_power);
    s.number("mast_height", u.params.mast_height);
    s.number("dock_reserve_fraction", u.params.dock_reserve_fraction);
    read_battery(s, u.params.battery);
    return u;
}

ScheduledCommand read_command(Section& s, const std::string& id) {
    ScheduledCommand c;
    c.command.command_id = id;
    s.number("at", c.at);
    c.command.issued_at = c.at;
    s.text("target", c.command.target);
    std::string verb;
    s.text("verb", verb);
    const auto parsed = parse_verb(verb);
    if (!parsed) throw ScenarioError(s.field("verb"), "unknown verb '" + verb + "'");
    c.command.verb = *parsed;
    s.number("value", c.command.value);
    s.point("point", c.command.point);
    if (auto v = s.raw("track")) c.command.track = parse_points(s.field("track"), *v);
    return c;
}

void read_faults(Section& s, ScenarioConfig& c) {
    std::optional<std::string> at = s.raw("forced_sortie_at");
    ForcedSortie f;
    s.text("forced_sortie_uav", f.uav_id);
    s.point("forced_sortie_station", f.station);
    s.number("forced_sortie_duration", f.duration);
    if (at) {
        f.at = parse_number(s.field("forced_sortie_at"), *at);
        c.faults.forced_sortie = f;
    }
}

template <typename T>
void check_unique(std::set<std::string>& ids, const std::vector<T>& specs, const std::string& kind) {
    for (const T& s : specs) {
        if (s.id.empty()) throw ScenarioError(kind, "vehicle id must not be empty");
        if (s.id == "sim") throw ScenarioError(kind + ":" + s.id, "id 'sim' is reserved");
        if (!ids.insert(s.id).second) throw ScenarioError(kind + ":" + s.id, "duplicate vehicle id");
    }
}

void rethrow_as(const std::string& field, const std::function<void()>& check) {
    try {
        check();
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(field, e.what());
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw ScenarioError("simulation.dt", "must be > 0");
    if (!mugs.empty() && dt > 10.0) throw ScenarioError("simulation.dt", "must be <= 10 s when MUGs are simulated");
    if (duration < 0.0) throw ScenarioError("simulation.duration", "must be >= 0");
    if (duration > 0.0 && duration < dt) throw ScenarioError("simulation.duration", "must be 0 or >= dt");
    if (!(decimation >= dt)) throw ScenarioError("simulation.decimation", "must be >= dt");
    rethrow_as("environment", [&] { env.validate(); });
    if (!(seafloor_depth > 0.0)) throw ScenarioError("environment.seafloor_depth", "must be > 0");
    rethrow_as("comms", [&] { comms.validate(); });
    if (!(radio.bandwidth > 0.0)) throw ScenarioError("comms.bandwidth", "must be > 0");
    if (!(mug_antenna_height > 0.0)) throw ScenarioError("comms.mug_antenna_height", "must be > 0");
    if (uplink_latency < 0.0) throw ScenarioError("comms.uplink_latency", "must be >= 0");
    rethrow_as("coordinator", [&] { coordinator.validate(); });

    std::set<std::string> ids;
    check_unique(ids, mugs, "mug");
    check_unique(ids, uavs, "uav");
    if (usv) check_unique(ids, std::vector<UsvSpec>{*usv}, "usv");
    if (!usv && (!uavs.empty() || std::any_of(mugs.begin(), mugs.end(), [](const MugSpec& m) { return m.in_bay; })))
        throw ScenarioError("usv", "a USV is required for UAVs or MUGs that start in the bay");

    for (const MugSpec& m : mugs) {
        const std::string sec = "mug:" + m.id;
        rethrow_as(sec, [&] { m.params.validate(); });
        if (m.params.target_depth > m.params.crush_depth)
            throw ScenarioError(sec + ".target_depth", "must not exceed crush_depth");
        if (m.deploy_at < 0.0) throw ScenarioError(sec + ".deploy_at", "must be >= 0");
        if (m.drop_point && !m.in_bay) throw ScenarioError(sec + ".drop_point", "only applies to a MUG that starts in the bay");
        if (m.drop_point && !drop_point_ok(seafloor_depth, coordinator))
            throw ScenarioError(sec + ".drop_point", "seafloor depth " + std::to_string(seafloor_depth) +
                                                        " m is shallower than coordinator.min_drop_depth " +
                                                        std::to_string(coordinator.min_drop_depth) + " m");
    }
    for (const UavSpec& u : uavs) rethrow_as("uav:" + u.id, [&] { u.params.validate(); });
    if (usv) rethrow_as("usv:" + usv->id, [&] { usv->params.validate(); });

    for (const ScheduledCommand& c : commands) {
        const std::string sec = "command:" + c.command.command_id;
        if (c.at < 0.0) throw ScenarioError(sec + ".at", "must be >= 0");
        if (is_sim_control(c.command.verb)) {
            if (c.command.verb == CommandVerb::SetSimSpeed && !(c.command.value > 0.0))
                throw ScenarioError(sec + ".value", "speed factor must be > 0");
            continue;
        }
        if (!ids.count(c.command.target)) throw ScenarioError(sec + ".target", "unknown vehicle '" + c.command.target + "'");
    }

    if (faults.forced_sortie) {
        const ForcedSortie& f = *faults.forced_sortie;
        if (f.at < 0.0) throw ScenarioError("fault_injection.forced_sortie_at", "must be >= 0");
        if (!std::any_of(uavs.begin(), uavs.end(), [&](const UavSpec& u) { return u.id == f.uav_id; }))
            throw ScenarioError("fault_injection.forced_sortie_uav", "unknown uav '" + f.uav_id + "'");
        if (f.duration < 0.0) throw ScenarioError("fault_injection.forced_sortie_duration", "must be >= 0");
    }
}

ScenarioConfig load_scenario(const std::string& text) {
    ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ScenarioError("", "parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }
    // The INI reader drops sections without keys; an empty [uav:x] still
    // declares a vehicle with default parameters.
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (t.size() < 2 || t.front() != '[' || t.back() != ']') continue;
            const std::string name = trim(t.substr(1, t.size() - 2));
            if (tree.find(name) == tree.not_found()) tree.push_back({name, ptree()});
        }
    }

    ScenarioConfig c;
    for (const auto& [name, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ScenarioError(name, "key outside of any section");
        const auto colon = name.find(':');
        const std::string kind = name.substr(0, colon);
        const std::string id = colon == std::string::npos ? std::string() : trim(name.substr(colon + 1));
        const bool keyed = kind == "mug" || kind == "uav" || kind == "usv" || kind == "command";
        if (keyed && id.empty()) throw ScenarioError(name, "section needs an id, e.g. [" + kind + ":name]");
        if (!keyed && colon != std::string::npos) throw ScenarioError(name, "unknown section");
        Section s(name, body);
        if (kind == "simulation") read_simulation(s, c);
        else if (kind == "environment") read_environment(s, c);
        else if (kind == "comms") read_comms(s, c);
        else if (kind == "coordinator") read_coordinator(s, c);
        else if (kind == "fault_injection") read_faults(s, c);
        else if (kind == "mug") c.mugs.push_back(read_mug(s, id));
        else if (kind == "uav") c.uavs.push_back(read_uav(s, id));
        else if (kind == "usv") {
            if (c.usv) throw ScenarioError(name, "at most one USV is supported");
            c.usv = read_usv(s, id);
        } else if (kind == "command") c.commands.push_back(read_command(s, id));
        else throw ScenarioError(name, "unknown section");
        s.finish();
    }
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(c.mugs.begin(), c.mugs.end(), by_id);
    std::sort(c.uavs.begin(), c.uavs.end(), by_id);
    std::stable_sort(c.commands.begin(), c.commands.end(),
                     [](const ScheduledCommand& a, const ScheduledCommand& b) { return a.at < b.at; });
    c.validate();
    return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return load_scenario(text.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(e.field(), e.message() + " (in " + path + ")");
    }
}

}  // namespace oasys
