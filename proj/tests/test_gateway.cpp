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

#include <chrono>
#include <cmath>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <httplib.h>

#include "oasys/gateway.hpp"
#include "oasys/gateway_server.hpp"
#include "oasys/scenario.hpp"
#include "support.hpp"

using namespace oasys;
using nlohmann::json;
using oasys::testing::load_fixture;

namespace {

const char* kSmall =
    "[simulation]\nduration = 600\nseed = 5\n[environment]\ncurrent = 0,0\n[coordinator]\nenabled = false\n"
    "[usv:usv1]\nposition = 0,0\ntrack = 0,0\nspeed = 0\n[uav:uav1]\n[mug:mug1]\nstart = water\nposition = 2000,0\n";

RunnerOptions unpaced(std::size_t capacity = 1024) {
    RunnerOptions o;
    o.speed = 0.0;
    o.feed_capacity = capacity;
    o.idle_heartbeat = std::chrono::milliseconds(50);
    return o;
}

OperatorCommand sim_cmd(const std::string& id, CommandVerb verb, double value = 0.0) {
    OperatorCommand c;
    c.command_id = id;
    c.target = "sim";
    c.verb = verb;
    c.value = value;
    return c;
}

const json* vehicle(const json& doc, const std::string& id) {
    for (const json& v : doc["vehicles"])
        if (v["id"] == id) return &v;
    return nullptr;
}

std::string parse_error(const json& doc) {
    auto r = parse_command(doc);
    if (auto* e = std::get_if<std::string>(&r)) return *e;
    return "";
}

}  // namespace

TEST(ParseCommand, AcceptsEveryVerbShape) {
    auto depth = parse_command(json{{"command_id", "c1"}, {"target", "mug1"}, {"verb", "SET_TARGET_DEPTH"}, {"value", 150}});
    ASSERT_TRUE(std::holds_alternative<OperatorCommand>(depth));
    EXPECT_DOUBLE_EQ(std::get<OperatorCommand>(depth).value, 150.0);

    auto drop = parse_command(json{{"command_id", "c2"}, {"target", "mug1"}, {"verb", "SET_DROP_POINT"},
                                   {"point", {{"east", 10.0}, {"north", -4.0}}}});
    ASSERT_TRUE(std::holds_alternative<OperatorCommand>(drop));
    EXPECT_DOUBLE_EQ(std::get<OperatorCommand>(drop).point.north, -4.0);

    auto track = parse_command(json{{"command_id", "c3"}, {"target", "usv1"}, {"verb", "RETASK_USV_TRACK"},
                                    {"track", {{0, 0}, {100, 50}}}});
    ASSERT_TRUE(std::holds_alternative<OperatorCommand>(track));
    EXPECT_EQ(std::get<OperatorCommand>(track).track.size(), 2u);

    auto pause = parse_command(json{{"command_id", "c4"}, {"verb", "PAUSE_SIM"}});
    ASSERT_TRUE(std::holds_alternative<OperatorCommand>(pause));
    EXPECT_EQ(std::get<OperatorCommand>(pause).target, "sim");
}

TEST(ParseCommand, RoundTripsThroughJson) {
    OperatorCommand c;
    c.command_id = "rt";
    c.target = "usv1";
    c.verb = CommandVerb::RetaskUsvTrack;
    c.track = {{1.0, 2.0}, {3.0, 4.0}};
    auto back = parse_command(command_json(c));
    ASSERT_TRUE(std::holds_alternative<OperatorCommand>(back));
    const OperatorCommand& b = std::get<OperatorCommand>(back);
    EXPECT_EQ(b.command_id, "rt");
    ASSERT_EQ(b.track.size(), 2u);
    EXPECT_DOUBLE_EQ(b.track[1].north, 4.0);
}

TEST(ParseCommand, Errors) {
    EXPECT_NE(parse_error(json::array()), "");
    EXPECT_NE(parse_error(json{{"target", "mug1"}, {"verb", "REQUEST_RECOVERY"}}).find("command_id"), std::string::npos);
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "mug1"}, {"verb", "SELF_DESTRUCT"}}).find("unknown verb"),
              std::string::npos);
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "mug1"}, {"verb", "REQUEST_RECOVERY"}, {"extra", 1}})
                  .find("extra"),
              std::string::npos);
    EXPECT_NE(parse_error(json{{"schema", "oasys.sa/0"}, {"command_id", "x"}, {"target", "m"}, {"verb", "REQUEST_RECOVERY"}}),
              "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"verb", "REQUEST_RECOVERY"}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "m"}, {"verb", "SET_TARGET_DEPTH"}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "m"}, {"verb", "SET_TARGET_DEPTH"}, {"value", -5}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"verb", "SET_SIM_SPEED"}, {"value", -1}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "usv1"}, {"verb", "PAUSE_SIM"}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "m"}, {"verb", "SET_DROP_POINT"}, {"point", {1}}}), "");
    EXPECT_NE(parse_error(json{{"command_id", "x"}, {"target", "u"}, {"verb", "RETASK_USV_TRACK"}, {"track", json::array()}}),
              "");
}

TEST(Snapshot, AtTimeZeroOnlyFirstHandIsKnown) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced());
    const json s = runner.snapshot();
    EXPECT_EQ(s["schema"], kSaSchema);
    EXPECT_EQ(s["kind"], "snapshot");
    EXPECT_DOUBLE_EQ(s["sim_time"].get<double>(), 0.0);
    EXPECT_FALSE(s.contains("truth"));
    ASSERT_NE(vehicle(s, "usv1"), nullptr);
    EXPECT_TRUE((*vehicle(s, "usv1"))["first_hand"].get<bool>());
    ASSERT_NE(vehicle(s, "uav1"), nullptr);
    // The MUG has not reported yet.
    EXPECT_EQ(vehicle(s, "mug1"), nullptr);
}

TEST(Snapshot, DebugTruthIsOptIn) {
    RunnerOptions o = unpaced();
    o.debug_truth = true;
    PacedRunner runner(load_scenario(kSmall), {}, o);
    const json s = runner.snapshot();
    ASSERT_TRUE(s.contains("truth"));
    EXPECT_EQ(s["truth"]["mugs"][0]["id"], "mug1");
}

TEST(Snapshot, RelayedReportWaitsForTheUplink) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced());
    double delivered = -1.0;
    for (int i = 0; i < 600 && delivered < 0.0; ++i) {
        runner.step();
        runner.inspect([&](const Simulation& sim) {
            for (const LogEvent& e : sim.world().log)
                if (e.kind == "message_delivered" && e.vehicle == "usv1" && e.json.find("\"telemetry\"") != std::string::npos &&
                    e.json.find("mug1") != std::string::npos) {
                    delivered = e.time;
                    break;
                }
        });
    }
    ASSERT_GE(delivered, 0.0);
    EXPECT_EQ(vehicle(runner.snapshot(), "mug1"), nullptr);
    runner.step(59);
    EXPECT_EQ(vehicle(runner.snapshot(), "mug1"), nullptr);
    runner.step(2);
    const json s = runner.snapshot();
    const json* m = vehicle(s, "mug1");
    ASSERT_NE(m, nullptr);
    EXPECT_FALSE((*m)["first_hand"].get<bool>());
    EXPECT_GE((*m)["staleness_s"].get<double>(), 60.0);
}

TEST(Snapshot, KnowledgeGapFixtureShowsTheLastReportNotTheTruth) {
    RunnerOptions o = unpaced();
    o.debug_truth = true;
    PacedRunner runner(load_fixture("knowledge_gap.ini"), {}, o);
    // Run until the MUG has been silent for over an hour and the current has moved it on.
    double gap = 0.0;
    json last;
    for (int i = 0; i < 7800; ++i) {
        runner.step();
        if (i % 60 != 0) continue;
        last = runner.snapshot();
        const json* m = vehicle(last, "mug1");
        if (!m) continue;
        const json& truth = last["truth"]["mugs"][0];
        gap = std::hypot(truth["position"]["east"].get<double>() - (*m)["position"]["east"].get<double>(),
                         truth["position"]["north"].get<double>() - (*m)["position"]["north"].get<double>());
        if (gap >= 1000.0) break;
    }
    ASSERT_GE(gap, 1000.0);
    const json* m = vehicle(last, "mug1");
    ASSERT_NE(m, nullptr);
    EXPECT_GT((*m)["staleness_s"].get<double>(), 1000.0 / 0.3 - 600.0);

    // The operator entry equals what the knowledge base holds, which equals the last delivered report.
    runner.inspect([&](const Simulation& sim) {
        const KnownVehicle& kv = sim.knowledge().vehicles().at("mug1");
        EXPECT_DOUBLE_EQ((*m)["position"]["east"].get<double>(), kv.report.position_estimate.east);
        EXPECT_DOUBLE_EQ((*m)["sampled_at"].get<double>(), kv.report.sampled_at);
        EXPECT_LE(kv.report.sampled_at, kv.received_at);
    });
}

TEST(Deltas, HeartbeatWhenNothingVisibleChanges) {
    Simulation sim(load_scenario(kSmall));
    DeltaTracker tracker;
    tracker.reset(sim);
    // Nothing advanced: the view is unchanged.
    EXPECT_EQ(tracker.next(sim, 1)["kind"], "heartbeat");
    sim.step();
    const json d = tracker.next(sim, 2);
    EXPECT_EQ(d["schema"], kSaSchema);
    EXPECT_EQ(d["seq"], 2);
    EXPECT_TRUE(d["kind"] == "delta" || d["kind"] == "heartbeat");
}

TEST(Deltas, ReplayingDeltasOverASnapshotRebuildsTheView) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced());
    auto sub = runner.subscribe();
    auto first = sub->try_pop();
    ASSERT_TRUE(first);
    json view = json::parse(*first);
    std::map<std::string, json> vehicles;
    for (const json& v : view["vehicles"]) vehicles[v["id"]] = v;
    std::uint64_t seq = view["seq"];
    runner.step(400);
    while (auto doc = sub->try_pop()) {
        const json d = json::parse(*doc);
        EXPECT_EQ(d["seq"].get<std::uint64_t>(), seq + 1);
        seq = d["seq"];
        if (d["kind"] != "delta") continue;
        for (const json& v : d["vehicles"]) vehicles[v["id"]] = v;
        for (const json& id : d["removed"]) vehicles.erase(id.get<std::string>());
    }
    const json now = runner.snapshot();
    ASSERT_EQ(now["vehicles"].size(), vehicles.size());
    for (const json& v : now["vehicles"]) {
        const json& mine = vehicles.at(v["id"]);
        EXPECT_EQ(mine["position"], v["position"]);
        EXPECT_EQ(mine["sampled_at"], v["sampled_at"]);
        EXPECT_EQ(mine["mode"], v["mode"]);
    }
}

TEST(Feed, SlowSubscriberIsCutOffWithANotice) {
    UpdateFeed feed(4);
    auto slow = feed.subscribe("snap");
    auto fast = feed.subscribe("snap");
    for (int i = 0; i < 10; ++i) {
        feed.publish("d" + std::to_string(i));
        while (fast->try_pop()) {
        }
    }
    EXPECT_TRUE(slow->overflowed());
    EXPECT_TRUE(slow->closed());
    auto notice = slow->try_pop();
    ASSERT_TRUE(notice);
    EXPECT_EQ(json::parse(*notice)["kind"], "overflow");
    EXPECT_FALSE(slow->try_pop());
    EXPECT_FALSE(fast->overflowed());
    EXPECT_EQ(feed.subscribers(), 1u);
}

TEST(Feed, ResubscribeStartsWithAFreshSnapshot) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced(2));
    auto sub = runner.subscribe();
    runner.step(10);
    EXPECT_TRUE(sub->overflowed());
    auto again = runner.subscribe();
    auto doc = again->try_pop();
    ASSERT_TRUE(doc);
    const json s = json::parse(*doc);
    EXPECT_EQ(s["kind"], "snapshot");
    EXPECT_DOUBLE_EQ(s["sim_time"].get<double>(), 10.0);
}

TEST(Runner, SimControlIsIdempotentByCommandId) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced());
    EXPECT_EQ(runner.submit(sim_cmd("p1", CommandVerb::PauseSim)).status, CommandStatus::Accepted);
    EXPECT_TRUE(runner.pacing().paused);
    EXPECT_EQ(runner.submit(sim_cmd("r1", CommandVerb::ResumeSim)).status, CommandStatus::Accepted);
    EXPECT_FALSE(runner.pacing().paused);
    // Replaying an old id does not pause again.
    EXPECT_EQ(runner.submit(sim_cmd("p1", CommandVerb::PauseSim)).status, CommandStatus::Accepted);
    EXPECT_FALSE(runner.pacing().paused);
    EXPECT_EQ(runner.submit(sim_cmd("s1", CommandVerb::SetSimSpeed, 20.0)).status, CommandStatus::Accepted);
    EXPECT_DOUBLE_EQ(runner.pacing().speed, 20.0);
    // Sim control never touches the engine log.
    runner.inspect([](const Simulation& sim) { EXPECT_TRUE(sim.world().log.empty() || sim.world().log.back().kind != "command_submitted"); });
}

TEST(Runner, PausedSimulationStillServesSnapshots) {
    RunnerOptions o = unpaced();
    o.start_paused = true;
    PacedRunner runner(load_scenario(kSmall), {}, o);
    auto sub = runner.subscribe();
    runner.start();
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    const json a = runner.snapshot();
    EXPECT_TRUE(a["pacing"]["paused"].get<bool>());
    EXPECT_DOUBLE_EQ(a["sim_time"].get<double>(), 0.0);
    EXPECT_EQ(runner.health()["paused"], true);
    // Idle heartbeats keep flowing while paused.
    ASSERT_TRUE(sub->pop(std::chrono::milliseconds(500)));  // snapshot
    auto hb = sub->pop(std::chrono::milliseconds(500));
    ASSERT_TRUE(hb);
    EXPECT_EQ(json::parse(*hb)["kind"], "heartbeat");

    runner.submit(sim_cmd("go", CommandVerb::ResumeSim));
    for (int i = 0; i < 200 && !runner.health()["finished"].get<bool>(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    runner.stop();
    EXPECT_TRUE(runner.health()["finished"].get<bool>());
}

TEST(Runner, VehicleCommandsAreAckedBetweenTicks) {
    PacedRunner runner(load_scenario(kSmall), {}, unpaced());
    runner.start();
    OperatorCommand c;
    c.command_id = "deep";
    c.target = "mug1";
    c.verb = CommandVerb::SetTargetDepth;
    c.value = 150.0;
    const CommandAck ack = runner.submit(c);
    EXPECT_NE(ack.status, CommandStatus::Rejected) << ack.reason;
    EXPECT_EQ(ack.command_id, "deep");
    c.value = 180.0;
    const CommandAck again = runner.submit(c);
    EXPECT_EQ(again.status, ack.status);
    runner.stop();
}

namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;

class WsClient {
public:
    explicit WsClient(int port) : ws_(io_) {
        net::ip::tcp::resolver resolver(io_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/");
    }
    json read() {
        beast::flat_buffer buf;
        ws_.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    }
    // Skips updates until a document of `kind` arrives.
    json read_kind(const std::string& kind, int limit = 5000) {
        for (int i = 0; i < limit; ++i) {
            json d = read();
            if (d["kind"] == kind) return d;
        }
        return json();
    }
    void send(const json& doc) { ws_.write(net::buffer(doc.dump())); }
    void close() { ws_.close(websocket::close_code::normal); }

private:
    net::io_context io_;
    websocket::stream<net::ip::tcp::socket> ws_;
};

struct LiveGateway {
    explicit LiveGateway(RunnerOptions o = unpaced(), const std::string& text = kSmall)
        : runner(load_scenario(text), {}, o), server(runner, opts()) {
        server.start();
    }
    static ServerOptions opts() {
        ServerOptions s;
        s.http_port = 0;
        s.stream_port = 0;
        return s;
    }
    PacedRunner runner;
    GatewayServer server;
};

}  // namespace

TEST(Server, HttpEndpoints) {
    LiveGateway g;
    httplib::Client http("127.0.0.1", g.server.http_port());
    auto health = http.Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    const json h = json::parse(health->body);
    EXPECT_EQ(h["status"], "ok");
    EXPECT_EQ(h["stream_port"], g.server.stream_port());

    auto snap = http.Get("/snapshot");
    ASSERT_TRUE(snap);
    EXPECT_EQ(json::parse(snap->body)["schema"], kSaSchema);

    const json cmd{{"command_id", "h1"}, {"target", "mug1"}, {"verb", "REQUEST_RECOVERY"}};
    auto ok = http.Post("/command", cmd.dump(), "application/json");
    ASSERT_TRUE(ok);
    EXPECT_EQ(ok->status, 200);
    EXPECT_EQ(json::parse(ok->body)["command_id"], "h1");

    auto bad = http.Post("/command", "{not json", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    auto invalid = http.Post("/command", json{{"command_id", "h2"}, {"verb", "NOPE"}}.dump(), "application/json");
    ASSERT_TRUE(invalid);
    EXPECT_EQ(invalid->status, 400);
    const json ack = json::parse(invalid->body);
    EXPECT_EQ(ack["status"], "rejected");
    EXPECT_EQ(ack["command_id"], "h2");
    g.server.stop();
}

TEST(Server, StreamSendsSnapshotThenUpdatesAndAcks) {
    LiveGateway g;
    WsClient ws(g.server.stream_port());
    const json first = ws.read();
    EXPECT_EQ(first["kind"], "snapshot");
    g.runner.start();
    const json update = ws.read();
    EXPECT_TRUE(update["kind"] == "delta" || update["kind"] == "heartbeat");
    EXPECT_GT(update["seq"].get<std::uint64_t>(), first["seq"].get<std::uint64_t>());

    ws.send(json{{"kind", "command"}, {"command", {{"command_id", "w1"}, {"verb", "PAUSE_SIM"}}}});
    const json ack = ws.read_kind("ack");
    EXPECT_EQ(ack["command_id"], "w1");
    EXPECT_EQ(ack["status"], "accepted");

    ws.send(json{{"kind", "resync"}});
    const json snap = ws.read_kind("snapshot");
    EXPECT_EQ(snap["schema"], kSaSchema);
    EXPECT_TRUE(snap["pacing"]["paused"].get<bool>());

    ws.send(json{{"kind", "dance"}});
    EXPECT_EQ(ws.read_kind("error")["kind"], "error");
    ws.close();
    g.runner.stop();
    g.server.stop();
}

TEST(Server, StreamClosesAnOverflowedClient) {
    std::string text = kSmall;
    text.replace(text.find("duration = 600"), 14, "duration = 20000");
    LiveGateway g(unpaced(1), text);
    WsClient ws(g.server.stream_port());
    for (int i = 0; i < 200 && g.runner.subscribers() == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    ASSERT_EQ(g.runner.subscribers(), 1u);
    // A one-document buffer cannot keep up with an unpaced burst.
    g.runner.step(20000);
    bool saw_overflow = false;
    try {
        for (int i = 0; i < 25000; ++i)
            if (ws.read()["kind"] == "overflow") saw_overflow = true;
    } catch (const boost::system::system_error& e) {
        EXPECT_EQ(e.code(), websocket::error::closed);
    }
    EXPECT_TRUE(saw_overflow);
    g.server.stop();
}
