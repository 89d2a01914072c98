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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "oasys/comms.hpp"
#include "support.hpp"

using namespace oasys;
using oasys::testing::Gen;

namespace {

RadioNode make_node(const std::string& id, Vec2 pos, double height, double depth = 0.0) {
    RadioNode n;
    n.id = id;
    n.geometry.position = pos;
    n.geometry.antenna_height = depth > 0.0 ? 0.0 : height;
    n.geometry.depth = depth;
    return n;
}

NodeGeometry geo(Vec2 pos, double height, double depth = 0.0) {
    NodeGeometry g;
    g.position = pos;
    g.antenna_height = height;
    g.depth = depth;
    return g;
}

}  // namespace

TEST(Horizon, Examples) {
    EXPECT_EQ(radio_horizon(0.0, 0.0), 0.0);
    EXPECT_NEAR(radio_horizon(0.1, 50.0), 26373.0, 1.0);
    EXPECT_NEAR(radio_horizon(0.1, 2.0), 6178.0, 1.0);
    EXPECT_THROW(radio_horizon(-1.0, 0.0), std::invalid_argument);
}

TEST(Link, SubmergedMugHasNoRf) {
    const RadioNode mug = make_node("mug", {0, 0}, 0.1, 1.0);
    const RadioNode usv = make_node("usv", {1, 0}, 2.0);
    EXPECT_FALSE(link_available(mug, usv).available);
}

TEST(Link, MugToUsvRange) {
    const RadioNode usv = make_node("usv", {0, 0}, 2.0);
    EXPECT_TRUE(link_available(make_node("mug", {5000, 0}, 0.1), usv).available);
    EXPECT_FALSE(link_available(make_node("mug", {7000, 0}, 0.1), usv).available);
}

TEST(Link, MugToRelayingUav) {
    const RadioNode uav = make_node("uav", {0, 0}, 50.0);
    EXPECT_TRUE(link_available(make_node("mug", {20000, 0}, 0.1), uav).available);
}

TEST(Link, UnpoweredNodeIsDown) {
    RadioNode a = make_node("a", {0, 0}, 2.0);
    a.geometry.powered = false;
    EXPECT_FALSE(link_available(a, make_node("b", {10, 0}, 2.0)).available);
}

TEST(Acoustic, RangeAndLatency) {
    CommsConfig cfg;
    RadioNode a = make_node("a", {0, 0}, 0.0, 10.0);
    a.params.underwater_capable = true;
    RadioNode b = a;
    b.id = "b";
    AcousticResult r = acoustic_command(a, b, 24, 1.0, cfg);
    EXPECT_TRUE(r.delivered);
    EXPECT_EQ(r.latency_ticks, 1u);
    b.geometry.position = {299, 0};
    r = acoustic_command(a, b, 24, 1.0, cfg);
    EXPECT_TRUE(r.delivered);
    EXPECT_EQ(r.latency_ticks, 1u);
    b.geometry.position = {301, 0};
    EXPECT_FALSE(acoustic_command(a, b, 24, 1.0, cfg).delivered);
    EXPECT_THROW(acoustic_command(a, b, 33, 1.0, cfg), std::invalid_argument);
}

TEST(Acoustic, NeedsModemsAtBothEnds) {
    RadioNode a = make_node("a", {0, 0}, 0.0, 10.0);
    a.params.underwater_capable = true;
    RadioNode b = make_node("b", {10, 0}, 2.0);
    EXPECT_FALSE(acoustic_command(a, b, 24, 1.0, CommsConfig{}).delivered);
}

TEST(Oracle, Examples) {
    std::vector<RadioNode> co{make_node("a", {0, 0}, 2), make_node("b", {0, 0}, 2), make_node("c", {0, 0}, 2)};
    EXPECT_EQ(connectivity_oracle(co).size(), 6u);

    std::vector<RadioNode> relay{make_node("mug", {20000, 0}, 0.1), make_node("usv", {0, 0}, 2.0),
                                 make_node("uav", {10000, 0}, 50.0)};
    EXPECT_FALSE(link_available(relay[0], relay[1]).available);
    const auto pairs = connectivity_oracle(relay);
    EXPECT_TRUE(pairs.count({"mug", "usv"}));
    relay.pop_back();
    EXPECT_FALSE(connectivity_oracle(relay).count({"mug", "usv"}));

    std::vector<RadioNode> wet{make_node("a", {0, 0}, 0, 5), make_node("b", {1, 0}, 0, 5)};
    EXPECT_TRUE(connectivity_oracle(wet).empty());
}

TEST(Oracle, RemovingUavStrictlyShrinksRelayFixture) {
    std::vector<RadioNode> with{make_node("mug", {20000, 0}, 0.1), make_node("usv", {0, 0}, 2.0),
                                make_node("uav", {10000, 0}, 50.0)};
    const auto full = connectivity_oracle(with);
    with.pop_back();
    const auto reduced = connectivity_oracle(with);
    std::set<NodePair> reduced_no_uav;
    for (const auto& p : full)
        if (p.first != "uav" && p.second != "uav") reduced_no_uav.insert(p);
    EXPECT_TRUE(std::includes(reduced_no_uav.begin(), reduced_no_uav.end(), reduced.begin(), reduced.end()));
    EXPECT_LT(reduced.size(), reduced_no_uav.size());
}

TEST(Network, SingleMessageSameTick) {
    Network net;
    net.add_node("a", {});
    net.add_node("b", {});
    net.set_geometry("a", geo({0, 0}, 2));
    net.set_geometry("b", geo({100, 0}, 2));
    std::mt19937_64 rng(1);
    net.send("a", "b", MessageKind::Telemetry, 1200, {}, 0.0);
    const CommsStepReport r = net.step(0.0, 1.0, rng);
    ASSERT_EQ(r.deliveries.size(), 1u);
    EXPECT_EQ(r.deliveries[0].msg.hops, (std::vector<NodeId>{"a", "b"}));
}

TEST(Network, BandwidthLimitsPerTick) {
    Network net;
    net.add_node("a", {});
    net.add_node("b", {});
    net.set_geometry("a", geo({0, 0}, 2));
    net.set_geometry("b", geo({100, 0}, 2));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 3; ++i) net.send("a", "b", MessageKind::Telemetry, 1200, {}, 0.0);
    const CommsStepReport r = net.step(0.0, 1.0, rng);
    EXPECT_EQ(r.deliveries.size(), 2u);
    for (const auto& [k, bytes] : r.bytes_per_link) EXPECT_LE(bytes, 2400.0);
}

TEST(Network, NoLinksLeavesQueuesAlone) {
    Network net;
    net.add_node("a", {});
    net.add_node("b", {});
    net.set_geometry("a", geo({0, 0}, 2));
    net.set_geometry("b", geo({100000, 0}, 2));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 4; ++i) net.send("a", "b", MessageKind::Telemetry, 100, {}, 0.0);
    const CommsStepReport r = net.step(0.0, 1.0, rng);
    EXPECT_TRUE(r.deliveries.empty());
    EXPECT_EQ(net.queue_depth("a"), 4u);
}

TEST(Network, StoreAndCarryThroughUav) {
    Network net;
    RadioParams mug_radio;
    RadioParams uav_radio;
    uav_radio.store_carry = true;
    net.add_node("mug", mug_radio);
    net.add_node("usv", {});
    net.add_node("uav", uav_radio);
    net.set_geometry("mug", geo({35000, 0}, 0.1));
    net.set_geometry("usv", geo({0, 0}, 2.0));
    net.set_geometry("uav", geo({35000, 0}, 50.0));  // overhead the MUG, out of USV range
    ASSERT_FALSE(net.link("uav", "usv").available);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) net.send("mug", "usv", MessageKind::Telemetry, 48, {}, 0.0);
    double t = 0.0;
    for (int i = 0; i < 3; ++i, t += 1.0) net.step(t, 1.0, rng);
    EXPECT_EQ(net.pending_to("uav", "usv"), 10u);
    EXPECT_EQ(net.pending_to("mug", "usv"), 0u);

    net.set_geometry("uav", geo({100, 0}, 2.0));  // back on deck
    std::vector<Delivery> got;
    for (int i = 0; i < 3; ++i, t += 1.0) {
        const auto r = net.step(t, 1.0, rng);
        for (const auto& d : r.deliveries)
            if (d.msg.kind == MessageKind::Telemetry) got.push_back(d);
    }
    ASSERT_EQ(got.size(), 10u);
    for (const auto& d : got) EXPECT_EQ(d.msg.hops, (std::vector<NodeId>{"mug", "uav", "usv"}));
}

TEST(Network, AcousticCommandArrivesAfterLatency) {
    Network net;
    RadioParams uw;
    uw.underwater_capable = true;
    net.add_node("usv", uw);
    net.add_node("mug", uw);
    net.set_geometry("usv", geo({0, 0}, 2.0));
    net.set_geometry("mug", geo({200, 0}, 0.0, 50.0));
    std::mt19937_64 rng(1);
    const AcousticResult a = net.send_acoustic("usv", "mug", 24, {}, 0.0, 1.0);
    ASSERT_TRUE(a.delivered);
    const auto r = net.step(0.0, 1.0, rng);
    ASSERT_EQ(r.deliveries.size(), 1u);
    EXPECT_TRUE(r.deliveries[0].acoustic);
}

// Deliverability in a frozen geometry must match the brute-force oracle.
TEST(NetworkProperty, DeliverabilityMatchesOracle) {
    int nonempty = 0, relayed = 0;
    for (int c = 0; c < 1000; ++c) {
        Gen g(oasys::testing::case_seed(77, c));
        const int n = g.integer(2, 5);
        Network net(CommsConfig{});
        std::vector<RadioNode> nodes;
        for (int i = 0; i < n; ++i) {
            const std::string id = "n" + std::to_string(i);
            RadioParams p;
            p.bandwidth = 1e9;
            net.add_node(id, p);
            const double kind = g.uniform(0.0, 1.0);
            NodeGeometry gm;
            gm.position = {g.uniform(-30000, 30000), g.uniform(-30000, 30000)};
            if (kind < 0.3) {
                gm.antenna_height = 0.1;
                if (g.coin(0.3)) gm.depth = g.uniform(0.1, 200.0);
            } else if (kind < 0.6) {
                gm.antenna_height = 2.0;
            } else {
                gm.antenna_height = g.uniform(2.0, 120.0);
            }
            gm.powered = g.coin(0.95);
            net.set_geometry(id, gm);
            nodes.push_back(net.node(id));
        }
        const auto oracle = connectivity_oracle(nodes);
        std::map<MessageId, NodePair> sent;
        for (const auto& a : nodes)
            for (const auto& b : nodes)
                if (a.id != b.id) sent[net.send(a.id, b.id, MessageKind::Telemetry, 48, {}, 0.0)] = {a.id, b.id};
        std::mt19937_64 rng(1);
        std::set<NodePair> delivered;
        for (int t = 0; t < 4; ++t)
            for (const Delivery& d : net.step(t, 1.0, rng).deliveries) {
                auto it = sent.find(d.msg.id);
                if (it != sent.end()) {
                    delivered.insert(it->second);
                    if (d.msg.hops.size() == 3) ++relayed;
                }
            }
        ASSERT_EQ(delivered, oracle) << "case " << c;
        if (!oracle.empty()) ++nonempty;
    }
    EXPECT_GT(nonempty, 200);
    EXPECT_GT(relayed, 20);
}

// Moving nodes, dropout and store-carry: accounting invariants per tick.
TEST(NetworkProperty, ConservationBandwidthAndDedup) {
    for (int c = 0; c < 150; ++c) {
        Gen g(oasys::testing::case_seed(91, c));
        CommsConfig cfg;
        cfg.dropout_probability = g.uniform(0.0, 0.3);
        cfg.queue_capacity = static_cast<std::size_t>(g.integer(5, 60));
        cfg.retransmit_timeout = g.uniform(5.0, 60.0);
        Network net(cfg);
        const int n = g.integer(2, 4);
        std::vector<std::string> ids;
        std::map<std::string, double> bw;
        for (int i = 0; i < n; ++i) {
            ids.push_back("v" + std::to_string(i));
            RadioParams p;
            p.bandwidth = g.uniform(50.0, 3000.0);
            p.store_carry = g.coin(0.4);
            bw[ids.back()] = p.bandwidth;
            net.add_node(ids.back(), p);
        }
        std::map<std::string, Vec2> pos, vel;
        for (const auto& id : ids) {
            pos[id] = {g.uniform(-8000, 8000), g.uniform(-8000, 8000)};
            vel[id] = {g.uniform(-20, 20), g.uniform(-20, 20)};
        }
        std::mt19937_64 rng(c);
        std::map<std::string, std::uint64_t> last_seq;
        std::map<std::string, std::set<MessageId>> delivered_at;
        for (int t = 0; t < 200; ++t) {
            for (const auto& id : ids) {
                pos[id] += vel[id];
                const double h = g.coin(0.2) ? 0.0 : g.uniform(0.1, 60.0);
                net.set_geometry(id, geo(pos[id], h, h == 0.0 ? 1.0 : 0.0));
            }
            if (g.coin(0.5)) {
                const auto& a = ids[static_cast<std::size_t>(g.integer(0, n - 1))];
                const auto& b = ids[static_cast<std::size_t>(g.integer(0, n - 1))];
                if (a != b) {
                    const MessageId m = net.send(a, b, MessageKind::Telemetry, static_cast<std::size_t>(g.integer(10, 1500)), {}, t);
                    ASSERT_GT(m.sequence, last_seq[a]);
                    last_seq[a] = m.sequence;
                }
            }
            const CommsStepReport r = net.step(t, 1.0, rng);
            std::map<NodePair, bool> up;
            for (const LinkState& l : r.links) up[{l.a, l.b}] = l.available;
            for (const auto& [k, bytes] : r.bytes_per_link) {
                ASSERT_TRUE(up[k]) << "bytes over a down link";
                ASSERT_LE(bytes, std::min(bw[k.first], bw[k.second]) + 1e-9);
            }
            for (const Transfer& x : r.transfers) {
                const NodePair k = x.from < x.to ? NodePair{x.from, x.to} : NodePair{x.to, x.from};
                ASSERT_TRUE(up[k]);
            }
            for (const Delivery& d : r.deliveries) {
                ASSERT_TRUE(delivered_at[d.at].insert(d.msg.id).second) << "duplicate delivery";
                ASSERT_GE(*d.msg.delivered_at, d.msg.created_at);
                ASSERT_EQ(d.msg.hops.front(), d.msg.id.origin);
                ASSERT_LE(d.msg.hops.size(), 3u);
            }
            const ConservationCounts cc = net.conservation();
            ASSERT_EQ(cc.created, cc.delivered + cc.in_flight + cc.dropped);
            ASSERT_EQ(cc.in_flight, cc.in_flight_observed) << "case " << c << " tick " << t;
        }
    }
}
