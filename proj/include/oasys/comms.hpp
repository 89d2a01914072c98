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

#include <cstddef>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "oasys/geometry.hpp"
#include "oasys/messages.hpp"

namespace oasys {

struct RadioParams {
    double frequency = 433e6;  // Hz, informational
    double bandwidth = 2400.0; // bytes/s
    bool underwater_capable = false;  // carries an acoustic modem
    bool store_carry = false;         // accepts messages it cannot yet forward
};

struct NodeGeometry {
    Vec2 position{};
    double antenna_height = 0.0;  // m above the surface, 0 when submerged
    double depth = 0.0;           // m below the surface
    bool powered = true;
};

struct QueueEntry {
    Message msg;
    double enqueued_at = 0.0;
    bool retained = false;  // origin copy already handed off, awaiting ack
    double handed_off_at = 0.0;
    double bytes_sent = 0.0;
    NodeId sending_to;
    std::uint64_t arrived_tick = 0;
};

struct RadioNode {
    NodeId id;
    RadioParams params;
    NodeGeometry geometry;
    std::deque<QueueEntry> queue;
    std::set<MessageId> queued_ids;
    std::set<MessageId> seen;  // delivered here, for duplicate suppression
    std::uint64_t next_sequence = 1;
};

struct LinkState {
    NodeId a;
    NodeId b;
    bool available = false;
    double distance = 0.0;
    double horizon = 0.0;
};

struct CommsConfig {
    std::size_t queue_capacity = 10000;
    double acoustic_range = 300.0;      // m
    double sound_speed = 1500.0;        // m/s
    std::size_t max_acoustic_payload = 32;  // bytes
    double dropout_probability = 0.0;
    double retransmit_timeout = 900.0;  // s
    std::size_t ack_size = 16;          // bytes

    void validate() const;
};

// 4/3-earth line-of-sight horizon, metres, for antenna heights in metres.
double radio_horizon(double h1, double h2);

// Horizon-only RF link test. Dropout is applied by Network::step, not here.
LinkState link_available(const RadioNode& a, const RadioNode& b);

struct AcousticResult {
    bool delivered = false;
    std::uint64_t latency_ticks = 0;
    double distance = 0.0;
};

// Short-range acoustic command channel. Throws std::invalid_argument for
// payloads above the command size limit.
AcousticResult acoustic_command(const RadioNode& sender, const RadioNode& receiver, std::size_t payload_size,
                                double dt, const CommsConfig& cfg);

using NodePair = std::pair<NodeId, NodeId>;

// Ordered (src, dst) pairs that can exchange messages over a direct link or
// through a single intermediate, by exhaustive search over link_available.
std::set<NodePair> connectivity_oracle(const std::vector<RadioNode>& nodes);

struct Delivery {
    Message msg;
    NodeId at;
    double time = 0.0;
    bool acoustic = false;
};

struct Transfer {
    MessageId id;
    MessageKind kind = MessageKind::Telemetry;
    NodeId from;
    NodeId to;
    double time = 0.0;
    std::size_t bytes = 0;
};

struct DropEvent {
    MessageId id;
    NodeId at;
    double time = 0.0;
    bool lost = false;  // no copy left anywhere and never delivered
};

struct CommsStepReport {
    std::vector<LinkState> links;
    std::vector<Delivery> deliveries;
    std::vector<Transfer> transfers;
    std::vector<DropEvent> drops;
    std::size_t duplicates_suppressed = 0;
    std::map<NodePair, double> bytes_per_link;
    std::map<NodeId, double> tx_seconds;  // radio-on time per node this tick
};

struct ConservationCounts {
    std::size_t created = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    std::size_t in_flight = 0;           // from the ledger
    std::size_t in_flight_observed = 0;  // distinct undelivered ids found in queues
};

class Network {
public:
    explicit Network(CommsConfig cfg = {});

    void add_node(const NodeId& id, RadioParams params);
    void set_geometry(const NodeId& id, const NodeGeometry& geometry);
    bool has_node(const NodeId& id) const;
    const RadioNode& node(const NodeId& id) const;
    std::vector<RadioNode> nodes() const;
    const CommsConfig& config() const { return cfg_; }

    // Enqueues a new message at `origin` and returns its id.
    MessageId send(const NodeId& origin, const NodeId& destination, MessageKind kind, std::size_t payload_size,
                   MessageBody body, double now, std::vector<DropEvent>* drops = nullptr);

    // Sends a command over the acoustic channel. Returns the channel verdict;
    // a delivered command surfaces in the Delivery list of the step in which
    // its latency elapses.
    AcousticResult send_acoustic(const NodeId& origin, const NodeId& destination, std::size_t payload_size,
                                 MessageBody body, double now, double dt);

    LinkState link(const NodeId& a, const NodeId& b) const;

    CommsStepReport step(double now, double dt, std::mt19937_64& rng);

    // Entries at `id` still waiting for a first hop (excludes retained copies).
    std::size_t pending_handoff(const NodeId& id) const;
    std::size_t queue_depth(const NodeId& id) const;
    std::size_t pending_to(const NodeId& from, const NodeId& destination) const;
    std::size_t pending_bytes_to(const NodeId& from, const NodeId& destination) const;

    ConservationCounts conservation() const;

private:
    struct LedgerEntry {
        int copies = 0;
        bool delivered = false;
        bool dropped = false;
    };

    struct AcousticFlight {
        Message msg;
        std::uint64_t due_tick = 0;
    };

    RadioNode& mutable_node(const NodeId& id);
    void enqueue(RadioNode& node, QueueEntry entry, double now, std::vector<DropEvent>* drops);
    void release_copy(const MessageId& id, const NodeId& at, double now, std::vector<DropEvent>* drops);
    void deliver(RadioNode& node, Message msg, double now, double dt, bool acoustic, CommsStepReport& report);
    const NodeId* route(const RadioNode& node, const Message& msg,
                        const std::map<NodePair, bool>& up) const;

    CommsConfig cfg_;
    std::map<NodeId, RadioNode> nodes_;
    std::map<MessageId, LedgerEntry> ledger_;
    std::vector<AcousticFlight> acoustic_;
    std::uint64_t tick_ = 0;
    std::size_t created_ = 0;
    std::size_t delivered_ = 0;
    std::size_t dropped_ = 0;
};

}  // namespace oasys
