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

#include "oasys/comms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oasys {

namespace {

NodePair key(const NodeId& a, const NodeId& b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

bool is_up(const std::map<NodePair, bool>& up, const NodeId& a, const NodeId& b) {
    auto it = up.find(key(a, b));
    return it != up.end() && it->second;
}

Vec3 rf_point(const NodeGeometry& g) { return {g.position.east, g.position.north, g.antenna_height}; }
Vec3 acoustic_point(const NodeGeometry& g) { return {g.position.east, g.position.north, -g.depth}; }

}  // namespace

void CommsConfig::validate() const {
    if (queue_capacity == 0) throw std::invalid_argument("comms.queue_capacity must be > 0");
    if (!(acoustic_range >= 0.0)) throw std::invalid_argument("comms.acoustic_range must be >= 0");
    if (!(sound_speed > 0.0)) throw std::invalid_argument("comms.sound_speed must be > 0");
    if (dropout_probability < 0.0 || dropout_probability > 1.0)
        throw std::invalid_argument("comms.dropout_probability must be in [0, 1]");
    if (!(retransmit_timeout > 0.0)) throw std::invalid_argument("comms.retransmit_timeout must be > 0");
}

double radio_horizon(double h1, double h2) {
    if (h1 < 0.0 || h2 < 0.0) throw std::invalid_argument("radio_horizon: negative antenna height");
    return 3570.0 * (std::sqrt(h1) + std::sqrt(h2));
}

LinkState link_available(const RadioNode& a, const RadioNode& b) {
    LinkState s;
    s.a = a.id;
    s.b = b.id;
    const NodeGeometry& ga = a.geometry;
    const NodeGeometry& gb = b.geometry;
    s.horizon = radio_horizon(ga.antenna_height, gb.antenna_height);
    s.distance = distance(rf_point(ga), rf_point(gb));
    const bool above = ga.depth <= 0.0 && gb.depth <= 0.0 && ga.antenna_height > 0.0 && gb.antenna_height > 0.0;
    s.available = ga.powered && gb.powered && above && s.distance <= s.horizon;
    return s;
}

AcousticResult acoustic_command(const RadioNode& sender, const RadioNode& receiver, std::size_t payload_size,
                                double dt, const CommsConfig& cfg) {
    if (payload_size > cfg.max_acoustic_payload)
        throw std::invalid_argument("acoustic_command: payload exceeds " + std::to_string(cfg.max_acoustic_payload) +
                                    " bytes");
    AcousticResult r;
    r.distance = distance(acoustic_point(sender.geometry), acoustic_point(receiver.geometry));
    const bool capable = sender.params.underwater_capable && receiver.params.underwater_capable &&
                         sender.geometry.powered && receiver.geometry.powered;
    r.delivered = capable && r.distance <= cfg.acoustic_range;
    if (r.delivered) {
        const double ticks = std::ceil(r.distance / cfg.sound_speed / dt);
        r.latency_ticks = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(ticks));
    }
    return r;
}

std::set<NodePair> connectivity_oracle(const std::vector<RadioNode>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<bool>> up(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) up[i][j] = link_available(nodes[i], nodes[j]).available;

    std::set<NodePair> out;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t d = 0; d < n; ++d) {
            if (s == d) continue;
            bool ok = up[s][d];
            for (std::size_t r = 0; r < n && !ok; ++r)
                if (r != s && r != d && up[s][r] && up[r][d]) ok = true;
            if (ok) out.emplace(nodes[s].id, nodes[d].id);
        }
    }
    return out;
}

Network::Network(CommsConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Network::add_node(const NodeId& id, RadioParams params) {
    if (nodes_.count(id)) throw std::invalid_argument("duplicate radio node: " + id);
    if (!(params.bandwidth > 0.0)) throw std::invalid_argument("radio bandwidth must be > 0 for node " + id);
    RadioNode n;
    n.id = id;
    n.params = params;
    nodes_.emplace(id, std::move(n));
}

void Network::set_geometry(const NodeId& id, const NodeGeometry& geometry) {
    RadioNode& n = mutable_node(id);
    n.geometry = geometry;
    if (n.geometry.depth > 0.0) n.geometry.antenna_height = 0.0;
}

bool Network::has_node(const NodeId& id) const { return nodes_.count(id) != 0; }

const RadioNode& Network::node(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("unknown radio node: " + id);
    return it->second;
}

RadioNode& Network::mutable_node(const NodeId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("unknown radio node: " + id);
    return it->second;
}

std::vector<RadioNode> Network::nodes() const {
    std::vector<RadioNode> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(n);
    return out;
}

LinkState Network::link(const NodeId& a, const NodeId& b) const { return link_available(node(a), node(b)); }

void Network::enqueue(RadioNode& node, QueueEntry entry, double now, std::vector<DropEvent>* drops) {
    if (node.queue.size() >= cfg_.queue_capacity) {
        QueueEntry oldest = std::move(node.queue.front());
        node.queue.pop_front();
        node.queued_ids.erase(oldest.msg.id);
        release_copy(oldest.msg.id, node.id, now, drops);
    }
    node.queued_ids.insert(entry.msg.id);
    ++ledger_[entry.msg.id].copies;
    node.queue.push_back(std::move(entry));
}

void Network::release_copy(const MessageId& id, const NodeId& at, double now, std::vector<DropEvent>* drops) {
    auto it = ledger_.find(id);
    if (it == ledger_.end()) return;
    LedgerEntry& e = it->second;
    --e.copies;
    if (e.copies <= 0 && !e.delivered && !e.dropped) {
        e.dropped = true;
        ++dropped_;
        if (drops) drops->push_back({id, at, now, true});
    } else if (drops) {
        drops->push_back({id, at, now, false});
    }
}

MessageId Network::send(const NodeId& origin, const NodeId& destination, MessageKind kind, std::size_t payload_size,
                        MessageBody body, double now, std::vector<DropEvent>* drops) {
    RadioNode& n = mutable_node(origin);
    if (!has_node(destination)) throw std::out_of_range("unknown radio node: " + destination);
    QueueEntry e;
    e.msg.id = {origin, n.next_sequence++};
    e.msg.kind = kind;
    e.msg.payload_size = payload_size;
    e.msg.created_at = now;
    e.msg.destination = destination;
    e.msg.hops = {origin};
    e.msg.body = std::move(body);
    e.enqueued_at = now;
    e.arrived_tick = 0;
    const MessageId id = e.msg.id;
    ++created_;
    enqueue(n, std::move(e), now, drops);
    return id;
}

AcousticResult Network::send_acoustic(const NodeId& origin, const NodeId& destination, std::size_t payload_size,
                                      MessageBody body, double now, double dt) {
    RadioNode& n = mutable_node(origin);
    const AcousticResult r = acoustic_command(n, node(destination), payload_size, dt, cfg_);
    if (!r.delivered) return r;
    AcousticFlight f;
    f.msg.id = {origin, n.next_sequence++};
    f.msg.kind = MessageKind::Command;
    f.msg.payload_size = payload_size;
    f.msg.created_at = now;
    f.msg.destination = destination;
    f.msg.hops = {origin};
    f.msg.body = std::move(body);
    // Flights become due in step() calls; the first call after sending is tick_ + 1.
    f.due_tick = tick_ + r.latency_ticks;
    ++created_;
    ++ledger_[f.msg.id].copies;
    acoustic_.push_back(std::move(f));
    return r;
}

const NodeId* Network::route(const RadioNode& node, const Message& msg,
                             const std::map<NodePair, bool>& up) const {
    const NodeId& dest = msg.destination;
    if (is_up(up, node.id, dest)) return &nodes_.find(dest)->first;
    // At most one relay between origin and destination.
    if (msg.hops.size() >= 2) return nullptr;

    const NodeId* carrier = nullptr;
    for (const auto& [id, other] : nodes_) {
        if (id == node.id || id == dest) continue;
        if (!is_up(up, node.id, id)) continue;
        if (is_up(up, id, dest)) return &id;
        if (!carrier && other.params.store_carry) carrier = &id;
    }
    return carrier;
}

void Network::deliver(RadioNode& node, Message msg, double now, double dt, bool acoustic,
                      CommsStepReport& report) {
    const MessageId id = msg.id;
    auto it = ledger_.find(id);
    if (node.seen.count(id)) {
        ++report.duplicates_suppressed;
    } else {
        node.seen.insert(id);
        msg.delivered_at = now + dt;
        if (it != ledger_.end() && !it->second.delivered) {
            it->second.delivered = true;
            ++delivered_;
        }
        if (msg.kind == MessageKind::Ack) {
            // Clear the retained origin copy.
            const MessageId acked = std::get<Ack>(msg.body).acked;
            auto pos = std::find_if(node.queue.begin(), node.queue.end(),
                                    [&](const QueueEntry& e) { return e.msg.id == acked; });
            if (pos != node.queue.end()) {
                node.queue.erase(pos);
                node.queued_ids.erase(acked);
                release_copy(acked, node.id, now, nullptr);
            }
        }
        report.deliveries.push_back({msg, node.id, now + dt, acoustic});
    }
    if (msg.kind == MessageKind::Telemetry) {
        // Re-ack duplicates too so a retransmitting origin can let go.
        send(node.id, id.origin, MessageKind::Ack, cfg_.ack_size, Ack{id}, now, &report.drops);
        node.queue.back().arrived_tick = tick_;
    }
    // The copy carried over the link is consumed here.
    it = ledger_.find(id);
    if (it != ledger_.end()) --it->second.copies;
}

CommsStepReport Network::step(double now, double dt, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("comms step: dt must be > 0");
    ++tick_;
    CommsStepReport report;

    std::map<NodePair, bool> up;
    std::map<NodePair, double> budget;
    for (auto i = nodes_.begin(); i != nodes_.end(); ++i) {
        for (auto j = std::next(i); j != nodes_.end(); ++j) {
            LinkState s = link_available(i->second, j->second);
            if (s.available && cfg_.dropout_probability > 0.0) {
                std::bernoulli_distribution drop(cfg_.dropout_probability);
                if (drop(rng)) s.available = false;
            }
            const NodePair k{i->first, j->first};
            up[k] = s.available;
            if (s.available)
                budget[k] = std::min(i->second.params.bandwidth, j->second.params.bandwidth) * dt;
            report.links.push_back(std::move(s));
        }
    }

    // Acoustic flights whose latency has elapsed.
    for (auto it = acoustic_.begin(); it != acoustic_.end();) {
        if (it->due_tick <= tick_) {
            Message msg = std::move(it->msg);
            msg.hops.push_back(msg.destination);
            it = acoustic_.erase(it);
            RadioNode& dst = mutable_node(msg.destination);
            deliver(dst, std::move(msg), now, dt, true, report);
        } else {
            ++it;
        }
    }

    for (auto& [id, node] : nodes_) {
        std::set<NodeId> blocked;  // links whose head-of-line message did not finish
        for (std::size_t idx = 0; idx < node.queue.size();) {
            QueueEntry& e = node.queue[idx];
            if (e.retained && now - e.handed_off_at >= cfg_.retransmit_timeout) e.retained = false;
            if (e.retained || e.arrived_tick == tick_) {
                ++idx;
                continue;
            }
            const NodeId* next = route(node, e.msg, up);
            if (!next) {
                e.bytes_sent = 0.0;
                e.sending_to.clear();
                ++idx;
                continue;
            }
            if (e.sending_to != *next) {
                e.bytes_sent = 0.0;
                e.sending_to = *next;
            }
            const NodePair k = key(node.id, *next);
            double& avail = budget[k];
            if (blocked.count(*next) || avail <= 0.0) {
                ++idx;
                continue;
            }
            const double remaining = static_cast<double>(e.msg.payload_size) - e.bytes_sent;
            const double sent = std::min(remaining, avail);
            avail -= sent;
            e.bytes_sent += sent;
            report.bytes_per_link[k] += sent;
            report.tx_seconds[node.id] += sent / node.params.bandwidth;
            if (e.bytes_sent < static_cast<double>(e.msg.payload_size)) {
                blocked.insert(*next);
                ++idx;
                continue;
            }

            const NodeId to = *next;
            Message copy = e.msg;
            copy.hops.push_back(to);
            report.transfers.push_back({copy.id, copy.kind, node.id, to, now, copy.payload_size});

            const bool keep_origin_copy = copy.kind == MessageKind::Telemetry && copy.id.origin == node.id;
            if (keep_origin_copy) {
                e.retained = true;
                e.handed_off_at = now;
                e.bytes_sent = 0.0;
                e.sending_to.clear();
                ++ledger_[copy.id].copies;  // the copy in transit
                ++idx;
            } else {
                // The queued copy moves across the link.
                node.queued_ids.erase(e.msg.id);
                node.queue.erase(node.queue.begin() + static_cast<std::ptrdiff_t>(idx));
            }

            RadioNode& dst = mutable_node(to);
            if (to == copy.destination) {
                deliver(dst, std::move(copy), now, dt, false, report);
            } else if (dst.queued_ids.count(copy.id)) {
                // Relay already holds this message.
                --ledger_[copy.id].copies;
            } else {
                QueueEntry relay;
                const MessageId cid = copy.id;
                relay.msg = std::move(copy);
                relay.enqueued_at = now;
                relay.arrived_tick = tick_;
                dst.queued_ids.insert(cid);
                dst.queue.push_back(std::move(relay));
                // Ledger already counts the transit copy; it now sits in a queue.
                if (dst.queue.size() > cfg_.queue_capacity) {
                    QueueEntry oldest = std::move(dst.queue.front());
                    dst.queue.pop_front();
                    dst.queued_ids.erase(oldest.msg.id);
                    release_copy(oldest.msg.id, dst.id, now, &report.drops);
                }
            }
        }
    }
    return report;
}

std::size_t Network::pending_handoff(const NodeId& id) const {
    const RadioNode& n = node(id);
    return static_cast<std::size_t>(
        std::count_if(n.queue.begin(), n.queue.end(), [](const QueueEntry& e) { return !e.retained; }));
}

std::size_t Network::queue_depth(const NodeId& id) const { return node(id).queue.size(); }

std::size_t Network::pending_to(const NodeId& from, const NodeId& destination) const {
    const RadioNode& n = node(from);
    return static_cast<std::size_t>(std::count_if(n.queue.begin(), n.queue.end(), [&](const QueueEntry& e) {
        return !e.retained && e.msg.destination == destination;
    }));
}

std::size_t Network::pending_bytes_to(const NodeId& from, const NodeId& destination) const {
    std::size_t bytes = 0;
    for (const QueueEntry& e : node(from).queue)
        if (!e.retained && e.msg.destination == destination) bytes += e.msg.payload_size;
    return bytes;
}

ConservationCounts Network::conservation() const {
    ConservationCounts c;
    c.created = created_;
    c.delivered = delivered_;
    c.dropped = dropped_;
    c.in_flight = created_ - delivered_ - dropped_;
    std::set<MessageId> undelivered;
    for (const auto& [id, n] : nodes_)
        for (const QueueEntry& e : n.queue) {
            auto it = ledger_.find(e.msg.id);
            if (it != ledger_.end() && !it->second.delivered) undelivered.insert(e.msg.id);
        }
    for (const AcousticFlight& f : acoustic_) undelivered.insert(f.msg.id);
    c.in_flight_observed = undelivered.size();
    return c;
}

}  // namespace oasys
