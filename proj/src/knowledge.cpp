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

#include "oasys/knowledge.hpp"

namespace oasys {

void KnowledgeBase::ingest(const Message& msg, double delivered_at) {
    const auto* report = std::get_if<VehicleReport>(&msg.body);
    if (msg.kind != MessageKind::Telemetry || !report) return;
    KnownVehicle v;
    v.report = *report;
    v.received_at = delivered_at;
    v.via = msg.id;
    v.hops = msg.hops.size();
    pending_.emplace_back(delivered_at + latency_, v);
}

void KnowledgeBase::observe_first_hand(const VehicleReport& report, double now) {
    KnownVehicle v;
    v.report = report;
    v.received_at = now;
    v.first_hand = true;
    apply(v);
}

void KnowledgeBase::forget(const std::string& vehicle_id) {
    if (known_.erase(vehicle_id)) ++revision_;
}

bool KnowledgeBase::advance(double now) {
    const std::uint64_t before = revision_;
    // Arrivals are pushed in delivery order with a fixed latency, so the
    // queue is already sorted by visibility time.
    while (!pending_.empty() && pending_.front().first <= now + 1e-9) {
        apply(pending_.front().second);
        pending_.pop_front();
    }
    return revision_ != before;
}

void KnowledgeBase::apply(const KnownVehicle& v) {
    auto it = known_.find(v.report.vehicle_id);
    if (it != known_.end()) {
        // Retransmissions and relayed copies can arrive out of order.
        if (!v.first_hand && v.report.sampled_at < it->second.report.sampled_at) return;
        const KnownVehicle& old = it->second;
        if (old.first_hand == v.first_hand && old.report.sampled_at == v.report.sampled_at &&
            old.report.mode == v.report.mode && old.report.position_estimate == v.report.position_estimate &&
            old.report.battery_wh == v.report.battery_wh && old.report.task == v.report.task)
            return;
    }
    known_[v.report.vehicle_id] = v;
    ++revision_;
}

}  // namespace oasys
