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

#include <cstdint>
#include <deque>
#include <map>
#include <string>

#include "oasys/messages.hpp"

namespace oasys {

// Last reported state of one vehicle as mission control knows it.
struct KnownVehicle {
    VehicleReport report;
    double received_at = 0.0;  // delivery time at the USV
    bool first_hand = false;   // observed directly on the USV
    MessageId via{};           // telemetry message that carried it
    std::size_t hops = 0;
};

// Mission-control view built only from delivered telemetry plus what the USV
// sees directly. Relayed reports become visible after the shore uplink latency.
class KnowledgeBase {
public:
    explicit KnowledgeBase(double uplink_latency = 60.0) : latency_(uplink_latency) {}

    // A telemetry message delivered at the USV at `delivered_at`.
    void ingest(const Message& msg, double delivered_at);
    void observe_first_hand(const VehicleReport& report, double now);
    void forget(const std::string& vehicle_id);
    // Makes pending reports visible up to `now`. Returns true if anything changed.
    bool advance(double now);

    const std::map<std::string, KnownVehicle>& vehicles() const { return known_; }
    std::uint64_t revision() const { return revision_; }
    double uplink_latency() const { return latency_; }

private:
    void apply(const KnownVehicle& v);

    double latency_;
    std::map<std::string, KnownVehicle> known_;
    std::deque<std::pair<double, KnownVehicle>> pending_;
    std::uint64_t revision_ = 0;
};

}  // namespace oasys
