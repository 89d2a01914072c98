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
#include <memory>
#include <optional>
#include <string>

#include "oasys/gateway.hpp"

namespace oasys {

struct ServerOptions {
    std::string bind = "127.0.0.1";
    int http_port = 8080;    // 0 picks a free port
    int stream_port = 8081;  // WebSocket; 0 picks a free port
    std::optional<std::string> static_dir;  // served under /
};

// HTTP (GET /snapshot, POST /command, GET /health) plus a WebSocket feed.
//
// WebSocket frames are text JSON. The server sends a snapshot, then one delta
// or heartbeat per tick, acks and a final overflow notice if the client falls
// behind. Clients send {"kind":"command","command":{...}} or {"kind":"resync"}.
class GatewayServer {
public:
    GatewayServer(PacedRunner& runner, ServerOptions options);
    ~GatewayServer();
    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    // Binds both listeners and serves on background threads. Throws on bind failure.
    void start();
    void stop();

    int http_port() const;
    int stream_port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace oasys
