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
#include <fstream>
#include <memory>
#include <optional>
#include <string>

namespace oasys {

inline constexpr const char* kTelemetrySchema = "oasys.telemetry/1";

// Incremental SHA-256, hex output.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    void update(const std::string& data);
    std::string hex();  // finalizes; further updates are an error

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(const std::string& data);

// Line-delimited JSON output. Every telemetry line feeds the digest whether
// or not it is written to disk.
class TelemetrySink {
public:
    // Files are created under `directory` when given.
    explicit TelemetrySink(const std::optional<std::string>& directory = std::nullopt);

    void telemetry_line(const std::string& line);
    void event_line(const std::string& line);
    std::size_t telemetry_rows() const { return rows_; }
    std::size_t event_rows() const { return events_; }
    const std::string& digest();  // finalized on first call
    void flush();

private:
    std::optional<std::string> directory_;
    std::ofstream telemetry_;
    std::ofstream events_file_;
    Sha256 hash_;
    std::optional<std::string> digest_;
    std::size_t rows_ = 0;
    std::size_t events_ = 0;
};

// Digest of an existing telemetry file, line by line as the sink hashes it.
std::string telemetry_file_digest(const std::string& path);

}  // namespace oasys
