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

#include "oasys/telemetry.hpp"

#include <filesystem>
#include <stdexcept>

#include <openssl/evp.h>

namespace oasys {

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
    bool done = false;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
    impl_->ctx = EVP_MD_CTX_new();
    if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest init failed");
}

Sha256::~Sha256() { EVP_MD_CTX_free(impl_->ctx); }

void Sha256::update(const std::string& data) {
    if (impl_->done) throw std::logic_error("sha256: update after finalize");
    EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
}

std::string Sha256::hex() {
    if (impl_->done) throw std::logic_error("sha256: already finalized");
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, out, &len);
    impl_->done = true;
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s.push_back(digits[out[i] >> 4]);
        s.push_back(digits[out[i] & 0xf]);
    }
    return s;
}

std::string sha256_hex(const std::string& data) {
    Sha256 h;
    h.update(data);
    return h.hex();
}

TelemetrySink::TelemetrySink(const std::optional<std::string>& directory) : directory_(directory) {
    if (!directory_) return;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(*directory_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + *directory_ + "': " + ec.message());
    const std::string tpath = (fs::path(*directory_) / "telemetry.jsonl").string();
    const std::string epath = (fs::path(*directory_) / "events.jsonl").string();
    telemetry_.open(tpath, std::ios::binary | std::ios::trunc);
    if (!telemetry_) throw std::runtime_error("cannot open '" + tpath + "' for writing");
    events_file_.open(epath, std::ios::binary | std::ios::trunc);
    if (!events_file_) throw std::runtime_error("cannot open '" + epath + "' for writing");
}

void TelemetrySink::telemetry_line(const std::string& line) {
    hash_.update(line);
    hash_.update("\n");
    ++rows_;
    if (telemetry_.is_open()) {
        telemetry_ << line << '\n';
        if (!telemetry_) throw std::runtime_error("write failed: " + *directory_ + "/telemetry.jsonl");
    }
}

void TelemetrySink::event_line(const std::string& line) {
    ++events_;
    if (events_file_.is_open()) {
        events_file_ << line << '\n';
        if (!events_file_) throw std::runtime_error("write failed: " + *directory_ + "/events.jsonl");
    }
}

const std::string& TelemetrySink::digest() {
    if (!digest_) digest_ = hash_.hex();
    return *digest_;
}

void TelemetrySink::flush() {
    if (telemetry_.is_open()) telemetry_.flush();
    if (events_file_.is_open()) events_file_.flush();
}

std::string telemetry_file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    Sha256 h;
    std::string line;
    while (std::getline(in, line)) {
        h.update(line);
        h.update("\n");
    }
    return h.hex();
}

}  // namespace oasys
