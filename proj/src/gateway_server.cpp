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

#include "oasys/gateway_server.hpp"

#include <atomic>
#include <deque>
#include <stdexcept>
#include <thread>
#include <variant>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

namespace oasys {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(20);

json error_doc(const std::string& reason) {
    return json{{"schema", kSaSchema}, {"kind", "error"}, {"reason", reason}};
}

// Parses and submits one command document; malformed input never reaches the runner.
std::pair<bool, json> handle_command(PacedRunner& runner, const json& doc) {
    auto parsed = parse_command(doc);
    if (auto* err = std::get_if<std::string>(&parsed)) {
        CommandAck ack;
        if (doc.is_object() && doc.contains("command_id") && doc["command_id"].is_string())
            ack.command_id = doc["command_id"].get<std::string>();
        ack.status = CommandStatus::Rejected;
        ack.reason = *err;
        return {false, ack_json(ack)};
    }
    return {true, ack_json(runner.submit(std::get<OperatorCommand>(parsed)))};
}

class Session : public std::enable_shared_from_this<Session> {
public:
    Session(tcp::socket socket, PacedRunner& runner, net::thread_pool& workers)
        : ws_(std::move(socket)), timer_(ws_.get_executor()), runner_(runner), workers_(workers) {}

    void start() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->sub_ = self->runner_.subscribe();
            self->read();
            self->pump();
        });
    }

    void shutdown() {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            self->stopping_ = true;
            self->timer_.cancel();
            if (self->sub_) self->sub_->close();
            beast::error_code ec;
            beast::get_lowest_layer(self->ws_).socket().close(ec);
        });
    }

private:
    void read() {
        ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->stopping_ = true;
                if (self->sub_) self->sub_->close();
                self->timer_.cancel();
                return;
            }
            const std::string text = beast::buffers_to_string(self->in_.data());
            self->in_.consume(self->in_.size());
            self->on_message(text);
            self->read();
        });
    }

    void on_message(const std::string& text) {
        const json doc = json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
            enqueue(error_doc("expected a JSON object with a 'kind'").dump());
            return;
        }
        const std::string kind = doc["kind"].get<std::string>();
        if (kind == "resync") {
            if (sub_) sub_->close();
            sub_ = runner_.subscribe();
        } else if (kind == "command") {
            if (!doc.contains("command")) {
                enqueue(error_doc("command message needs a 'command' object").dump());
                return;
            }
            // Submission can wait for the next tick boundary; keep the IO thread free.
            net::post(workers_, [self = shared_from_this(), cmd = doc["command"]] {
                std::string reply = handle_command(self->runner_, cmd).second.dump();
                net::post(self->ws_.get_executor(), [self, reply = std::move(reply)] { self->enqueue(reply); });
            });
        } else {
            enqueue(error_doc("unknown kind '" + kind + "'").dump());
        }
    }

    void enqueue(std::string doc) {
        outbox_.push_back(std::move(doc));
        pump();
    }

    void pump() {
        if (writing_ || stopping_ || !sub_) return;
        std::optional<std::string> next;
        if (!outbox_.empty()) {
            next = std::move(outbox_.front());
            outbox_.pop_front();
        } else {
            next = sub_->try_pop();
        }
        if (next) {
            writing_ = true;
            current_ = std::move(*next);
            ws_.text(true);
            ws_.async_write(net::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
                self->writing_ = false;
                if (ec) {
                    self->stopping_ = true;
                    if (self->sub_) self->sub_->close();
                    return;
                }
                self->pump();
            });
            return;
        }
        if (sub_->overflowed()) {
            stopping_ = true;
            ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, "overflow"),
                            [self = shared_from_this()](beast::error_code) {});
            return;
        }
        timer_.expires_after(kPollInterval);
        timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
            if (!ec) self->pump();
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    PacedRunner& runner_;
    net::thread_pool& workers_;
    std::shared_ptr<UpdateFeed::Subscription> sub_;
    beast::flat_buffer in_;
    std::deque<std::string> outbox_;
    std::string current_;
    bool writing_ = false;
    bool stopping_ = false;
};

}  // namespace

struct GatewayServer::Impl {
    Impl(PacedRunner& r, ServerOptions o) : runner(r), options(std::move(o)), acceptor(io) {}

    PacedRunner& runner;
    ServerOptions options;
    httplib::Server http;
    std::thread http_thread;
    int http_port = 0;

    net::io_context io;
    tcp::acceptor acceptor;
    net::thread_pool workers{2};
    std::thread io_thread;
    int stream_port = 0;
    std::mutex sessions_mu;
    std::vector<std::weak_ptr<Session>> sessions;
    std::atomic<bool> running{false};

    void accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            auto s = std::make_shared<Session>(std::move(socket), runner, workers);
            {
                std::lock_guard lk(sessions_mu);
                sessions.push_back(s);
            }
            s->start();
            accept();
        });
    }

    void routes() {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"}, {"Cache-Control", "no-store"}});
        http.Get("/snapshot", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(runner.snapshot().dump(), "application/json");
        });
        http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            json h = runner.health();
            h["stream_port"] = stream_port;
            res.set_content(h.dump(), "application/json");
        });
        http.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
            const json doc = json::parse(req.body, nullptr, false);
            if (doc.is_discarded()) {
                res.status = 400;
                CommandAck ack;
                ack.reason = "body is not valid JSON";
                res.set_content(ack_json(ack).dump(), "application/json");
                return;
            }
            auto [ok, ack] = handle_command(runner, doc);
            res.status = ok ? 200 : 400;
            res.set_content(ack.dump(), "application/json");
        });
        http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        if (options.static_dir && !http.set_mount_point("/", *options.static_dir))
            throw std::runtime_error("static directory not found: " + *options.static_dir);
    }
};

GatewayServer::GatewayServer(PacedRunner& runner, ServerOptions options)
    : impl_(std::make_unique<Impl>(runner, std::move(options))) {}

GatewayServer::~GatewayServer() { stop(); }

void GatewayServer::start() {
    Impl& m = *impl_;
    if (m.running) return;
    m.routes();
    m.http_port = m.options.http_port == 0 ? m.http.bind_to_any_port(m.options.bind)
                                           : (m.http.bind_to_port(m.options.bind, m.options.http_port)
                                                  ? m.options.http_port
                                                  : -1);
    if (m.http_port <= 0)
        throw std::runtime_error("cannot bind HTTP to " + m.options.bind + ":" + std::to_string(m.options.http_port));

    const tcp::endpoint ep(net::ip::make_address(m.options.bind), static_cast<unsigned short>(m.options.stream_port));
    m.acceptor.open(ep.protocol());
    m.acceptor.set_option(net::socket_base::reuse_address(true));
    m.acceptor.bind(ep);
    m.acceptor.listen();
    m.stream_port = m.acceptor.local_endpoint().port();

    m.running = true;
    m.accept();
    m.http_thread = std::thread([&m] { m.http.listen_after_bind(); });
    m.io_thread = std::thread([&m] { m.io.run(); });
    m.http.wait_until_ready();
}

void GatewayServer::stop() {
    Impl& m = *impl_;
    if (!m.running.exchange(false)) return;
    m.http.stop();
    if (m.http_thread.joinable()) m.http_thread.join();
    net::post(m.io, [&m] {
        beast::error_code ec;
        m.acceptor.close(ec);
    });
    {
        std::lock_guard lk(m.sessions_mu);
        for (auto& w : m.sessions)
            if (auto s = w.lock()) s->shutdown();
    }
    m.workers.join();
    // Let sessions finish their close handlers, then stop.
    net::post(m.io, [&m] { m.io.stop(); });
    if (m.io_thread.joinable()) m.io_thread.join();
}

int GatewayServer::http_port() const { return impl_->http_port; }
int GatewayServer::stream_port() const { return impl_->stream_port; }

}  // namespace oasys
