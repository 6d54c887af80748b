#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "hapticnav/gateway/session.hpp"

namespace hapticnav::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct GatewayConfig {
    std::string host = "127.0.0.1";
    unsigned short port = 8765;
    int threads = 2;
    SessionConfig session;

    void validate() const {
        if (threads <= 0) throw ConfigError("gateway threads must be positive");
        session.validate();
    }
};

namespace detail {

class Registry;

// One websocket connection = one session. All handlers run on the connection's strand.
class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(websocket::stream<beast::tcp_stream> ws, std::string session_id, const SessionCatalog& catalog,
               const SessionConfig& cfg, Registry& registry)
        : ws_(std::move(ws)),
          timer_(ws_.get_executor()),
          state_(make_session(std::move(session_id))),
          catalog_(catalog),
          cfg_(cfg),
          registry_(registry) {}

    void run(http::request<http::string_body> req, bool path_ok);
    void close();
    const std::string& id() const { return state_.session_id; }
    auto ws_executor() { return ws_.get_executor(); }

private:
    void on_accept(beast::error_code ec);
    void do_read();
    void on_read(beast::error_code ec, std::size_t);
    void schedule_tick();
    void on_tick(beast::error_code ec);
    void send(const ServerMessage& m);
    void do_write();
    void finish();

    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    beast::flat_buffer buffer_;
    SessionState state_;
    const SessionCatalog& catalog_;
    const SessionConfig& cfg_;
    Registry& registry_;
    std::vector<ClientMessage> pending_;
    std::deque<std::string> outbox_;
    bool writing_ = false;
    bool closing_ = false;
    bool finished_ = false;
    bool reject_after_accept_ = false;
    std::chrono::steady_clock::time_point next_tick_;
};

class Registry {
public:
    void add(const std::shared_ptr<Connection>& c) {
        std::lock_guard lock(mu_);
        live_.insert(c);
    }
    void remove(const Connection* c) {
        std::lock_guard lock(mu_);
        for (auto it = live_.begin(); it != live_.end(); ++it) {
            if (it->get() == c) {
                live_.erase(it);
                return;
            }
        }
    }
    std::size_t size() const {
        std::lock_guard lock(mu_);
        return live_.size();
    }
    std::vector<std::shared_ptr<Connection>> snapshot() const {
        std::lock_guard lock(mu_);
        return {live_.begin(), live_.end()};
    }

private:
    mutable std::mutex mu_;
    std::set<std::shared_ptr<Connection>> live_;
};

inline void Connection::run(http::request<http::string_body> req, bool path_ok) {
    registry_.add(shared_from_this());
    reject_after_accept_ = !path_ok;
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, net::bind_executor(ws_.get_executor(), [self = shared_from_this()](beast::error_code ec) {
                         self->on_accept(ec);
                     }));
}

inline void Connection::on_accept(beast::error_code ec) {
    if (ec) return finish();
    if (reject_after_accept_) {
        send(Error{"bad_path", "websocket sessions are served on /session"});
        closing_ = true;
        if (!writing_) close();
        return;
    }
    next_tick_ = std::chrono::steady_clock::now();
    schedule_tick();
    do_read();
}

inline void Connection::do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t n) { self->on_read(ec, n); });
}

inline void Connection::on_read(beast::error_code ec, std::size_t) {
    if (ec) return finish();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
        pending_.push_back(parse_client_message(text));
    } catch (const ProtocolError& e) {
        send(Error{e.code(), e.what()});
    }
    do_read();
}

inline void Connection::schedule_tick() {
    next_tick_ += std::chrono::milliseconds(1000 / cfg_.tick_hz);
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_tick(ec); });
}

inline void Connection::on_tick(beast::error_code ec) {
    if (ec || finished_) return;
    std::vector<ClientMessage> inputs;
    inputs.swap(pending_);
    for (const auto& m : session_tick(state_, inputs, catalog_, cfg_)) send(m);
    schedule_tick();
}

inline void Connection::send(const ServerMessage& m) {
    if (finished_) return;
    outbox_.push_back(to_json_message(m, state_.session_id).dump());
    if (!writing_) do_write();
}

inline void Connection::do_write() {
    if (outbox_.empty()) {
        writing_ = false;
        if (closing_) close();
        return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return self->finish();
        self->outbox_.pop_front();
        self->do_write();
    });
}

inline void Connection::close() {
    if (finished_) return;
    closing_ = true;
    timer_.cancel();
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) { self->finish(); });
}

// Disposes the session: no further ticks or writes.
inline void Connection::finish() {
    if (finished_) return;
    finished_ = true;
    timer_.cancel();
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
    registry_.remove(this);
}

// Reads the first request on a plain connection and routes it: /healthz answers over HTTP,
// websocket upgrades become sessions.
class HttpHandshake : public std::enable_shared_from_this<HttpHandshake> {
public:
    HttpHandshake(tcp::socket socket, std::function<void(HttpHandshake&, http::request<http::string_body>)> on_upgrade,
                  std::function<std::string()> status)
        : stream_(std::move(socket)), on_upgrade_(std::move(on_upgrade)), status_(std::move(status)) {}

    void run() {
        stream_.expires_after(std::chrono::seconds(10));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->on_read(ec);
        });
    }

    beast::tcp_stream release() { return std::move(stream_); }
    beast::flat_buffer& buffer() { return buffer_; }

private:
    void on_read(beast::error_code ec) {
        if (ec) return;
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            on_upgrade_(*this, std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req_.version());
        res->keep_alive(false);
        res->set(http::field::server, "hapticnav-gateway");
        res->set(http::field::content_type, "application/json");
        if (req_.method() == http::verb::get && (req_.target() == "/healthz" || req_.target() == "/healthz/")) {
            res->result(http::status::ok);
            res->body() = status_();
        } else {
            res->result(http::status::not_found);
            res->body() = R"({"error":"not found"})";
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    std::function<void(HttpHandshake&, http::request<http::string_body>)> on_upgrade_;
    std::function<std::string()> status_;
};

}  // namespace detail

// Session gateway: websocket sessions on /session, status JSON on /healthz.
class GatewayServer {
public:
    GatewayServer(GatewayConfig cfg, SessionCatalog catalog)
        : cfg_(std::move(cfg)), catalog_(std::move(catalog)), acceptor_(ioc_) {
        cfg_.validate();
    }

    ~GatewayServer() { stop(); }

    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    // Binds and starts the worker threads. Returns the bound port (useful with port 0).
    unsigned short start() {
        const tcp::endpoint ep(net::ip::make_address(cfg_.host), cfg_.port);
        beast::error_code ec;
        acceptor_.open(ep.protocol(), ec);
        if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
        if (!ec) acceptor_.bind(ep, ec);
        if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
        if (ec) throw std::runtime_error("cannot listen on " + cfg_.host + ":" + std::to_string(cfg_.port) + ": " + ec.message());
        port_ = acceptor_.local_endpoint().port();
        do_accept();
        for (int i = 0; i < cfg_.threads; ++i) threads_.emplace_back([this] { ioc_.run(); });
        return port_;
    }

    // Closes the listener and every live session, then joins the workers.
    void stop() {
        if (stopped_.exchange(true)) return;
        net::post(ioc_, [this] {
            beast::error_code ignored;
            acceptor_.close(ignored);
        });
        for (const auto& c : registry_.snapshot()) {
            net::post(c->ws_executor(), [c] { c->close(); });
        }
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
        while (registry_.size() > 0 && std::chrono::steady_clock::now() < deadline) {
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        ioc_.stop();
        for (auto& t : threads_) {
            if (t.joinable()) t.join();
        }
        threads_.clear();
    }

    unsigned short port() const { return port_; }
    std::size_t active_sessions() const { return registry_.size(); }

    std::string status_json() const {
        return json{{"status", "ok"},
                    {"version", HAPTICNAV_VERSION},
                    {"sessions", registry_.size()},
                    {"tick_hz", cfg_.session.tick_hz},
                    {"paths", [&] {
                         json a = json::array();
                         for (const auto& [k, _] : catalog_.paths) a.push_back(k);
                         return a;
                     }()},
                    {"environments", [&] {
                         json a = json::array();
                         for (const auto& [k, _] : catalog_.environments) a.push_back(k);
                         return a;
                     }()}}
            .dump();
    }

private:
    void do_accept() {
        acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;  // acceptor closed
            auto hs = std::make_shared<detail::HttpHandshake>(
                std::move(socket),
                [this](detail::HttpHandshake& h, http::request<http::string_body> req) {
                    const bool path_ok = req.target() == "/session";
                    websocket::stream<beast::tcp_stream> ws(h.release());
                    auto conn = std::make_shared<detail::Connection>(
                        std::move(ws), "s" + std::to_string(++next_id_), catalog_, cfg_.session, registry_);
                    conn->run(std::move(req), path_ok);
                },
                [this] { return status_json(); });
            hs->run();
            do_accept();
        });
    }

    GatewayConfig cfg_;
    SessionCatalog catalog_;
    net::io_context ioc_;
    tcp::acceptor acceptor_;
    detail::Registry registry_;
    std::vector<std::thread> threads_;
    std::atomic<std::uint64_t> next_id_{0};
    std::atomic<bool> stopped_{false};
    unsigned short port_ = 0;
};

}  // namespace hapticnav::gateway
