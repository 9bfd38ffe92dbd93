#include "cursed/arena_server.hpp"

#include "cursed/campaign.hpp"
#include "cursed/rng.hpp"
#include "cursed/session.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <thread>

namespace cursed {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::string safe_file_name(const std::string& name) {
    std::string out;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "_" : out;
}

std::string_view mime_type(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

std::uint64_t room_seed(std::uint64_t base, const std::string& id) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(id.data());
    return keyed_draw(base, crc32({p, id.size()}), id.size());
}

} // namespace

struct Conn;

struct ArenaServer::Impl {
    explicit Impl(ServerConfig c)
        : cfg(std::move(c)), acceptor(ioc), timer(ioc), store(cfg.db) {
        tcp::endpoint ep(net::ip::make_address("0.0.0.0"), cfg.port);
        acceptor.open(ep.protocol());
        acceptor.set_option(net::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
        port = acceptor.local_endpoint().port();
        do_accept();
        if (cfg.tick_ms > 0) arm_timer();
    }

    void do_accept();
    void arm_timer() {
        timer.expires_after(std::chrono::milliseconds(cfg.tick_ms));
        timer.async_wait([this](beast::error_code ec) {
            if (ec) return;
            tick_all();
            arm_timer();
        });
    }

    void handle(const std::shared_ptr<Conn>& c, const std::string& text);
    void drop(const std::shared_ptr<Conn>& c);
    void leave(Conn& c);
    void deliver(const std::string& room_id, const RoomUpdate& up);
    void tick_all();

    template <class F>
    auto on_loop(F f) {
        std::packaged_task<decltype(f())()> task(std::move(f));
        auto fut = task.get_future();
        net::post(ioc, [&task] { task(); });
        return fut.get();
    }

    ServerConfig cfg;
    net::io_context ioc{1};
    tcp::acceptor acceptor;
    net::steady_timer timer;
    ProfileStore store;
    std::uint16_t port = 0;
    std::map<std::string, Room> rooms;
    std::map<std::string, std::vector<QueuedAction>> queues;
    std::map<std::string, Recording> recs;
    std::map<std::uint32_t, std::shared_ptr<Conn>> conns;
    std::uint32_t next_conn = 1;
    std::thread thread;
};

struct Conn : std::enable_shared_from_this<Conn> {
    Conn(ArenaServer::Impl* s, tcp::socket sock, std::uint32_t id) : srv(s), ws(std::move(sock)), id(id) {}

    void accept(http::request<http::string_body> req) {
        ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->srv->conns[self->id] = self;
            self->do_read();
        });
    }

    void do_read() {
        ws.async_read(buf, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->srv->drop(self);
                return;
            }
            std::string text = beast::buffers_to_string(self->buf.data());
            self->buf.consume(self->buf.size());
            self->srv->handle(self, text);
            if (!self->closing) self->do_read();
        });
    }

    void send(NetMessage m) {
        if (closing) return;
        m.seq = ++out_seq;
        outq.push_back(encode_message(m));
        if (!writing) do_write();
    }

    void fatal(const std::string& reason) {
        send(make_message(MsgType::ProtocolError, {{"reason", reason}}));
        close_after = true;
        closing = true;
        if (!writing) do_close();
    }

    void do_write() {
        writing = true;
        ws.text(true);
        ws.async_write(net::buffer(outq.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->outq.pop_front();
            if (ec) {
                self->writing = false;
                return;
            }
            if (!self->outq.empty()) return self->do_write();
            self->writing = false;
            if (self->close_after) self->do_close();
        });
    }

    void do_close() {
        close_after = false;
        ws.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }

    ArenaServer::Impl* srv;
    websocket::stream<beast::tcp_stream> ws;
    beast::flat_buffer buf;
    std::deque<std::string> outq;
    bool writing = false;
    bool closing = false;
    bool close_after = false;
    std::uint32_t id;
    std::optional<std::string> name;
    std::optional<std::string> room;
    std::uint64_t in_seq = 0;
    std::uint64_t out_seq = 0;
    std::unique_ptr<SessionDriver> sp;
};

struct HttpSession : std::enable_shared_from_this<HttpSession> {
    HttpSession(ArenaServer::Impl* s, tcp::socket sock) : srv(s), stream(std::move(sock)) {}

    void run() {
        stream.expires_after(std::chrono::seconds(30));
        http::async_read(stream, buf, req, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return;
            self->on_request();
        });
    }

    void on_request() {
        if (websocket::is_upgrade(req)) {
            stream.expires_never();
            auto c = std::make_shared<Conn>(srv, stream.release_socket(), srv->next_conn++);
            c->accept(std::move(req));
            return;
        }
        res = std::make_shared<http::response<http::string_body>>(serve_static());
        res->keep_alive(false);
        res->prepare_payload();
        http::async_write(stream, *res, [self = shared_from_this()](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    http::response<http::string_body> serve_static() {
        http::response<http::string_body> r{http::status::not_found, req.version()};
        r.set(http::field::content_type, "text/plain");
        r.body() = "not found\n";
        if (req.method() != http::verb::get && req.method() != http::verb::head) {
            r.result(http::status::method_not_allowed);
            r.body() = "method not allowed\n";
            return r;
        }
        if (!srv->cfg.static_dir) return r;
        std::string target(req.target());
        target = target.substr(0, target.find('?'));
        if (target.empty() || target.front() != '/' || target.find("..") != std::string::npos) return r;
        if (target.back() == '/') target += "index.html";
        const std::filesystem::path file = *srv->cfg.static_dir / target.substr(1);
        std::ifstream in(file, std::ios::binary);
        if (!in || std::filesystem::is_directory(file)) return r;
        r.result(http::status::ok);
        r.set(http::field::content_type, std::string(mime_type(file)));
        r.body().assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        if (req.method() == http::verb::head) r.body().clear();
        return r;
    }

    ArenaServer::Impl* srv;
    beast::tcp_stream stream;
    beast::flat_buffer buf;
    http::request<http::string_body> req;
    std::shared_ptr<http::response<http::string_body>> res;
};

void ArenaServer::Impl::do_accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket sock) {
        if (ec) return;
        std::make_shared<HttpSession>(this, std::move(sock))->run();
        do_accept();
    });
}

void ArenaServer::Impl::deliver(const std::string& room_id, const RoomUpdate& up) {
    // Durable before anyone hears about it.
    for (const ProfileDelta& d : up.deltas) {
        try {
            store.record_result(d);
        } catch (const StoreError& e) {
            std::cerr << "serve: " << e.what() << '\n';
        }
    }
    Recording& rec = recs[room_id];
    for (const Outgoing& o : up.broadcasts) {
        rec.broadcasts.push_back(broadcast_text(o));
        auto send_to = [&](std::uint32_t pid) {
            if (auto it = conns.find(pid); it != conns.end()) it->second->send(o.message);
        };
        if (o.to)
            send_to(*o.to);
        else
            for (const auto& [pid, _] : up.room.players) send_to(pid);
    }
    rooms[room_id] = up.room;
}

void ArenaServer::Impl::leave(Conn& c) {
    if (!c.room) return;
    const std::string id = *c.room;
    c.room.reset();
    auto it = rooms.find(id);
    if (it == rooms.end()) return;
    recs[id].log.entries.push_back(LogLeave{c.id});
    deliver(id, leave_room(it->second, c.id));
}

void ArenaServer::Impl::drop(const std::shared_ptr<Conn>& c) {
    leave(*c);
    conns.erase(c->id);
}

void ArenaServer::Impl::handle(const std::shared_ptr<Conn>& cp, const std::string& text) {
    Conn& c = *cp;
    if (c.closing) return;
    NetMessage m;
    try {
        m = decode_message(text);
    } catch (const NetError& e) {
        return c.fatal(e.what());
    }
    if (m.seq != c.in_seq + 1)
        return c.fatal("seq " + std::to_string(m.seq) + " out of order, expected " + std::to_string(c.in_seq + 1));
    c.in_seq = m.seq;
    if (!c.name && m.type != MsgType::Hello) return c.fatal("first message must be hello");

    auto error = [&](const std::string& reason) { c.send(make_message(MsgType::ProtocolError, {{"reason", reason}})); };

    switch (m.type) {
    case MsgType::Hello: {
        if (c.name) return c.fatal("duplicate hello");
        const std::string name = m.body.at("name").get<std::string>();
        if (name.empty()) return error("name must not be empty");
        for (const auto& [_, other] : conns)
            if (other->name == name) return error("name taken: '" + name + "' is already connected");
        c.name = name;
        c.send(make_message(MsgType::Welcome, {{"player_id", c.id}, {"profile", to_json(store.get_or_default(name))}}));
        return;
    }
    case MsgType::Join: {
        const std::string id = m.body.at("room").get<std::string>();
        if (c.room == id) return error("already in room '" + id + "'");
        leave(c);
        auto it = rooms.find(id);
        if (it == rooms.end() || it->second.phase == RoomPhase::Closed) {
            const std::uint64_t seed = room_seed(cfg.seed, id);
            it = rooms.insert_or_assign(id, make_room(id, seed)).first;
            recs[id] = Recording{RoomLog{id, seed, {}}, {}};
            queues[id].clear();
        }
        const PlayerProfile profile = store.get_or_default(*c.name);
        try {
            RoomUpdate up = join_room(it->second, profile, c.id);
            recs[id].log.entries.push_back(LogJoin{profile, c.id});
            c.room = id;
            deliver(id, up);
        } catch (const NetError& e) {
            error(e.code() == NetErrc::NameTaken ? std::string("name taken: ") + e.what() : e.what());
        }
        return;
    }
    case MsgType::Start: {
        if (!c.room) return error("not in a room");
        recs[*c.room].log.entries.push_back(LogStart{});
        deliver(*c.room, request_start(rooms.at(*c.room)));
        return;
    }
    case MsgType::Action: {
        if (!c.room) return error("not in a room");
        if (rooms.at(*c.room).phase != RoomPhase::Fighting) return error("room is not fighting");
        const auto kind = *parse_attack_kind(m.body.at("kind").get<std::string>());
        const auto target = m.body.at("target").get<std::uint64_t>();
        if (target > UINT32_MAX) return error("unknown target");
        queues[*c.room].push_back({c.id, Action{kind, CombatantId{static_cast<std::uint32_t>(target)}}});
        return;
    }
    case MsgType::Bye:
        leave(c);
        c.closing = true;
        if (!c.writing) c.do_close();
        else c.close_after = true;
        return;
    case MsgType::SpStart: {
        std::filesystem::path dir = cfg.db;
        dir += ".saves";
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        const std::filesystem::path file = dir / (safe_file_name(*c.name) + ".cpsav");
        c.sp = std::make_unique<SessionDriver>(default_campaign(), m.body.at("seed").get<std::uint64_t>(), file, *c.name);
        c.send(make_message(MsgType::SpView, {{"view", to_json(c.sp->view())}, {"events", Json::array()}}));
        return;
    }
    case MsgType::SpInput: {
        if (!c.sp) {
            c.send(make_message(MsgType::SpError, {{"reason", "no single-player session; send sp_start first"}}));
            return;
        }
        try {
            Json events = Json::array();
            for (const Event& e : c.sp->input(m.body.at("input").get<std::string>())) events.push_back(to_json(e));
            c.send(make_message(MsgType::SpView, {{"view", to_json(c.sp->view())}, {"events", std::move(events)}}));
        } catch (const std::exception& e) {
            c.send(make_message(MsgType::SpError, {{"reason", e.what()}}));
        }
        return;
    }
    default:
        return c.fatal("'" + std::string(to_string(m.type)) + "' is not a client message");
    }
}

void ArenaServer::Impl::tick_all() {
    for (auto& [id, room] : rooms) {
        std::vector<QueuedAction> queued = std::exchange(queues[id], {});
        if (room.phase == RoomPhase::Fighting) {
            recs[id].log.entries.push_back(LogTick{queued});
            deliver(id, apply_tick(room, queued));
        } else if (room.phase == RoomPhase::WaveCleared) {
            recs[id].log.entries.push_back(LogStart{});
            deliver(id, request_start(room));
        }
    }
}

ArenaServer::ArenaServer(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

ArenaServer::~ArenaServer() { stop(); }

std::uint16_t ArenaServer::port() const noexcept { return impl_->port; }

void ArenaServer::run() { impl_->ioc.run(); }

void ArenaServer::start() {
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void ArenaServer::stop() {
    impl_->ioc.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void ArenaServer::advance_tick() {
    impl_->on_loop([this] {
        impl_->tick_all();
        return 0;
    });
}

std::map<std::string, ArenaServer::Recording> ArenaServer::recordings() {
    return impl_->on_loop([this] { return impl_->recs; });
}

std::optional<Room> ArenaServer::room(const std::string& id) {
    return impl_->on_loop([this, &id]() -> std::optional<Room> {
        auto it = impl_->rooms.find(id);
        if (it == impl_->rooms.end()) return std::nullopt;
        return it->second;
    });
}

std::size_t ArenaServer::queued_actions(const std::string& room) {
    return impl_->on_loop([this, &room]() -> std::size_t {
        auto it = impl_->queues.find(room);
        return it == impl_->queues.end() ? 0 : it->second.size();
    });
}

// ---- client ----

struct ArenaClient::Impl {
    net::io_context ioc;
    websocket::stream<beast::tcp_stream> ws{ioc};
    beast::flat_buffer buf;
    std::uint64_t seq = 0;
    bool closed = false;
};

ArenaClient::ArenaClient(const std::string& host, std::uint16_t port, const std::string& target)
    : impl_(std::make_unique<Impl>()) {
    tcp::resolver resolver(impl_->ioc);
    beast::get_lowest_layer(impl_->ws).connect(resolver.resolve(host, std::to_string(port)));
    impl_->ws.handshake(host + ":" + std::to_string(port), target);
    impl_->ws.text(true);
}

ArenaClient::~ArenaClient() {
    beast::error_code ec;
    beast::get_lowest_layer(impl_->ws).socket().close(ec);
}

void ArenaClient::send(MsgType type, Json body) { send_raw(encode_message(make_message(type, std::move(body), ++impl_->seq))); }

void ArenaClient::send_raw(const std::string& text) { impl_->ws.write(net::buffer(text)); }

NetMessage ArenaClient::receive(std::chrono::milliseconds timeout) {
    if (impl_->closed) throw std::runtime_error("connection closed");
    bool done = false;
    beast::error_code ec;
    impl_->ws.async_read(impl_->buf, [&](beast::error_code e, std::size_t) {
        ec = e;
        done = true;
    });
    impl_->ioc.restart();
    impl_->ioc.run_for(timeout);
    if (!done) {
        beast::get_lowest_layer(impl_->ws).cancel();
        impl_->ioc.restart();
        impl_->ioc.run();
        impl_->closed = true;
        throw std::runtime_error("timed out waiting for a message");
    }
    if (ec) {
        impl_->closed = true;
        throw std::runtime_error("connection closed: " + ec.message());
    }
    std::string text = beast::buffers_to_string(impl_->buf.data());
    impl_->buf.consume(impl_->buf.size());
    return decode_message(text);
}

NetMessage ArenaClient::receive_until(MsgType type, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        NetMessage m = receive(std::max(left, std::chrono::milliseconds(1)));
        if (m.type == type) return m;
    }
}

bool ArenaClient::closed() { return impl_->closed; }

std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& target) {
    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::tcp_stream stream(ioc);
    stream.connect(resolver.resolve(host, std::to_string(port)));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, host);
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {res.result_int(), res.body()};
}

} // namespace cursed
