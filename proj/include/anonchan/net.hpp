#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <thread>

#include "anonchan/keyfiles.hpp"
#include "anonchan/wire.hpp"

namespace anonchan::net {

// ------------------------------------------------------------------ logging

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    static const LogLevel lvl = [] {
        const char* env = std::getenv("ANONCHAN_LOG");
        if (!env) return LogLevel::Error;
        std::string_view v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return lvl;
}

inline void logf(LogLevel lvl, const char* fmt, ...) {
    if (lvl > log_level()) return;
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    const char* tag = lvl == LogLevel::Error ? "error" : lvl == LogLevel::Info ? "info" : "debug";
    fprintf(stderr, "[anonchan %s] %s\n", tag, buf);
}

// ------------------------------------------------------------------ sockets

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            close_fd();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close_fd(); }

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

    static std::optional<Socket> connect(const proto::Address& addr, int timeout_ms = 5000) {
        sockaddr_in sa{};
        if (!to_sockaddr(addr, sa)) return std::nullopt;
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) return std::nullopt;
        Socket s(fd);
        s.set_recv_timeout(timeout_ms);
        s.set_send_timeout(timeout_ms);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) return std::nullopt;
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return s;
    }

    void set_recv_timeout(int ms) const {
        timeval tv{ms / 1000, (ms % 1000) * 1000};
        setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    }
    void set_send_timeout(int ms) const {
        timeval tv{ms / 1000, (ms % 1000) * 1000};
        setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    }

    bool send_all(ByteView data) const {
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n <= 0) return false;
            off += static_cast<size_t>(n);
        }
        return true;
    }

    enum class RecvStatus { Ok, Eof, Timeout, Failed };

    RecvStatus recv_exact(std::span<uint8_t> out) const {
        size_t off = 0;
        while (off < out.size()) {
            ssize_t n = ::recv(fd_, out.data() + off, out.size() - off, 0);
            if (n == 0) return off == 0 ? RecvStatus::Eof : RecvStatus::Failed;
            if (n < 0) {
                if (errno == EAGAIN || errno == EWOULDBLOCK) return RecvStatus::Timeout;
                if (errno == EINTR) continue;
                return RecvStatus::Failed;
            }
            off += static_cast<size_t>(n);
        }
        return RecvStatus::Ok;
    }

    proto::Address peer() const {
        sockaddr_in sa{};
        socklen_t len = sizeof(sa);
        proto::Address out;
        if (getpeername(fd_, reinterpret_cast<sockaddr*>(&sa), &len) == 0) {
            char host[INET_ADDRSTRLEN] = {};
            inet_ntop(AF_INET, &sa.sin_addr, host, sizeof(host));
            out.host = host;
            out.port = ntohs(sa.sin_port);
        }
        return out;
    }

    void shutdown_both() const {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

    static bool to_sockaddr(const proto::Address& addr, sockaddr_in& sa) {
        sa.sin_family = AF_INET;
        sa.sin_port = htons(addr.port);
        std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
        return inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1;
    }

private:
    void close_fd() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

    int fd_ = -1;
};

class Listener {
public:
    Listener() = default;
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener() { close(); }

    // port 0 binds an ephemeral port; address() reports the actual one
    bool bind(const proto::Address& addr) {
        sockaddr_in sa{};
        if (!Socket::to_sockaddr(addr, sa)) return false;
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) return false;
        int one = 1;
        setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 ||
            ::listen(fd_, 64) != 0) {
            close();
            return false;
        }
        socklen_t len = sizeof(sa);
        getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
        addr_ = addr;
        addr_.port = ntohs(sa.sin_port);
        if (addr_.host == "0.0.0.0" || addr_.host == "localhost") addr_.host = "127.0.0.1";
        return true;
    }

    std::optional<Socket> accept() const {
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) return std::nullopt;
        return Socket(fd);
    }

    void close() {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

    bool valid() const { return fd_ >= 0; }
    const proto::Address& address() const { return addr_; }

private:
    int fd_ = -1;
    proto::Address addr_;
};

// ----------------------------------------------------------------- frame io

// observer for captured frames: (role, outbound, frame bytes)
using FrameTap = std::function<void(std::string_view, bool, ByteView)>;

struct ReadResult {
    enum class Status { Ok, Eof, Timeout, IoError, Decode };
    Status status = Status::IoError;
    std::optional<wire::WireMessage> msg;
    wire::DecodeError decode_error = wire::DecodeError::Truncated;
};

inline bool write_frame(const Socket& s, const wire::WireMessage& m,
                        std::string_view role = {}, const FrameTap& tap = {}) {
    Bytes frame = wire::encode_frame(m);
    if (tap) tap(role, true, frame);
    return s.send_all(frame);
}

inline ReadResult read_frame(const Socket& s, std::string_view role = {}, const FrameTap& tap = {},
                             uint32_t max_frame = wire::DEFAULT_MAX_FRAME) {
    ReadResult out;
    std::array<uint8_t, wire::HEADER_BYTES> hdr_bytes;
    switch (s.recv_exact(hdr_bytes)) {
        case Socket::RecvStatus::Eof: out.status = ReadResult::Status::Eof; return out;
        case Socket::RecvStatus::Timeout: out.status = ReadResult::Status::Timeout; return out;
        case Socket::RecvStatus::Failed: out.status = ReadResult::Status::IoError; return out;
        case Socket::RecvStatus::Ok: break;
    }
    auto hdr = wire::decode_header(hdr_bytes, max_frame);
    if (std::holds_alternative<wire::DecodeError>(hdr)) {
        out.status = ReadResult::Status::Decode;
        out.decode_error = std::get<wire::DecodeError>(hdr);
        return out;
    }
    auto h = std::get<wire::FrameHeader>(hdr);
    Bytes body(h.payload_len);
    if (h.payload_len > 0 && s.recv_exact(body) != Socket::RecvStatus::Ok) {
        out.status = ReadResult::Status::IoError;
        return out;
    }
    if (tap) {
        Bytes full(hdr_bytes.begin(), hdr_bytes.end());
        append(full, ByteView(body));
        tap(role, false, full);
    }
    auto decoded = wire::decode_payload(h.type, body);
    if (std::holds_alternative<wire::DecodeError>(decoded)) {
        out.status = ReadResult::Status::Decode;
        out.decode_error = std::get<wire::DecodeError>(decoded);
        return out;
    }
    out.status = ReadResult::Status::Ok;
    out.msg = std::get<wire::WireMessage>(decoded);
    return out;
}

// ----------------------------------------------------------------- services

struct ServiceConfig {
    proto::Address listen{"127.0.0.1", 0};
    int recv_timeout_ms = 5000;
    FrameTap tap;
};

class Service {
public:
    virtual ~Service() { stop(); }

    bool start() {
        if (!listener_.bind(cfg_.listen)) return false;
        running_ = true;
        accept_thread_ = std::thread([this] { accept_loop(); });
        return true;
    }

    void stop() {
        if (!running_.exchange(false)) return;
        listener_.close();
        if (accept_thread_.joinable()) accept_thread_.join();
        std::vector<std::thread> workers;
        {
            std::lock_guard lk(workers_mu_);
            workers.swap(workers_);
        }
        for (auto& t : workers)
            if (t.joinable()) t.join();
        on_stop();
    }

    const proto::Address& address() const { return listener_.address(); }

protected:
    explicit Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {}

    virtual void handle(Socket conn) = 0;
    virtual std::string_view role() const = 0;
    virtual void on_stop() {}

    bool send(const Socket& s, const wire::WireMessage& m) {
        return write_frame(s, m, role(), cfg_.tap);
    }
    ReadResult read(const Socket& s) { return read_frame(s, role(), cfg_.tap); }

    ServiceConfig cfg_;

private:
    void accept_loop() {
        while (running_) {
            auto conn = listener_.accept();
            if (!conn) break;
            conn->set_recv_timeout(cfg_.recv_timeout_ms);
            std::lock_guard lk(workers_mu_);
            if (!running_) break;
            workers_.emplace_back([this, c = std::make_shared<Socket>(std::move(*conn))]() mutable {
                handle(std::move(*c));
            });
        }
    }

    Listener listener_;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

// issues signing keys; assumes the enrollment channel authenticates the user
class GmService final : public Service {
public:
    GmService(ServiceConfig cfg, gs::GroupPublicKey gpk, gs::IssuerKey ik, uint64_t rng_seed = 0)
        : Service(std::move(cfg)), gpk_(std::move(gpk)), ik_(ik), rng_seed_(rng_seed) {}

protected:
    std::string_view role() const override { return "gm"; }

    void handle(Socket conn) override {
        auto r = read(conn);
        if (r.status != ReadResult::Status::Ok) return;
        if (!std::holds_alternative<wire::JoinReq>(*r.msg)) {
            send(conn, wire::Error{wire::ERR_DECODE, "expected join request"});
            return;
        }
        gs::SigningKey sk = [&] {
            if (rng_seed_ != 0) {
                DeterministicRandom rng(rng_seed_ + joins_.fetch_add(1));
                return gs::join(gpk_, ik_, rng);
            }
            return gs::join(gpk_, ik_, system_random());
        }();
        send(conn, wire::JoinResp{sk.x, sk.y, sk.a});
    }

private:
    gs::GroupPublicKey gpk_;
    gs::IssuerKey ik_;
    uint64_t rng_seed_;
    std::atomic<uint64_t> joins_{0};
};

// issues per-identity decryption keys
class KgcService final : public Service {
public:
    KgcService(ServiceConfig cfg, ibe::Params params, ibe::MasterKey msk)
        : Service(std::move(cfg)), params_(params), msk_(msk) {}

protected:
    std::string_view role() const override { return "kgc"; }

    void handle(Socket conn) override {
        auto r = read(conn);
        if (r.status != ReadResult::Status::Ok) return;
        auto* req = r.msg ? std::get_if<wire::ExtractReq>(&*r.msg) : nullptr;
        if (!req) {
            send(conn, wire::Error{wire::ERR_DECODE, "expected extract request"});
            return;
        }
        ibe::DecryptionKey dk = ibe::extract(params_, msk_, req->id.view());
        send(conn, wire::ExtractResp{req->id, dk.d});
    }

private:
    ibe::Params params_;
    ibe::MasterKey msk_;
};

// authenticates tokens and returns IBE-encrypted content via the reply path
class SpService final : public Service {
public:
    using PayloadProvider = std::function<Bytes(const proto::TempId&)>;

    SpService(ServiceConfig cfg, gs::GroupPublicKey gpk, ibe::Params params, Bytes payload)
        : Service(std::move(cfg)), gpk_(std::move(gpk)), params_(params),
          payload_(std::move(payload)) {}

    SpService(ServiceConfig cfg, gs::GroupPublicKey gpk, ibe::Params params,
              PayloadProvider provider)
        : Service(std::move(cfg)), gpk_(std::move(gpk)), params_(params),
          provider_(std::move(provider)) {}

protected:
    std::string_view role() const override { return "sp"; }

    void handle(Socket conn) override {
        auto r = read(conn);
        if (r.status == ReadResult::Status::Decode) {
            send(conn, wire::Error{wire::ERR_DECODE, decode_error_name(r.decode_error)});
            return;
        }
        if (r.status != ReadResult::Status::Ok) return;
        auto* fwd = std::get_if<wire::AuthFwd>(&*r.msg);
        if (!fwd) {
            send(conn, wire::Error{wire::ERR_DECODE, "expected forwarded token"});
            return;
        }
        Bytes payload = provider_ ? provider_(fwd->id) : payload_;
        auto result = proto::send_content(gpk_, params_, fwd->sig, fwd->id, payload,
                                          system_random());
        if (std::holds_alternative<proto::RefuseReason>(result)) {
            send(conn, wire::Refuse{static_cast<uint8_t>(std::get<proto::RefuseReason>(result))});
            return;
        }
        const auto& cm = std::get<proto::ContentMessage>(result);
        auto back = Socket::connect(fwd->reply_to, cfg_.recv_timeout_ms);
        if (!back) {
            logf(LogLevel::Error, "sp: cannot reach reply path %s", fwd->reply_to.to_string().c_str());
            return;
        }
        send(*back, wire::Content{cm.temp_id, cm.ct});
    }

private:
    gs::GroupPublicKey gpk_;
    ibe::Params params_;
    Bytes payload_;
    PayloadProvider provider_;
};

// relays tokens and content, keeping only the (TempID, Adr_src) table
class ProxyService final : public Service {
public:
    struct Options {
        proto::Address next_hop;  // the SP or the next proxy in the chain
        std::chrono::milliseconds ttl = std::chrono::seconds(30);
        std::string journal_path;  // empty: no crash-recovery journal
    };

    ProxyService(ServiceConfig cfg, Options opt)
        : Service(std::move(cfg)), opt_(opt), table_(opt.ttl, opt.journal_path) {
        purge_thread_ = std::thread([this] { purge_loop(); });
    }

    ~ProxyService() override {
        stop();
        purge_running_ = false;
        purge_cv_.notify_all();
        if (purge_thread_.joinable()) purge_thread_.join();
    }

    proto::IdIpTable& table() { return table_; }

protected:
    std::string_view role() const override { return "proxy"; }

    void handle(Socket conn) override {
        auto r = read(conn);
        if (r.status == ReadResult::Status::Decode) {
            send(conn, wire::Error{wire::ERR_DECODE, decode_error_name(r.decode_error)});
            return;
        }
        if (r.status != ReadResult::Status::Ok) return;
        if (auto* req = std::get_if<wire::AuthReq>(&*r.msg)) {
            proto::Address src = conn_src(conn);
            handle_auth(std::move(conn), req->sig, req->id, src, /*hold_conn=*/true);
        } else if (auto* fwd = std::get_if<wire::AuthFwd>(&*r.msg)) {
            handle_auth(std::move(conn), fwd->sig, fwd->id, fwd->reply_to, /*hold_conn=*/false);
        } else if (auto* content = std::get_if<wire::Content>(&*r.msg)) {
            handle_content(*content);
        } else {
            send(conn, wire::Error{wire::ERR_DECODE, "unexpected message"});
        }
    }

    void on_stop() override {
        std::lock_guard lk(sessions_mu_);
        sessions_.clear();
    }

private:
    struct LiveSession {
        std::shared_ptr<Socket> user_conn;
        std::chrono::steady_clock::time_point created_at;
    };

    static proto::Address conn_src(const Socket& conn) { return conn.peer(); }

    void handle_auth(Socket conn, const gs::GroupSignature& sig, const proto::TempId& id,
                     const proto::Address& src, bool hold_conn) {
        proto::RequestToken token{sig, id, opt_.next_hop};
        auto fwd = proto::relay_request(table_, token, src, address());
        if (!fwd) {
            send(conn, wire::Error{wire::ERR_DUPLICATE_TEMPID, "temp id in flight"});
            return;
        }
        std::shared_ptr<Socket> held;
        if (hold_conn) {
            held = std::make_shared<Socket>(std::move(conn));
            std::lock_guard lk(sessions_mu_);
            sessions_[id] = LiveSession{held, std::chrono::steady_clock::now()};
        }
        auto downstream = Socket::connect(opt_.next_hop, cfg_.recv_timeout_ms);
        if (!downstream ||
            !send(*downstream, wire::AuthFwd{fwd->sig, fwd->temp_id, fwd->reply_to})) {
            table_.remove(id);
            const Socket* reply = hold_conn ? held.get() : &conn;
            send(*reply, wire::Error{wire::ERR_TRANSPORT, "next hop unreachable"});
            drop_session(id);
            return;
        }
        // wait for a refusal coming back along the connection chain; content
        // travels by address through the listener instead
        auto back = read(*downstream);
        if (back.status == ReadResult::Status::Ok && back.msg &&
            std::holds_alternative<wire::Refuse>(*back.msg)) {
            table_.remove(id);
            if (hold_conn) {
                std::shared_ptr<Socket> user;
                {
                    std::lock_guard lk(sessions_mu_);
                    auto it = sessions_.find(id);
                    if (it != sessions_.end()) {
                        user = it->second.user_conn;
                        sessions_.erase(it);
                    }
                }
                if (user) send(*user, std::get<wire::Refuse>(*back.msg));
            } else {
                send(conn, std::get<wire::Refuse>(*back.msg));
            }
        }
        // EOF or timeout: content path owns delivery now
    }

    void handle_content(const wire::Content& content) {
        auto delivery = proto::relay_content(table_, {content.id, content.ct});
        if (!delivery) {
            logf(LogLevel::Info, "proxy: dropping content for unknown session");
            return;
        }
        std::shared_ptr<Socket> user;
        {
            std::lock_guard lk(sessions_mu_);
            auto it = sessions_.find(content.id);
            if (it != sessions_.end()) {
                user = it->second.user_conn;
                sessions_.erase(it);
            }
        }
        if (user) {
            send(*user, wire::ContentFwd{delivery->ct});
            user->shutdown_both();
            return;
        }
        auto back = Socket::connect(delivery->src, cfg_.recv_timeout_ms);
        if (!back) {
            logf(LogLevel::Error, "proxy: return hop %s unreachable", delivery->src.to_string().c_str());
            return;
        }
        send(*back, wire::Content{content.id, delivery->ct});
    }

    void drop_session(const proto::TempId& id) {
        std::lock_guard lk(sessions_mu_);
        sessions_.erase(id);
    }

    void purge_loop() {
        std::unique_lock lk(purge_mu_);
        while (purge_running_) {
            purge_cv_.wait_for(lk, std::max<std::chrono::milliseconds>(opt_.ttl / 4, std::chrono::milliseconds(10)));
            if (!purge_running_) break;
            table_.purge_expired();
            auto now = std::chrono::steady_clock::now();
            std::lock_guard slk(sessions_mu_);
            for (auto it = sessions_.begin(); it != sessions_.end();) {
                if (now - it->second.created_at > opt_.ttl) {
                    it->second.user_conn->shutdown_both();
                    it = sessions_.erase(it);
                } else {
                    ++it;
                }
            }
        }
    }

    Options opt_;
    proto::IdIpTable table_;
    std::mutex sessions_mu_;
    std::unordered_map<proto::TempId, LiveSession, proto::TempIdHash> sessions_;
    std::thread purge_thread_;
    std::atomic<bool> purge_running_{true};
    std::mutex purge_mu_;
    std::condition_variable purge_cv_;
};

// -------------------------------------------------------------- user client

inline std::optional<gs::SigningKey> run_join(const proto::Address& gm, const FrameTap& tap = {},
                                              int timeout_ms = 5000) {
    auto conn = Socket::connect(gm, timeout_ms);
    if (!conn) return std::nullopt;
    if (!write_frame(*conn, wire::JoinReq{}, "user", tap)) return std::nullopt;
    auto r = read_frame(*conn, "user", tap);
    if (r.status != ReadResult::Status::Ok) return std::nullopt;
    auto* resp = std::get_if<wire::JoinResp>(&*r.msg);
    if (!resp) return std::nullopt;
    return gs::SigningKey::make(resp->x, resp->y, resp->a);
}

inline std::optional<ibe::DecryptionKey> run_user_key_gen(const proto::Address& kgc,
                                                          const proto::TempId& id,
                                                          const FrameTap& tap = {},
                                                          int timeout_ms = 5000) {
    auto conn = Socket::connect(kgc, timeout_ms);
    if (!conn) return std::nullopt;
    if (!write_frame(*conn, wire::ExtractReq{id}, "user", tap)) return std::nullopt;
    auto r = read_frame(*conn, "user", tap);
    if (r.status != ReadResult::Status::Ok) return std::nullopt;
    auto* resp = std::get_if<wire::ExtractResp>(&*r.msg);
    if (!resp || !(resp->id == id)) return std::nullopt;
    return ibe::DecryptionKey{Bytes(id.bytes.begin(), id.bytes.end()), resp->d};
}

struct UserSessionConfig {
    proto::Address proxy;
    proto::Address sp;
    proto::Address kgc;
    bool offline_sign = false;      // TempID and signature prepared before the clock starts
    bool key_after_content = false; // fetch the decryption key only once content arrived
    int content_timeout_ms = 10000;
    FrameTap tap;
};

struct SessionTimings {
    double send_request_ms = 0;
    double key_fetch_ms = 0;
    double round_trip_ms = 0;
    double get_content_ms = 0;
    double online_ms = 0;  // excludes offline-signing time when enabled
};

struct SessionOutcome {
    enum class Status { Ok, Refused, Timeout, TransportError, DecodeError };
    Status status = Status::TransportError;
    uint8_t refuse_reason = 0;
    Bytes content;
    SessionTimings timings;
    proto::TempId temp_id;
};

inline SessionOutcome run_user_session(const UserSessionConfig& cfg,
                                       const gs::GroupPublicKey& gpk, const gs::SigningKey& sk,
                                       const ibe::Params& params, RandomSource& rng) {
    using Clock = std::chrono::steady_clock;
    auto ms_since = [](Clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };
    SessionOutcome out;

    proto::TempId id{};
    gs::GroupSignature sig;
    double sign_ms = 0;
    if (cfg.offline_sign) {
        auto t0 = Clock::now();
        auto [token, tid] = proto::send_request(gpk, sk, cfg.sp, rng);
        sign_ms = ms_since(t0);
        id = tid;
        sig = token.sig;
    }

    auto online_start = Clock::now();
    if (!cfg.offline_sign) {
        auto t0 = Clock::now();
        auto [token, tid] = proto::send_request(gpk, sk, cfg.sp, rng);
        sign_ms = ms_since(t0);
        id = tid;
        sig = token.sig;
    }
    out.temp_id = id;
    out.timings.send_request_ms = sign_ms;

    auto conn = Socket::connect(cfg.proxy, cfg.content_timeout_ms);
    if (!conn) return out;
    conn->set_recv_timeout(cfg.content_timeout_ms);
    auto rt_start = Clock::now();
    if (!write_frame(*conn, wire::AuthReq{sig, id, cfg.sp}, "user", cfg.tap)) return out;

    std::optional<ibe::DecryptionKey> dk;
    if (!cfg.key_after_content) {
        auto t0 = Clock::now();
        dk = run_user_key_gen(cfg.kgc, id, cfg.tap, cfg.content_timeout_ms);
        out.timings.key_fetch_ms = ms_since(t0);
        if (!dk) return out;
    }

    auto r = read_frame(*conn, "user", cfg.tap);
    out.timings.round_trip_ms = ms_since(rt_start);
    if (r.status == ReadResult::Status::Timeout) {
        out.status = SessionOutcome::Status::Timeout;
        return out;
    }
    if (r.status == ReadResult::Status::Decode) {
        out.status = SessionOutcome::Status::DecodeError;
        return out;
    }
    if (r.status != ReadResult::Status::Ok) return out;
    if (auto* refuse = std::get_if<wire::Refuse>(&*r.msg)) {
        out.status = SessionOutcome::Status::Refused;
        out.refuse_reason = refuse->reason;
        return out;
    }
    auto* fwd = std::get_if<wire::ContentFwd>(&*r.msg);
    if (!fwd) return out;

    if (cfg.key_after_content) {
        auto t0 = Clock::now();
        dk = run_user_key_gen(cfg.kgc, id, cfg.tap, cfg.content_timeout_ms);
        out.timings.key_fetch_ms = ms_since(t0);
        if (!dk) return out;
    }

    auto t0 = Clock::now();
    out.content = proto::get_content(params, fwd->ct, *dk);
    out.timings.get_content_ms = ms_since(t0);
    out.timings.online_ms = ms_since(online_start);
    out.status = SessionOutcome::Status::Ok;
    return out;
}

}  // namespace anonchan::net
