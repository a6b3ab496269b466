#pragma once

#include <chrono>
#include <fstream>
#include <mutex>
#include <unordered_map>
#include <variant>

#include "anonchan/groupsig.hpp"
#include "anonchan/ibe.hpp"

namespace anonchan::proto {

// per-session pseudonym: signed message and IBE public key at once
struct TempId {
    std::array<uint8_t, 16> bytes{};

    static TempId fresh(RandomSource& rng) {
        TempId id;
        rng.fill(id.bytes);
        return id;
    }

    static std::optional<TempId> from_bytes(ByteView in) {
        if (in.size() != 16) return std::nullopt;
        TempId id;
        std::memcpy(id.bytes.data(), in.data(), 16);
        return id;
    }

    ByteView view() const { return ByteView(bytes); }
    bool operator==(const TempId&) const = default;
};

struct TempIdHash {
    size_t operator()(const TempId& id) const {
        size_t h;
        std::memcpy(&h, id.bytes.data(), sizeof(h));
        return h;
    }
};

struct Address {
    std::string host;
    uint16_t port = 0;

    bool well_formed() const {
        return !host.empty() && host.size() <= 255 && port >= 1;
    }

    std::string to_string() const { return host + ":" + std::to_string(port); }

    static std::optional<Address> parse(std::string_view s) {
        auto pos = s.rfind(':');
        if (pos == std::string_view::npos || pos == 0) return std::nullopt;
        Address a;
        a.host = std::string(s.substr(0, pos));
        unsigned long p = 0;
        try {
            p = std::stoul(std::string(s.substr(pos + 1)));
        } catch (...) {
            return std::nullopt;
        }
        if (p < 1 || p > 65535) return std::nullopt;
        a.port = static_cast<uint16_t>(p);
        return a.well_formed() ? std::optional<Address>(a) : std::nullopt;
    }

    bool operator==(const Address&) const = default;
};

// encoding: 1-byte host length || host || 2-byte big-endian port
inline Bytes serialize(const Address& a) {
    Bytes out;
    out.push_back(static_cast<uint8_t>(a.host.size()));
    append(out, std::string_view(a.host));
    append_u16be(out, a.port);
    return out;
}

inline std::optional<Address> deserialize_address(ByteView in, size_t* consumed = nullptr) {
    if (in.size() < 1) return std::nullopt;
    size_t hlen = in[0];
    if (in.size() < 1 + hlen + 2) return std::nullopt;
    Address a;
    a.host.assign(in.begin() + 1, in.begin() + 1 + hlen);
    a.port = read_u16be(in.subspan(1 + hlen, 2));
    if (!a.well_formed()) return std::nullopt;
    if (consumed) *consumed = 1 + hlen + 2;
    return a;
}

// The proxy's (TempID, Adr_src) registry.  An entry exists only between
// RelayRequest and RelayContent or until its TTL lapses; all operations are
// linearizable under one lock.
//
// An optional append-only journal recovers in-flight sessions across a crash.
// It is off by default: journalling source addresses outlives the in-memory
// deletion guarantee until the file is truncated, which is the trade-off.
class IdIpTable {
public:
    using Clock = std::chrono::steady_clock;

    explicit IdIpTable(std::chrono::milliseconds ttl = std::chrono::seconds(30)) : ttl_(ttl) {}

    // empty journal_path disables journalling
    IdIpTable(std::chrono::milliseconds ttl, const std::string& journal_path) : ttl_(ttl) {
        if (journal_path.empty()) return;
        recover_from_journal(journal_path);
        journal_.open(journal_path, std::ios::app);
        journal_path_ = journal_path;
    }

    // false when the temp_id is already in flight (collision rejected)
    bool append(const TempId& id, const Address& src) {
        std::lock_guard lk(mu_);
        purge_locked();
        if (!entries_.emplace(id, Entry{src, Clock::now()}).second) return false;
        journal_write('A', id, &src);
        return true;
    }

    std::optional<Address> lookup(const TempId& id) {
        std::lock_guard lk(mu_);
        purge_locked();
        auto it = entries_.find(id);
        if (it == entries_.end()) return std::nullopt;
        return it->second.src;
    }

    // atomic lookup-and-delete; delivery and removal are one step
    std::optional<Address> remove(const TempId& id) {
        std::lock_guard lk(mu_);
        purge_locked();
        auto it = entries_.find(id);
        if (it == entries_.end()) return std::nullopt;
        Address src = it->second.src;
        entries_.erase(it);
        journal_write('R', id, nullptr);
        return src;
    }

    size_t purge_expired() {
        std::lock_guard lk(mu_);
        return purge_locked();
    }

    size_t size() const {
        std::lock_guard lk(mu_);
        return entries_.size();
    }

    std::vector<std::pair<TempId, Address>> snapshot() const {
        std::lock_guard lk(mu_);
        std::vector<std::pair<TempId, Address>> out;
        out.reserve(entries_.size());
        for (const auto& [id, e] : entries_) out.emplace_back(id, e.src);
        return out;
    }

    std::chrono::milliseconds ttl() const { return ttl_; }

private:
    struct Entry {
        Address src;
        Clock::time_point created_at;
    };

    size_t purge_locked() {
        size_t dropped = 0;
        auto now = Clock::now();
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (now - it->second.created_at > ttl_) {
                journal_write('R', it->first, nullptr);
                it = entries_.erase(it);
                ++dropped;
            } else {
                ++it;
            }
        }
        return dropped;
    }

    void journal_write(char op, const TempId& id, const Address* src) {
        if (!journal_.is_open()) return;
        journal_ << op << ' ' << to_hex(id.view());
        if (src) journal_ << ' ' << src->host << ' ' << src->port;
        journal_ << '\n';
        journal_.flush();
    }

    void recover_from_journal(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;
        std::string op, id_hex, host;
        int port = 0;
        while (in >> op) {
            if (op == "A" && (in >> id_hex >> host >> port)) {
                auto raw = from_hex(id_hex);
                if (!raw) continue;
                auto id = TempId::from_bytes(*raw);
                if (!id || port < 1 || port > 65535) continue;
                entries_[*id] = Entry{Address{host, uint16_t(port)}, Clock::now()};
            } else if (op == "R" && (in >> id_hex)) {
                auto raw = from_hex(id_hex);
                if (!raw) continue;
                if (auto id = TempId::from_bytes(*raw)) entries_.erase(*id);
            }
        }
    }

    mutable std::mutex mu_;
    std::unordered_map<TempId, Entry, TempIdHash> entries_;
    std::chrono::milliseconds ttl_;
    std::ofstream journal_;
    std::string journal_path_;
};

struct RequestToken {
    gs::GroupSignature sig;
    TempId temp_id;
    Address dst;
};

struct ContentMessage {
    TempId temp_id;  // routing tag, consumed by the proxy
    ibe::Ciphertext ct;
};

// the refusal channel for the protocol's bottom output
enum class RefuseReason : uint8_t {
    BadSignature = 0x01,
    MalformedToken = 0x02,
    Policy = 0x03,
};

// ------------------------------------------------------------ role algebra

inline std::pair<gs::GroupPublicKey, gs::IssuerKey> gm_setup(RandomSource& rng) {
    return gs::setup(rng);
}

inline std::pair<ibe::Params, ibe::MasterKey> kgc_setup(RandomSource& rng) {
    return ibe::setup(rng);
}

inline gs::SigningKey join(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik,
                           RandomSource& rng) {
    return gs::join(gpk, ik, rng);
}

inline ibe::DecryptionKey user_key_gen(const ibe::Params& params, const ibe::MasterKey& msk,
                                       const TempId& id) {
    return ibe::extract(params, msk, id.view());
}

inline std::pair<RequestToken, TempId> send_request(const gs::GroupPublicKey& gpk,
                                                    const gs::SigningKey& sk, const Address& dst,
                                                    RandomSource& rng) {
    TempId id = TempId::fresh(rng);
    RequestToken token{gs::sign(gpk, sk, id.view(), rng), id, dst};
    return {token, id};
}

struct ForwardedToken {
    gs::GroupSignature sig;
    TempId temp_id;
    Address reply_to;  // the proxy's own address, for the return path
};

// appends (temp_id, src) and produces the message for the next hop; the proxy
// never inspects the signature
inline std::optional<ForwardedToken> relay_request(IdIpTable& tbl, const RequestToken& token,
                                                   const Address& src, const Address& proxy) {
    if (!tbl.append(token.temp_id, src)) return std::nullopt;  // in-flight collision
    return ForwardedToken{token.sig, token.temp_id, proxy};
}

inline bool validity_check(const gs::GroupPublicKey& gpk, const gs::GroupSignature& sig,
                           const TempId& id) {
    return gs::verify(gpk, sig, id.view());
}

inline std::variant<ContentMessage, RefuseReason> send_content(
    const gs::GroupPublicKey& gpk, const ibe::Params& params, const gs::GroupSignature& sig,
    const TempId& id, ByteView msg, RandomSource& rng) {
    if (!validity_check(gpk, sig, id)) return RefuseReason::BadSignature;
    return ContentMessage{id, ibe::encrypt(params, id.view(), msg, rng)};
}

struct Delivery {
    Address src;
    ibe::Ciphertext ct;
};

// forward to the recorded source and drop the table entry in one atomic step
inline std::optional<Delivery> relay_content(IdIpTable& tbl, const ContentMessage& cm) {
    auto src = tbl.remove(cm.temp_id);
    if (!src) return std::nullopt;  // closed, expired, or never opened
    return Delivery{*src, cm.ct};
}

inline Bytes get_content(const ibe::Params& params, const ibe::Ciphertext& ct,
                         const ibe::DecryptionKey& dk) {
    return ibe::decrypt(params, ct, dk);
}

}  // namespace anonchan::proto
