#pragma once

#include <variant>

#include "anonchan/protocol.hpp"

namespace anonchan::wire {

inline constexpr std::array<uint8_t, 4> MAGIC = {'A', 'N', 'C', '1'};
inline constexpr uint8_t VERSION = 0x01;
inline constexpr size_t HEADER_BYTES = 10;  // magic(4) version(1) type(1) len(4)
inline constexpr uint32_t DEFAULT_MAX_FRAME = 1u << 20;

enum class MsgType : uint8_t {
    JoinReq = 0x01,
    JoinResp = 0x02,
    ExtractReq = 0x03,
    ExtractResp = 0x04,
    AuthReq = 0x05,
    AuthFwd = 0x06,
    Content = 0x07,
    ContentFwd = 0x08,
    Refuse = 0x09,
    Error = 0x0A,
};

enum class DecodeError {
    Truncated,
    BadMagic,
    BadVersion,
    UnknownType,
    Oversize,
    BadBody,
};

inline const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::Truncated: return "truncated";
        case DecodeError::BadMagic: return "bad-magic";
        case DecodeError::BadVersion: return "bad-version";
        case DecodeError::UnknownType: return "unknown-type";
        case DecodeError::Oversize: return "oversize";
        case DecodeError::BadBody: return "bad-body";
    }
    return "unknown";
}

// error frame codes
inline constexpr uint8_t ERR_TRANSPORT = 0x01;
inline constexpr uint8_t ERR_DUPLICATE_TEMPID = 0x02;
inline constexpr uint8_t ERR_DECODE = 0x03;
inline constexpr uint8_t ERR_INTERNAL = 0x04;

struct JoinReq {};

struct JoinResp {
    Fr x, y;
    G1Affine a;
};

struct ExtractReq {
    proto::TempId id;
};

struct ExtractResp {
    proto::TempId id;
    G1Affine d;
};

struct AuthReq {
    gs::GroupSignature sig;
    proto::TempId id;
    proto::Address dst;
};

struct AuthFwd {
    gs::GroupSignature sig;
    proto::TempId id;
    proto::Address reply_to;
};

struct Content {
    proto::TempId id;
    ibe::Ciphertext ct;
};

struct ContentFwd {
    ibe::Ciphertext ct;
};

struct Refuse {
    uint8_t reason;
};

struct Error {
    uint8_t code;
    std::string text;
};

using WireMessage = std::variant<JoinReq, JoinResp, ExtractReq, ExtractResp, AuthReq, AuthFwd,
                                 Content, ContentFwd, Refuse, Error>;

inline MsgType message_type(const WireMessage& m) {
    return static_cast<MsgType>(m.index() + 1);
}

namespace detail {

inline void encode_body(Bytes&, const JoinReq&) {}

inline void encode_body(Bytes& out, const JoinResp& m) {
    append(out, anonchan::serialize(m.x));
    append(out, anonchan::serialize(m.y));
    append(out, anonchan::serialize(m.a));
}

inline void encode_body(Bytes& out, const ExtractReq& m) { append(out, m.id.view()); }

inline void encode_body(Bytes& out, const ExtractResp& m) {
    append(out, m.id.view());
    append(out, anonchan::serialize(m.d));
}

inline void encode_body(Bytes& out, const AuthReq& m) {
    append(out, gs::serialize(m.sig));
    append(out, m.id.view());
    append(out, proto::serialize(m.dst));
}

inline void encode_body(Bytes& out, const AuthFwd& m) {
    append(out, gs::serialize(m.sig));
    append(out, m.id.view());
    append(out, proto::serialize(m.reply_to));
}

inline void encode_body(Bytes& out, const Content& m) {
    append(out, m.id.view());
    append(out, ibe::serialize(m.ct));
}

inline void encode_body(Bytes& out, const ContentFwd& m) { append(out, ibe::serialize(m.ct)); }

inline void encode_body(Bytes& out, const Refuse& m) { out.push_back(m.reason); }

inline void encode_body(Bytes& out, const Error& m) {
    out.push_back(m.code);
    append(out, std::string_view(m.text));
}

template <class T>
std::optional<T> decode_body(ByteView in);

template <>
inline std::optional<JoinReq> decode_body(ByteView in) {
    if (!in.empty()) return std::nullopt;
    return JoinReq{};
}

template <>
inline std::optional<JoinResp> decode_body(ByteView in) {
    if (in.size() != 64 + G1_BYTES) return std::nullopt;
    auto x = Fr::from_bytes(in.first(32));
    auto y = Fr::from_bytes(in.subspan(32, 32));
    auto a = deserialize_g1(in.subspan(64));
    if (!x || !y || !a) return std::nullopt;
    return JoinResp{*x, *y, *a};
}

template <>
inline std::optional<ExtractReq> decode_body(ByteView in) {
    auto id = proto::TempId::from_bytes(in);
    if (!id) return std::nullopt;
    return ExtractReq{*id};
}

template <>
inline std::optional<ExtractResp> decode_body(ByteView in) {
    if (in.size() != 16 + G1_BYTES) return std::nullopt;
    auto id = proto::TempId::from_bytes(in.first(16));
    auto d = deserialize_g1(in.subspan(16));
    if (!id || !d) return std::nullopt;
    return ExtractResp{*id, *d};
}

template <>
inline std::optional<AuthReq> decode_body(ByteView in) {
    if (in.size() < gs::SIGNATURE_BYTES + 16 + 4) return std::nullopt;
    auto sig = gs::deserialize_signature(in.first(gs::SIGNATURE_BYTES));
    auto id = proto::TempId::from_bytes(in.subspan(gs::SIGNATURE_BYTES, 16));
    size_t used = 0;
    auto dst = proto::deserialize_address(in.subspan(gs::SIGNATURE_BYTES + 16), &used);
    if (!sig || !id || !dst) return std::nullopt;
    if (gs::SIGNATURE_BYTES + 16 + used != in.size()) return std::nullopt;
    return AuthReq{*sig, *id, *dst};
}

template <>
inline std::optional<AuthFwd> decode_body(ByteView in) {
    auto req = decode_body<AuthReq>(in);
    if (!req) return std::nullopt;
    return AuthFwd{req->sig, req->id, req->dst};
}

template <>
inline std::optional<Content> decode_body(ByteView in) {
    if (in.size() < 16) return std::nullopt;
    auto id = proto::TempId::from_bytes(in.first(16));
    auto ct = ibe::deserialize_ciphertext(in.subspan(16));
    if (!id || !ct) return std::nullopt;
    return Content{*id, *ct};
}

template <>
inline std::optional<ContentFwd> decode_body(ByteView in) {
    auto ct = ibe::deserialize_ciphertext(in);
    if (!ct) return std::nullopt;
    return ContentFwd{*ct};
}

template <>
inline std::optional<Refuse> decode_body(ByteView in) {
    if (in.size() != 1) return std::nullopt;
    return Refuse{in[0]};
}

template <>
inline std::optional<Error> decode_body(ByteView in) {
    if (in.size() < 1 || in.size() > 1 + 512) return std::nullopt;
    return Error{in[0], std::string(in.begin() + 1, in.end())};
}

}  // namespace detail

inline Bytes encode_frame(const WireMessage& m, uint32_t max_frame = DEFAULT_MAX_FRAME) {
    Bytes body;
    std::visit([&](const auto& msg) { detail::encode_body(body, msg); }, m);
    if (body.size() > max_frame) throw std::length_error("frame body exceeds limit");
    Bytes out;
    out.reserve(HEADER_BYTES + body.size());
    append(out, ByteView(MAGIC));
    out.push_back(VERSION);
    out.push_back(static_cast<uint8_t>(message_type(m)));
    append_u32be(out, static_cast<uint32_t>(body.size()));
    append(out, body);
    return out;
}

struct FrameHeader {
    MsgType type;
    uint32_t payload_len;
};

inline std::variant<FrameHeader, DecodeError> decode_header(ByteView in,
                                                            uint32_t max_frame = DEFAULT_MAX_FRAME) {
    if (in.size() < HEADER_BYTES) return DecodeError::Truncated;
    if (!std::equal(MAGIC.begin(), MAGIC.end(), in.begin())) return DecodeError::BadMagic;
    if (in[4] != VERSION) return DecodeError::BadVersion;
    uint8_t t = in[5];
    if (t < 0x01 || t > 0x0A) return DecodeError::UnknownType;
    uint32_t len = read_u32be(in.subspan(6, 4));
    if (len > max_frame) return DecodeError::Oversize;
    return FrameHeader{static_cast<MsgType>(t), len};
}

inline std::variant<WireMessage, DecodeError> decode_payload(MsgType type, ByteView body) {
    auto lift = [](auto&& opt) -> std::variant<WireMessage, DecodeError> {
        if (!opt) return DecodeError::BadBody;
        return WireMessage(*opt);
    };
    switch (type) {
        case MsgType::JoinReq: return lift(detail::decode_body<JoinReq>(body));
        case MsgType::JoinResp: return lift(detail::decode_body<JoinResp>(body));
        case MsgType::ExtractReq: return lift(detail::decode_body<ExtractReq>(body));
        case MsgType::ExtractResp: return lift(detail::decode_body<ExtractResp>(body));
        case MsgType::AuthReq: return lift(detail::decode_body<AuthReq>(body));
        case MsgType::AuthFwd: return lift(detail::decode_body<AuthFwd>(body));
        case MsgType::Content: return lift(detail::decode_body<Content>(body));
        case MsgType::ContentFwd: return lift(detail::decode_body<ContentFwd>(body));
        case MsgType::Refuse: return lift(detail::decode_body<Refuse>(body));
        case MsgType::Error: return lift(detail::decode_body<Error>(body));
    }
    return DecodeError::UnknownType;
}

inline std::variant<WireMessage, DecodeError> decode_frame(ByteView in,
                                                           uint32_t max_frame = DEFAULT_MAX_FRAME) {
    auto hdr = decode_header(in, max_frame);
    if (std::holds_alternative<DecodeError>(hdr)) return std::get<DecodeError>(hdr);
    auto h = std::get<FrameHeader>(hdr);
    if (in.size() != HEADER_BYTES + h.payload_len) return DecodeError::Truncated;
    return decode_payload(h.type, in.subspan(HEADER_BYTES));
}

}  // namespace anonchan::wire
