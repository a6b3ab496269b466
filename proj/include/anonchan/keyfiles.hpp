#pragma once

#include <filesystem>
#include <fstream>

#include "anonchan/protocol.hpp"

namespace anonchan::keyfiles {

// one header byte distinguishes the kind; bodies reuse the wire encodings
enum class Kind : uint8_t {
    GroupPublicKey = 0x11,
    IssuerKey = 0x12,
    SigningKey = 0x13,
    IbeParams = 0x14,
    IbeMasterKey = 0x15,
    DecryptionKey = 0x16,
};

namespace detail {

inline void write_file(const std::filesystem::path& path, ByteView data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return data;
}

inline ByteView expect_kind(const Bytes& data, Kind kind) {
    if (data.empty() || data[0] != static_cast<uint8_t>(kind))
        throw std::runtime_error("key file has wrong kind byte");
    return ByteView(data).subspan(1);
}

}  // namespace detail

// gpk body: h || W || e(g1,g2) || e(g1,W) || e(h,g2) || e(h,W)
inline Bytes encode(const gs::GroupPublicKey& gpk) {
    Bytes out{static_cast<uint8_t>(Kind::GroupPublicKey)};
    append(out, serialize(gpk.h));
    append(out, serialize(gpk.w));
    append(out, serialize(gpk.e_g1_g2));
    append(out, serialize(gpk.e_g1_w));
    append(out, serialize(gpk.e_h_g2));
    append(out, serialize(gpk.e_h_w));
    return out;
}

inline gs::GroupPublicKey decode_gpk(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::GroupPublicKey);
    if (body.size() != G1_BYTES + G2_BYTES + 4 * GT_BYTES)
        throw std::runtime_error("bad gpk length");
    gs::GroupPublicKey gpk;
    auto h = deserialize_g1(body.first(G1_BYTES));
    auto w = deserialize_g2(body.subspan(G1_BYTES, G2_BYTES));
    if (!h || !w) throw std::runtime_error("bad gpk elements");
    gpk.h = *h;
    gpk.w = *w;
    size_t off = G1_BYTES + G2_BYTES;
    GT* slots[4] = {&gpk.e_g1_g2, &gpk.e_g1_w, &gpk.e_h_g2, &gpk.e_h_w};
    for (GT* slot : slots) {
        auto gt = deserialize_gt(body.subspan(off, GT_BYTES));
        if (!gt) throw std::runtime_error("bad gpk pairing encoding");
        *slot = *gt;
        off += GT_BYTES;
    }
    return gpk;
}

inline Bytes encode(const gs::IssuerKey& ik) {
    Bytes out{static_cast<uint8_t>(Kind::IssuerKey)};
    append(out, serialize(ik.gamma));
    return out;
}

inline gs::IssuerKey decode_ik(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::IssuerKey);
    auto gamma = Fr::from_bytes(body);
    if (!gamma) throw std::runtime_error("bad issuer key");
    return gs::IssuerKey{*gamma};
}

inline Bytes encode(const gs::SigningKey& sk) {
    Bytes out{static_cast<uint8_t>(Kind::SigningKey)};
    append(out, serialize(sk.x));
    append(out, serialize(sk.y));
    append(out, serialize(sk.a));
    return out;
}

inline gs::SigningKey decode_sk(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::SigningKey);
    if (body.size() != 64 + G1_BYTES) throw std::runtime_error("bad signing key length");
    auto x = Fr::from_bytes(body.first(32));
    auto y = Fr::from_bytes(body.subspan(32, 32));
    auto a = deserialize_g1(body.subspan(64));
    if (!x || !y || !a) throw std::runtime_error("bad signing key");
    return gs::SigningKey::make(*x, *y, *a);
}

inline Bytes encode(const ibe::Params& params) {
    Bytes out{static_cast<uint8_t>(Kind::IbeParams)};
    append(out, serialize(params.p_pub));
    return out;
}

inline ibe::Params decode_params(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::IbeParams);
    auto p = deserialize_g2(body);
    if (!p) throw std::runtime_error("bad ibe params");
    return ibe::Params{*p};
}

inline Bytes encode(const ibe::MasterKey& msk) {
    Bytes out{static_cast<uint8_t>(Kind::IbeMasterKey)};
    append(out, serialize(msk.s));
    return out;
}

inline ibe::MasterKey decode_msk(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::IbeMasterKey);
    auto s = Fr::from_bytes(body);
    if (!s) throw std::runtime_error("bad master key");
    return ibe::MasterKey{*s};
}

inline Bytes encode(const ibe::DecryptionKey& dk) {
    Bytes out{static_cast<uint8_t>(Kind::DecryptionKey)};
    append_u32be(out, static_cast<uint32_t>(dk.id.size()));
    append(out, ByteView(dk.id));
    append(out, serialize(dk.d));
    return out;
}

inline ibe::DecryptionKey decode_dk(const Bytes& data) {
    ByteView body = detail::expect_kind(data, Kind::DecryptionKey);
    if (body.size() < 4) throw std::runtime_error("bad decryption key");
    uint32_t idlen = read_u32be(body.first(4));
    if (body.size() != 4 + idlen + G1_BYTES) throw std::runtime_error("bad decryption key length");
    auto d = deserialize_g1(body.subspan(4 + idlen));
    if (!d) throw std::runtime_error("bad decryption key point");
    ibe::DecryptionKey dk;
    dk.id.assign(body.begin() + 4, body.begin() + 4 + idlen);
    dk.d = *d;
    return dk;
}

template <class T>
void save(const std::filesystem::path& path, const T& obj) {
    detail::write_file(path, encode(obj));
}

inline gs::GroupPublicKey load_gpk(const std::filesystem::path& p) { return decode_gpk(detail::read_file(p)); }
inline gs::IssuerKey load_ik(const std::filesystem::path& p) { return decode_ik(detail::read_file(p)); }
inline gs::SigningKey load_sk(const std::filesystem::path& p) { return decode_sk(detail::read_file(p)); }
inline ibe::Params load_params(const std::filesystem::path& p) { return decode_params(detail::read_file(p)); }
inline ibe::MasterKey load_msk(const std::filesystem::path& p) { return decode_msk(detail::read_file(p)); }
inline ibe::DecryptionKey load_dk(const std::filesystem::path& p) { return decode_dk(detail::read_file(p)); }

}  // namespace anonchan::keyfiles
