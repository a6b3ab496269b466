#pragma once

#include "anonchan/pairing.hpp"

namespace anonchan::ibe {

inline constexpr size_t MAX_MESSAGE_BYTES = 64 * 1024;

struct Params {
    G2Affine p_pub;  // g2^s

    bool well_formed() const {
        return !p_pub.infinity && p_pub.on_curve() && in_prime_subgroup(p_pub);
    }
};

struct MasterKey {
    Fr s;

    bool matches(const Params& params) const {
        return point_mul(context().g2, s) == params.p_pub;
    }
};

struct DecryptionKey {
    Bytes id;     // the identity this key decrypts for
    G1Affine d;   // hash_to_g1(id)^s

    // pairing check: e(d, g2) == e(Q_id, P_pub); holds iff issued under the msk
    bool valid_for(const Params& params) const {
        return pair(d, context().g2) == pair(hash_to_g1(id), params.p_pub);
    }
};

struct Ciphertext {
    G2Affine u;  // g2^r
    Bytes v;     // M xor mask(e(Q_id, P_pub)^r)
};

// wire layout: U || 4-byte big-endian length || V
inline Bytes serialize(const Ciphertext& ct) {
    Bytes out;
    out.reserve(G2_BYTES + 4 + ct.v.size());
    append(out, anonchan::serialize(ct.u));
    append_u32be(out, static_cast<uint32_t>(ct.v.size()));
    append(out, ct.v);
    return out;
}

inline std::optional<Ciphertext> deserialize_ciphertext(ByteView in) {
    if (in.size() < G2_BYTES + 4) return std::nullopt;
    auto u = deserialize_g2(in.first(G2_BYTES));
    if (!u) return std::nullopt;
    uint32_t len = read_u32be(in.subspan(G2_BYTES, 4));
    if (len == 0 || len > MAX_MESSAGE_BYTES) return std::nullopt;
    if (in.size() != G2_BYTES + 4 + len) return std::nullopt;
    Ciphertext ct;
    ct.u = *u;
    ct.v.assign(in.begin() + G2_BYTES + 4, in.end());
    return ct;
}

inline std::pair<Params, MasterKey> setup(RandomSource& rng) {
    Fr s = random_nonzero_fr(rng);
    return {Params{point_mul(context().g2, s)}, MasterKey{s}};
}

inline DecryptionKey extract(const Params&, const MasterKey& msk, ByteView id) {
    return DecryptionKey{Bytes(id.begin(), id.end()), point_mul(hash_to_g1(id), msk.s)};
}

inline Ciphertext encrypt(const Params& params, ByteView id, ByteView msg, RandomSource& rng,
                          size_t max_message = MAX_MESSAGE_BYTES) {
    if (msg.empty()) throw std::invalid_argument("message must be nonempty");
    if (msg.size() > max_message) throw std::invalid_argument("message too large");
    Fr r = random_nonzero_fr(rng);
    Ciphertext ct;
    ct.u = point_mul(context().g2, r);
    GT g_id = pair(hash_to_g1(id), params.p_pub);
    Bytes mask = mask_bytes(gt_pow(g_id, r), msg.size());
    ct.v.resize(msg.size());
    for (size_t i = 0; i < msg.size(); ++i) ct.v[i] = msg[i] ^ mask[i];
    return ct;
}

inline Bytes decrypt(const Params&, const Ciphertext& ct, const DecryptionKey& dk) {
    Bytes mask = mask_bytes(pair(dk.d, ct.u), ct.v.size());
    Bytes out(ct.v.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = ct.v[i] ^ mask[i];
    return out;
}

}  // namespace anonchan::ibe
