#pragma once

#include "anonchan/pairing.hpp"

namespace anonchan::gs {

inline constexpr std::string_view H3_TAG = "ANC1-GS-H3";
inline constexpr size_t SIGNATURE_BYTES = G1_BYTES + 4 * SCALAR_BYTES;

struct GroupPublicKey {
    G1Affine h;
    G2Affine w;  // g2^gamma
    GT e_g1_g2;
    GT e_g1_w;
    // signing-time precomputations; superset of the published tuple
    GT e_h_g2;
    GT e_h_w;

    // injective fixed-length encoding bound into every challenge hash
    Bytes canonical_bytes() const {
        Bytes out;
        append(out, std::string_view("ANC1-GPK"));
        append(out, serialize(context().g1));
        append(out, serialize(context().g2));
        append(out, serialize(h));
        append(out, serialize(w));
        return out;
    }

    // recompute the cached pairings from (h, W)
    bool consistent() const {
        if (h.infinity || !h.on_curve() || !w.on_curve() || !in_prime_subgroup(w))
            return false;
        return e_g1_g2 == pair(context().g1, context().g2) &&
               e_g1_w == pair(context().g1, w) &&
               e_h_g2 == pair(h, context().g2) &&
               e_h_w == pair(h, w);
    }

    static GroupPublicKey from_elements(const G1Affine& h, const G2Affine& w) {
        GroupPublicKey gpk;
        gpk.h = h;
        gpk.w = w;
        gpk.e_g1_g2 = pair(context().g1, context().g2);
        gpk.e_g1_w = pair(context().g1, w);
        gpk.e_h_g2 = pair(h, context().g2);
        gpk.e_h_w = pair(h, w);
        return gpk;
    }
};

struct IssuerKey {
    Fr gamma;
};

struct SigningKey {
    Fr x;
    Fr y;
    G1Affine a;  // (g1 h^{-y})^{1/(gamma+x)}
    GT e_a_g2;   // cached for signing; recomputed on load, never serialized

    static SigningKey make(const Fr& x, const Fr& y, const G1Affine& a) {
        return {x, y, a, pair(a, context().g2)};
    }

    // SDH certificate relation: e(A, g2^x W) == e(g1,g2) e(h,g2)^{-y}
    bool valid_for(const GroupPublicKey& gpk) const {
        G2Affine rhs2 = point_add(point_mul(context().g2, x), gpk.w);
        return pair(a, rhs2) == gpk.e_g1_g2 * gt_pow_neg(gpk.e_h_g2, y);
    }
};

struct GroupSignature {
    G1Affine t;
    Fr c, s_x, s_delta, s_beta;
};

struct SignRandomness {
    Fr beta;
    Fr delta;  // beta*x - y for the key in use
    Fr r_x, r_delta, r_beta;

    static SignRandomness fresh(const SigningKey& sk, RandomSource& rng) {
        SignRandomness r;
        r.beta = random_fr(rng);
        r.delta = r.beta * sk.x - sk.y;
        r.r_x = random_fr(rng);
        r.r_delta = random_fr(rng);
        r.r_beta = random_fr(rng);
        return r;
    }
};

struct Transcript {
    G1Affine t;
    GT r;
    Fr c, s_x, s_delta, s_beta;
};

struct ExtractedWitness {
    Fr x, y, beta;
    G1Affine a;

    bool satisfies_sdh(const GroupPublicKey& gpk) const {
        G2Affine rhs2 = point_add(point_mul(context().g2, x), gpk.w);
        return pair(a, rhs2) == gpk.e_g1_g2 * gt_pow_neg(gpk.e_h_g2, y);
    }
};

// ----------------------------------------------------------------- encoding
// T || c || s_x || s_delta || s_beta, fixed lengths; normative wire layout

inline Bytes serialize(const GroupSignature& sig) {
    Bytes out;
    out.reserve(SIGNATURE_BYTES);
    append(out, anonchan::serialize(sig.t));
    append(out, anonchan::serialize(sig.c));
    append(out, anonchan::serialize(sig.s_x));
    append(out, anonchan::serialize(sig.s_delta));
    append(out, anonchan::serialize(sig.s_beta));
    return out;
}

inline std::optional<GroupSignature> deserialize_signature(ByteView in) {
    if (in.size() != SIGNATURE_BYTES) return std::nullopt;
    auto t = deserialize_g1(in.first(G1_BYTES));
    if (!t) return std::nullopt;
    GroupSignature sig;
    sig.t = *t;
    std::array<std::optional<Fr>, 4> scalars;
    for (size_t i = 0; i < 4; ++i) {
        scalars[i] = Fr::from_bytes(in.subspan(G1_BYTES + 32 * i, 32));
        if (!scalars[i]) return std::nullopt;
    }
    sig.c = *scalars[0];
    sig.s_x = *scalars[1];
    sig.s_delta = *scalars[2];
    sig.s_beta = *scalars[3];
    return sig;
}

// --------------------------------------------------------------- operations

inline std::pair<GroupPublicKey, IssuerKey> setup(RandomSource& rng) {
    Fr gamma = random_nonzero_fr(rng);
    G1Affine h = random_g1(rng);
    G2Affine w = point_mul(context().g2, gamma);
    return {GroupPublicKey::from_elements(h, w), IssuerKey{gamma}};
}

inline SigningKey join(const GroupPublicKey& gpk, const IssuerKey& ik, RandomSource& rng) {
    for (;;) {
        Fr x = random_fr(rng);
        Fr y = random_fr(rng);
        Fr denom = ik.gamma + x;
        if (denom.is_zero()) continue;  // resample; probability 1/r
        G1Affine base = point_add(context().g1, point_mul(gpk.h, -y));
        G1Affine a = point_mul(base, denom.invert());
        return SigningKey::make(x, y, a);
    }
}

namespace detail {

inline Fr challenge_hash(const GroupPublicKey& gpk, const G1Affine& t, const GT& r,
                         ByteView msg) {
    Bytes payload = gpk.canonical_bytes();
    append(payload, anonchan::serialize(t));
    append(payload, anonchan::serialize(r));
    append_u32be(payload, static_cast<uint32_t>(msg.size()));
    append(payload, msg);
    return hash_to_scalar(H3_TAG, payload);
}

// R' = e(h,g2)^{s_d} e(h,W)^{s_b} / e(T,g2)^{s_x} * (e(T,W)/e(g1,g2))^{-c}
// with the T-dependent part folded into one two-pair product.
inline GT verification_r(const GroupPublicKey& gpk, const G1Affine& t, const Fr& c,
                         const Fr& s_x, const Fr& s_delta, const Fr& s_beta) {
    std::array<std::pair<G1Affine, G2Affine>, 2> prod{{
        {point_mul(t, -s_x), context().g2},
        {point_mul(t, -c), gpk.w},
    }};
    GT fixed = gt_pow(gpk.e_h_g2, s_delta) * gt_pow(gpk.e_h_w, s_beta) * gt_pow(gpk.e_g1_g2, c);
    return fixed * pair_product(prod);
}

}  // namespace detail

inline std::pair<GroupSignature, Transcript> sign_with_randomness(
    const GroupPublicKey& gpk, const SigningKey& sk, ByteView msg, const SignRandomness& rnd) {
    G1Affine t = point_add(sk.a, point_mul(gpk.h, rnd.beta));
    GT e_t_g2 = sk.e_a_g2 * gt_pow(gpk.e_h_g2, rnd.beta);
    GT r = gt_pow(gpk.e_h_g2, rnd.r_delta) * gt_pow(gpk.e_h_w, rnd.r_beta) *
           gt_pow_neg(e_t_g2, rnd.r_x);
    Fr c = detail::challenge_hash(gpk, t, r, msg);
    GroupSignature sig;
    sig.t = t;
    sig.c = c;
    sig.s_x = rnd.r_x + c * sk.x;
    sig.s_delta = rnd.r_delta + c * rnd.delta;
    sig.s_beta = rnd.r_beta + c * rnd.beta;
    return {sig, Transcript{t, r, c, sig.s_x, sig.s_delta, sig.s_beta}};
}

inline GroupSignature sign(const GroupPublicKey& gpk, const SigningKey& sk, ByteView msg,
                           RandomSource& rng) {
    return sign_with_randomness(gpk, sk, msg, SignRandomness::fresh(sk, rng)).first;
}

inline bool verify(const GroupPublicKey& gpk, const GroupSignature& sig, ByteView msg) {
    GT r = detail::verification_r(gpk, sig.t, sig.c, sig.s_x, sig.s_delta, sig.s_beta);
    return sig.c == detail::challenge_hash(gpk, sig.t, r, msg);
}

enum class VerifyStatus { Accept, MalformedEncoding, Rejected };

inline VerifyStatus verify_bytes(const GroupPublicKey& gpk, ByteView sig_bytes, ByteView msg) {
    auto sig = deserialize_signature(sig_bytes);
    if (!sig) return VerifyStatus::MalformedEncoding;
    return verify(gpk, *sig, msg) ? VerifyStatus::Accept : VerifyStatus::Rejected;
}

// zero-knowledge simulator: accepting transcripts without any signing key
inline Transcript simulate(const GroupPublicKey& gpk, ByteView /*msg*/, RandomSource& rng) {
    Transcript tr;
    tr.t = random_g1(rng);
    tr.c = random_fr(rng);
    tr.s_x = random_fr(rng);
    tr.s_delta = random_fr(rng);
    tr.s_beta = random_fr(rng);
    tr.r = detail::verification_r(gpk, tr.t, tr.c, tr.s_x, tr.s_delta, tr.s_beta);
    return tr;
}

// checks the accepting relation the way verification defines it
inline bool transcript_accepting(const GroupPublicKey& gpk, const Transcript& tr) {
    return tr.r == detail::verification_r(gpk, tr.t, tr.c, tr.s_x, tr.s_delta, tr.s_beta);
}

// same relation, recombined independently of the precomputed gpk pairings:
//   R e(T,g2)^{s_x} e(T,W)^c == e(h^{s_d} g1^c, g2) e(h^{s_b}, W)
inline bool transcript_accepting_raw(const GroupPublicKey& gpk, const Transcript& tr) {
    std::array<std::pair<G1Affine, G2Affine>, 2> lhs_prod{{
        {point_mul(tr.t, tr.s_x), context().g2},
        {point_mul(tr.t, tr.c), gpk.w},
    }};
    std::array<std::pair<G1Affine, G2Affine>, 2> rhs_prod{{
        {point_add(point_mul(gpk.h, tr.s_delta), point_mul(context().g1, tr.c)), context().g2},
        {point_mul(gpk.h, tr.s_beta), gpk.w},
    }};
    return tr.r * pair_product(lhs_prod) == pair_product(rhs_prod);
}

// SDH-pair extractor for forked accepting transcripts (same T and R, c != c')
inline std::optional<ExtractedWitness> extract(const GroupPublicKey& gpk, const Transcript& t1,
                                               const Transcript& t2) {
    if (!(t1.t == t2.t) || !(t1.r == t2.r) || t1.c == t2.c) return std::nullopt;
    if (!transcript_accepting(gpk, t1) || !transcript_accepting(gpk, t2)) return std::nullopt;
    Fr dc = t1.c - t2.c;
    Fr dci = dc.invert();
    Fr dx = t1.s_x - t2.s_x;
    Fr dd = t1.s_delta - t2.s_delta;
    Fr db = t1.s_beta - t2.s_beta;
    ExtractedWitness w;
    w.x = dx * dci;
    w.beta = db * dci;
    w.y = (dx * db - dd * dc) * dci * dci;
    w.a = point_add(t1.t, point_mul(gpk.h, -w.beta));
    return w;
}

// serialized size of our signatures plus the reconstructed original-scheme
// size: ours + 3 DDH-group elements + 3 scalars removed by the open-free change
struct SignatureSizeReport {
    size_t ours;
    size_t original;
    double ratio;
};

inline SignatureSizeReport signature_size(const GroupPublicKey&) {
    // a DDH-hard group of 254-bit order encodes points in 33 bytes, like G1
    constexpr size_t ddh_elem = G1_BYTES;
    SignatureSizeReport r;
    r.ours = SIGNATURE_BYTES;
    r.original = r.ours + 3 * ddh_elem + 3 * SCALAR_BYTES;
    r.ratio = static_cast<double>(r.ours) / static_cast<double>(r.original);
    return r;
}

}  // namespace anonchan::gs
