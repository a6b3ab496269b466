#pragma once

#include <vector>

#include "anonchan/groups.hpp"

namespace anonchan {

// Target-group element (image of the pairing, in the order-r cyclotomic subgroup).
using GT = Fp12;

inline constexpr size_t GT_BYTES = 384;
inline constexpr size_t SCALAR_BYTES = 32;

inline Bytes serialize(const GT& f) {
    Bytes out(GT_BYTES);
    std::span<uint8_t> s(out);
    size_t off = 0;
    for (const Fp6* c6 : {&f.c0, &f.c1}) {
        for (const Fp2* c2 : {&c6->c0, &c6->c1, &c6->c2}) {
            c2->c0.to_bytes(s.subspan(off, 32));
            c2->c1.to_bytes(s.subspan(off + 32, 32));
            off += 64;
        }
    }
    return out;
}

inline std::optional<GT> deserialize_gt(ByteView in) {
    if (in.size() != GT_BYTES) return std::nullopt;
    std::array<Fq, 12> c;
    for (size_t i = 0; i < 12; ++i) {
        auto v = Fq::from_bytes(in.subspan(32 * i, 32));
        if (!v) return std::nullopt;
        c[i] = *v;
    }
    return GT{{{c[0], c[1]}, {c[2], c[3]}, {c[4], c[5]}},
              {{c[6], c[7]}, {c[8], c[9]}, {c[10], c[11]}}};
}

inline Bytes serialize(const Fr& s) {
    Bytes out(SCALAR_BYTES);
    s.to_bytes(std::span<uint8_t>(out));
    return out;
}

inline std::optional<Fr> deserialize_fr(ByteView in) {
    return Fr::from_bytes(in);
}

namespace detail {

// non-adjacent form of the Miller loop length 6x+2, most significant digit first
inline const std::vector<int8_t>& miller_naf() {
    static const std::vector<int8_t> naf = [] {
        u128 n = (u128)6 * BN_X + 2;
        std::vector<int8_t> digits;
        while (n) {
            if (n & 1) {
                if ((n & 3) == 1) {
                    digits.push_back(1);
                    n -= 1;
                } else {
                    digits.push_back(-1);
                    n += 1;
                }
            } else {
                digits.push_back(0);
            }
            n >>= 1;
        }
        return std::vector<int8_t>(digits.rbegin(), digits.rend());
    }();
    return naf;
}

// Evaluate the line through t and q (tangent when t == q) at p, under the
// untwist (x, y) -> (x w^2, y w^3):  l = y_p - lam*x_p*w + (lam*x_t - y_t)*w^3.
// Advances t to t + q.
inline Fp12 line_eval(G2Affine& t, const G2Affine& q, const G1Affine& p) {
    Fp2 lam;
    if (t.x == q.x && t.y == q.y) {
        lam = t.x.square().scale(Fq::from_u64(3)) * t.y.dbl().invert();
    } else {
        lam = (q.y - t.y) * (q.x - t.x).invert();
    }
    Fp12 l;
    l.c0.c0 = Fp2::from(p.y);
    l.c1.c0 = -lam.scale(p.x);
    l.c1.c1 = lam * t.x - t.y;
    Fp2 x3 = lam.square() - t.x - q.x;
    t.y = lam * (t.x - x3) - t.y;
    t.x = x3;
    t.infinity = false;
    return l;
}

inline G2Affine g2_frobenius_point(const G2Affine& q) {
    const auto& fc = frobenius_constants();
    return G2Affine::make(q.x.conjugate() * fc.g2x, q.y.conjugate() * fc.g2y);
}

struct MillerPair {
    G1Affine p;
    G2Affine q;
    G2Affine t;  // accumulator
};

inline Fp12 miller_loop(std::vector<MillerPair>& pairs) {
    const auto& naf = miller_naf();
    Fp12 f = Fp12::one();
    for (size_t i = 1; i < naf.size(); ++i) {
        f = f.square();
        for (auto& mp : pairs) f = f * line_eval(mp.t, mp.t, mp.p);
        if (naf[i] == 1) {
            for (auto& mp : pairs) f = f * line_eval(mp.t, mp.q, mp.p);
        } else if (naf[i] == -1) {
            for (auto& mp : pairs) f = f * line_eval(mp.t, mp.q.negate(), mp.p);
        }
    }
    for (auto& mp : pairs) {
        G2Affine q1 = g2_frobenius_point(mp.q);
        G2Affine q2 = g2_frobenius_point(q1).negate();
        f = f * line_eval(mp.t, q1, mp.p);
        f = f * line_eval(mp.t, q2, mp.p);
    }
    return f;
}

// hard part exponent (p^4 - p^2 + 1)/r decomposed in base p:
//   lam0 = -(36x^3 + 30x^2 + 18x + 2), lam1 = 1 - 36x^3 - 18x^2 - 12x,
//   lam2 = 6x^2 + 1, lam3 = 1
inline Fp12 final_exp_hard(const Fp12& f) {
    Fp12 fx = cyclotomic_pow(f, BN_X);
    Fp12 fx2 = cyclotomic_pow(fx, BN_X);
    Fp12 fx3 = cyclotomic_pow(fx2, BN_X);
    Fp12 fx3_36 = cyclotomic_pow(fx3, 36);

    Fp12 a0 = fx3_36 * cyclotomic_pow(fx2, 30) * cyclotomic_pow(fx, 18) * cyclotomic_square(f);
    Fp12 a1 = fx3_36 * cyclotomic_pow(fx2, 18) * cyclotomic_pow(fx, 12);
    Fp12 p1 = frobenius(a1.conjugate() * f);
    Fp12 p2 = frobenius2(cyclotomic_pow(fx2, 6) * f);
    Fp12 p3 = frobenius3(f);
    return p3 * p2 * p1 * a0.conjugate();
}

inline GT final_exponentiation(const Fp12& f) {
    // easy part: f^((p^6 - 1)(p^2 + 1))
    Fp12 g = f.conjugate() * f.invert();
    g = frobenius2(g) * g;
    return final_exp_hard(g);
}

}  // namespace detail

inline GT pair(const G1Affine& p, const G2Affine& q) {
    if (p.infinity || q.infinity) return GT::one();
    std::vector<detail::MillerPair> pairs{{p, q, q}};
    return detail::final_exponentiation(detail::miller_loop(pairs));
}

// product of pairings sharing one Miller loop and final exponentiation
inline GT pair_product(std::span<const std::pair<G1Affine, G2Affine>> inputs) {
    std::vector<detail::MillerPair> pairs;
    pairs.reserve(inputs.size());
    for (const auto& [p, q] : inputs) {
        if (p.infinity || q.infinity) continue;
        pairs.push_back({p, q, q});
    }
    if (pairs.empty()) return GT::one();
    return detail::final_exponentiation(detail::miller_loop(pairs));
}

inline GT gt_mul(const GT& a, const GT& b) { return a * b; }

// inverse of a pairing output (unitary element)
inline GT gt_inv(const GT& a) { return a.conjugate(); }

inline GT gt_pow(const GT& a, const Fr& e) {
    if (e.is_zero()) return GT::one();
    return cyclotomic_pow(a, e.to_plain());
}

// a^(-e) without a full inversion
inline GT gt_pow_neg(const GT& a, const Fr& e) { return gt_pow(a.conjugate(), e); }

// ------------------------------------------------------------ hash helpers

// H3-style hash into Z_r with mandatory domain separation
inline Fr hash_to_scalar(std::string_view domain_tag, ByteView payload) {
    if (domain_tag.empty()) throw std::invalid_argument("domain tag must be nonempty");
    Sha512 h;
    Bytes pre;
    append_u32be(pre, static_cast<uint32_t>(domain_tag.size()));
    h.update(pre);
    h.update(domain_tag);
    h.update(payload);
    auto d = h.finish();
    return Fr::from_bytes_wide(d);
}

// expandable-output mask keyed by a GT element; prefix-stable in out_len
inline Bytes mask_bytes(const GT& seed, size_t out_len) {
    if (out_len == 0) throw std::invalid_argument("mask length must be positive");
    Bytes ser = serialize(seed);
    Bytes out;
    out.reserve(out_len + 64);
    for (uint32_t ctr = 0; out.size() < out_len; ++ctr) {
        Sha512 h;
        h.update(std::string_view("ANC1-MASK"));
        Bytes c;
        append_u32be(c, ctr);
        h.update(c);
        h.update(ser);
        auto d = h.finish();
        append(out, ByteView(d));
    }
    out.resize(out_len);
    return out;
}

// ---------------------------------------------------------------- context

// The published bilinear group: generators, group order, encoded lengths.
struct BilinearContext {
    G1Affine g1;
    G2Affine g2;
    std::array<uint8_t, 32> order_bytes;  // the 254-bit prime group order
    size_t g1_bytes = G1_BYTES;
    size_t g2_bytes = G2_BYTES;
    size_t gt_bytes = GT_BYTES;
    size_t scalar_bytes = SCALAR_BYTES;

    bool non_degenerate() const { return !pair(g1, g2).is_one(); }
};

inline const BilinearContext& context() {
    static const BilinearContext ctx = [] {
        BilinearContext c;
        c.g1 = g1_generator();
        c.g2 = g2_generator();
        c.order_bytes = Fr::modulus_bytes();
        return c;
    }();
    return ctx;
}

}  // namespace anonchan
