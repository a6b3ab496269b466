#pragma once

#include <optional>

#include "anonchan/fp_tower.hpp"
#include "anonchan/hash.hpp"
#include "anonchan/rng.hpp"

namespace anonchan {

inline const Fq& curve_b(const Fq*) {
    static const Fq b = Fq::from_u64(3);
    return b;
}

// twist curve coefficient b' = 3 / (9 + u)
inline const Fp2& curve_b(const Fp2*) {
    static const Fp2 b = Fp2::from(Fq::from_u64(3)) * Fp2{Fq::from_u64(9), Fq::one()}.invert();
    return b;
}

template <class F>
struct AffinePoint {
    F x{}, y{};
    bool infinity = true;

    static AffinePoint identity() { return {}; }
    static AffinePoint make(const F& x, const F& y) { return {x, y, false}; }

    bool operator==(const AffinePoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }

    bool on_curve() const {
        if (infinity) return true;
        return y.square() == x.square() * x + curve_b(static_cast<const F*>(nullptr));
    }

    AffinePoint negate() const {
        if (infinity) return *this;
        return {x, -y, false};
    }
};

// Jacobian coordinates: (X/Z^2, Y/Z^3)
template <class F>
struct JacobianPoint {
    F X{}, Y{}, Z{};  // Z == 0 means identity

    static JacobianPoint identity() {
        return {F::one(), F::one(), F::zero()};
    }
    static JacobianPoint from_affine(const AffinePoint<F>& a) {
        if (a.infinity) return identity();
        return {a.x, a.y, F::one()};
    }

    bool is_identity() const { return Z.is_zero(); }

    JacobianPoint dbl() const {
        if (is_identity()) return *this;
        F A = X.square();
        F B = Y.square();
        F C = B.square();
        F t = (X + B).square() - A - C;
        F D = t + t;
        F E = A + A + A;
        F Fv = E.square();
        F X3 = Fv - D - D;
        F C8 = C + C;
        C8 = C8 + C8;
        C8 = C8 + C8;
        F Y3 = E * (D - X3) - C8;
        F Z3 = (Y * Z) + (Y * Z);
        return {X3, Y3, Z3};
    }

    JacobianPoint add(const JacobianPoint& o) const {
        if (is_identity()) return o;
        if (o.is_identity()) return *this;
        F Z1Z1 = Z.square();
        F Z2Z2 = o.Z.square();
        F U1 = X * Z2Z2;
        F U2 = o.X * Z1Z1;
        F S1 = Y * o.Z * Z2Z2;
        F S2 = o.Y * Z * Z1Z1;
        if (U1 == U2) {
            if (S1 == S2) return dbl();
            return identity();
        }
        F H = U2 - U1;
        F I = (H + H).square();
        F J = H * I;
        F r = (S2 - S1);
        r = r + r;
        F V = U1 * I;
        F X3 = r.square() - J - V - V;
        F S1J = S1 * J;
        F Y3 = r * (V - X3) - S1J - S1J;
        F Z3 = ((Z + o.Z).square() - Z1Z1 - Z2Z2) * H;
        return {X3, Y3, Z3};
    }

    JacobianPoint add(const AffinePoint<F>& a) const {
        return add(from_affine(a));
    }

    AffinePoint<F> to_affine() const {
        if (is_identity()) return AffinePoint<F>::identity();
        F zi = Z.invert();
        F zi2 = zi.square();
        return AffinePoint<F>::make(X * zi2, Y * zi2 * zi);
    }
};

namespace detail {

template <class F>
JacobianPoint<F> mul_limbs(const AffinePoint<F>& p, const Limbs& k) {
    JacobianPoint<F> acc = JacobianPoint<F>::identity();
    bool started = false;
    for (int i = 3; i >= 0; --i) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = acc.dbl();
            if ((k[i] >> bit) & 1) {
                acc = acc.add(p);
                started = true;
            }
        }
    }
    return acc;
}

}  // namespace detail

template <class F>
AffinePoint<F> point_mul(const AffinePoint<F>& p, const Fr& k) {
    if (p.infinity || k.is_zero()) return AffinePoint<F>::identity();
    return detail::mul_limbs(p, k.to_plain()).to_affine();
}

template <class F>
AffinePoint<F> point_add(const AffinePoint<F>& a, const AffinePoint<F>& b) {
    return JacobianPoint<F>::from_affine(a).add(b).to_affine();
}

// multiplication by the full group order, for subgroup checks
template <class F>
bool in_prime_subgroup(const AffinePoint<F>& p) {
    if (p.infinity) return true;
    return detail::mul_limbs(p, FrParams::modulus).is_identity();
}

using G1Affine = AffinePoint<Fq>;
using G2Affine = AffinePoint<Fp2>;
using G1Jacobian = JacobianPoint<Fq>;
using G2Jacobian = JacobianPoint<Fp2>;

inline const G1Affine& g1_generator() {
    static const G1Affine g = G1Affine::make(Fq::one(), Fq::from_u64(2));
    return g;
}

inline const G2Affine& g2_generator() {
    static const G2Affine g = [] {
        auto fq = [](const Limbs& l) {
            std::array<uint8_t, 32> be;
            detail::limbs_to_be(l, std::span<uint8_t>(be));
            return Fq::from_bytes(be).value();
        };
        Fp2 x{fq({0x46debd5cd992f6edull, 0x674322d4f75edaddull, 0x426a00665e5c4479ull, 0x1800deef121f1e76ull}),
              fq({0x97e485b7aef312c2ull, 0xf1aa493335a9e712ull, 0x7260bfb731fb5d25ull, 0x198e9393920d483aull})};
        Fp2 y{fq({0x4ce6cc0166fa7daaull, 0xe3d1e7690c43d37bull, 0x4aab71808dcb408full, 0x12c85ea5db8c6debull}),
              fq({0x55acdadcd122975bull, 0xbc4b313370b38ef3ull, 0xec9e99ad690c3395ull, 0x090689d0585ff075ull})};
        return G2Affine::make(x, y);
    }();
    return g;
}

// ---------------------------------------------------------------- encodings
// G1: 33 bytes, prefix 0x02/0x03 by y parity + big-endian x; identity = 33 zero bytes
// G2: 65 bytes, prefix + x.c0 + x.c1

inline constexpr size_t G1_BYTES = 33;
inline constexpr size_t G2_BYTES = 65;

inline Bytes serialize(const G1Affine& p) {
    Bytes out(G1_BYTES, 0);
    if (p.infinity) return out;
    out[0] = p.y.sign_bit() ? 0x03 : 0x02;
    p.x.to_bytes(std::span<uint8_t>(out).subspan(1));
    return out;
}

inline Bytes serialize(const G2Affine& p) {
    Bytes out(G2_BYTES, 0);
    if (p.infinity) return out;
    out[0] = p.y.sign_bit() ? 0x03 : 0x02;
    p.x.c0.to_bytes(std::span<uint8_t>(out).subspan(1, 32));
    p.x.c1.to_bytes(std::span<uint8_t>(out).subspan(33, 32));
    return out;
}

inline std::optional<G1Affine> deserialize_g1(ByteView in) {
    if (in.size() != G1_BYTES) return std::nullopt;
    if (in[0] == 0x00) {
        for (size_t i = 1; i < in.size(); ++i)
            if (in[i]) return std::nullopt;
        return G1Affine::identity();
    }
    if (in[0] != 0x02 && in[0] != 0x03) return std::nullopt;
    auto x = Fq::from_bytes(in.subspan(1));
    if (!x) return std::nullopt;
    Fq rhs = x->square() * *x + curve_b(static_cast<const Fq*>(nullptr));
    static const Limbs e_p1_4 = [] {
        Limbs e = FqParams::modulus;
        e[0] += 1;
        return detail::limbs_div_u64(e, 4);
    }();
    Fq y = rhs.pow(e_p1_4);
    if (y.square() != rhs) return std::nullopt;
    if (y.sign_bit() != (in[0] == 0x03)) y = -y;
    return G1Affine::make(*x, y);  // curve membership implies subgroup (cofactor 1)
}

inline std::optional<G2Affine> deserialize_g2(ByteView in) {
    if (in.size() != G2_BYTES) return std::nullopt;
    if (in[0] == 0x00) {
        for (size_t i = 1; i < in.size(); ++i)
            if (in[i]) return std::nullopt;
        return G2Affine::identity();
    }
    if (in[0] != 0x02 && in[0] != 0x03) return std::nullopt;
    auto xc0 = Fq::from_bytes(in.subspan(1, 32));
    auto xc1 = Fq::from_bytes(in.subspan(33, 32));
    if (!xc0 || !xc1) return std::nullopt;
    Fp2 x{*xc0, *xc1};
    Fp2 rhs = x.square() * x + curve_b(static_cast<const Fp2*>(nullptr));
    auto y = rhs.sqrt();
    if (!y) return std::nullopt;
    if (y->sign_bit() != (in[0] == 0x03)) *y = -*y;
    G2Affine p = G2Affine::make(x, *y);
    if (!in_prime_subgroup(p)) return std::nullopt;
    return p;
}

inline G1Affine random_g1(RandomSource& rng);  // defined after random_fr

inline Fr random_fr(RandomSource& rng) {
    std::array<uint8_t, 64> wide;
    rng.fill(wide);
    return Fr::from_bytes_wide(wide);
}

inline Fr random_nonzero_fr(RandomSource& rng) {
    for (;;) {
        Fr v = random_fr(rng);
        if (!v.is_zero()) return v;
    }
}

inline G1Affine random_g1(RandomSource& rng) {
    return point_mul(g1_generator(), random_nonzero_fr(rng));
}

// --------------------------------------------------- hash to G1 (SVDW map)

namespace detail {

struct SvdwConstants {
    Fq z, c1, c2, c3, c4;
};

inline bool fq_is_square(const Fq& a) {
    if (a.is_zero()) return true;
    static const Limbs e_p1_2 = [] {
        Limbs e = FqParams::modulus;
        e[0] -= 1;
        return limbs_div_u64(e, 2);
    }();
    return a.pow(e_p1_2) == Fq::one();
}

inline std::optional<Fq> fq_sqrt(const Fq& a) {
    static const Limbs e_p1_4 = [] {
        Limbs e = FqParams::modulus;
        e[0] += 1;
        return limbs_div_u64(e, 4);
    }();
    Fq s = a.pow(e_p1_4);
    if (s.square() != a) return std::nullopt;
    return s;
}

inline const SvdwConstants& svdw_constants() {
    static const SvdwConstants sc = [] {
        const Fq b = curve_b(static_cast<const Fq*>(nullptr));
        auto g = [&](const Fq& x) { return x.square() * x + b; };
        Fq half_inv = Fq::from_u64(2).invert();
        for (uint64_t mag = 1; mag < 50; ++mag) {
            for (int sign = 0; sign < 2; ++sign) {
                Fq z = Fq::from_u64(mag);
                if (sign) z = -z;
                Fq gz = g(z);
                if (gz.is_zero()) continue;
                Fq three_z2 = z.square() * Fq::from_u64(3);
                if (three_z2.is_zero()) continue;
                Fq rad = -(gz * three_z2);
                if (!fq_is_square(rad)) continue;
                if (!fq_is_square(gz) && !fq_is_square(g(-z * half_inv))) continue;
                SvdwConstants out;
                out.z = z;
                out.c1 = gz;
                out.c2 = -z * half_inv;
                Fq c3 = fq_sqrt(rad).value();
                out.c3 = c3.sign_bit() ? -c3 : c3;
                out.c4 = -(gz * Fq::from_u64(4)) * three_z2.invert();
                return out;
            }
        }
        throw std::logic_error("no svdw parameter found");
    }();
    return sc;
}

inline G1Affine svdw_map(const Fq& u) {
    const auto& sc = svdw_constants();
    const Fq b = curve_b(static_cast<const Fq*>(nullptr));
    auto g = [&](const Fq& x) { return x.square() * x + b; };
    Fq tv1 = u.square() * sc.c1;
    Fq tv2 = Fq::one() + tv1;
    tv1 = Fq::one() - tv1;
    Fq tv3 = tv1 * tv2;
    tv3 = tv3.is_zero() ? Fq::zero() : tv3.invert();
    Fq tv4 = u * tv1 * tv3 * sc.c3;
    Fq x1 = sc.c2 - tv4;
    Fq x2 = sc.c2 + tv4;
    Fq x3 = (tv2.square() * tv3).square() * sc.c4 + sc.z;
    Fq x;
    if (fq_is_square(g(x1))) {
        x = x1;
    } else if (fq_is_square(g(x2))) {
        x = x2;
    } else {
        x = x3;
    }
    Fq y = fq_sqrt(g(x)).value();  // one of the three candidates is always square
    if (u.sign_bit() != y.sign_bit()) y = -y;
    return G1Affine::make(x, y);
}

}  // namespace detail

// deterministic hash onto G1; never returns the identity
inline G1Affine hash_to_g1(ByteView id) {
    for (uint8_t attempt = 0;; ++attempt) {
        auto field_elem = [&](uint8_t idx) {
            Sha512 h;
            h.update(std::string_view("ANC1-H2C"));
            std::array<uint8_t, 2> sel{idx, attempt};
            h.update(ByteView(sel));
            h.update(id);
            auto d = h.finish();
            return Fq::from_bytes_wide(d);
        };
        G1Affine p = point_add(detail::svdw_map(field_elem(0)), detail::svdw_map(field_elem(1)));
        if (!p.infinity) return p;
    }
}

}  // namespace anonchan
