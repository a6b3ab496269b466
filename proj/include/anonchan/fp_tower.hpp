#pragma once

#include <optional>

#include "anonchan/fp.hpp"

namespace anonchan {

// Fp2 = Fq[u]/(u^2 + 1)
struct Fp2 {
    Fq c0, c1;

    static Fp2 zero() { return {}; }
    static Fp2 one() { return {Fq::one(), Fq::zero()}; }
    static Fp2 from(const Fq& a) { return {a, Fq::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool operator==(const Fp2&) const = default;

    Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
    Fp2 operator-() const { return {-c0, -c1}; }

    Fp2 operator*(const Fp2& o) const {
        Fq t0 = c0 * o.c0;
        Fq t1 = c1 * o.c1;
        Fq mid = (c0 + c1) * (o.c0 + o.c1);
        return {t0 - t1, mid - t0 - t1};
    }

    Fp2 square() const {
        Fq a = c0 + c1;
        Fq b = c0 - c1;
        Fq m = c0 * c1;
        return {a * b, m + m};
    }

    Fp2 scale(const Fq& k) const { return {c0 * k, c1 * k}; }
    Fp2 dbl() const { return {c0 + c0, c1 + c1}; }
    Fp2 conjugate() const { return {c0, -c1}; }

    // multiply by xi = 9 + u
    Fp2 mul_by_xi() const {
        Fq nine = Fq::from_u64(9);
        return {c0 * nine - c1, c0 + c1 * nine};
    }

    Fp2 invert() const {
        Fq d = (c0.square() + c1.square()).invert();
        return {c0 * d, -(c1 * d)};
    }

    Fp2 pow(const Limbs& e) const {
        Fp2 out = one();
        bool started = false;
        for (int i = 3; i >= 0; --i) {
            for (int bit = 63; bit >= 0; --bit) {
                if (started) out = out.square();
                if ((e[i] >> bit) & 1) {
                    out = started ? out * *this : *this;
                    started = true;
                }
            }
        }
        return out;
    }

    // parity convention for point compression: low bit of c0, or of c1 when c0 == 0
    bool sign_bit() const { return c0.is_zero() ? c1.sign_bit() : c0.sign_bit(); }

    // square root for p = 3 mod 4; verified, nullopt for non-residues
    std::optional<Fp2> sqrt() const {
        if (is_zero()) return zero();
        static const Limbs e_p3_4 = [] {
            Limbs e = FqParams::modulus;
            e[0] -= 3;  // p odd, no borrow
            return detail::limbs_div_u64(e, 4);
        }();
        Fp2 a1 = pow(e_p3_4);                 // a^((p-3)/4)
        Fp2 alpha = a1.square() * *this;      // a^((p-1)/2)
        Fp2 x0 = a1 * *this;                  // a^((p+1)/4)
        Fp2 cand;
        if (alpha == Fp2{-Fq::one(), Fq::zero()}) {
            cand = Fp2{-x0.c1, x0.c0};        // u * x0
        } else {
            static const Limbs e_p1_2 = [] {
                Limbs e = FqParams::modulus;
                e[0] -= 1;
                return detail::limbs_div_u64(e, 2);
            }();
            cand = (alpha + one()).pow(e_p1_2) * x0;
        }
        if (cand.square() == *this) return cand;
        return std::nullopt;
    }
};

// Fp6 = Fp2[v]/(v^3 - xi)
struct Fp6 {
    Fp2 c0, c1, c2;

    static Fp6 zero() { return {}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6&) const = default;

    Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    Fp6 operator-() const { return {-c0, -c1, -c2}; }

    Fp6 operator*(const Fp6& o) const {
        Fp2 t0 = c0 * o.c0;
        Fp2 t1 = c1 * o.c1;
        Fp2 t2 = c2 * o.c2;
        Fp2 r0 = t0 + ((c1 + c2) * (o.c1 + o.c2) - t1 - t2).mul_by_xi();
        Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - t0 - t1 + t2.mul_by_xi();
        Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - t0 - t2 + t1;
        return {r0, r1, r2};
    }

    Fp6 square() const { return *this * *this; }

    Fp6 scale(const Fp2& k) const { return {c0 * k, c1 * k, c2 * k}; }

    // multiply by v
    Fp6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }

    Fp6 invert() const {
        Fp2 a0 = c0.square() - (c1 * c2).mul_by_xi();
        Fp2 a1 = c2.square().mul_by_xi() - c0 * c1;
        Fp2 a2 = c1.square() - c0 * c2;
        Fp2 t = ((c2 * a1 + c1 * a2).mul_by_xi() + c0 * a0).invert();
        return {a0 * t, a1 * t, a2 * t};
    }
};

// Fp12 = Fp6[w]/(w^2 - v)
struct Fp12 {
    Fp6 c0, c1;

    static Fp12 zero() { return {}; }
    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

    bool is_one() const { return *this == one(); }
    bool operator==(const Fp12&) const = default;

    Fp12 operator+(const Fp12& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fp12 operator-(const Fp12& o) const { return {c0 - o.c0, c1 - o.c1}; }

    Fp12 operator*(const Fp12& o) const {
        Fp6 t0 = c0 * o.c0;
        Fp6 t1 = c1 * o.c1;
        Fp6 mid = (c0 + c1) * (o.c0 + o.c1);
        return {t0 + t1.mul_by_v(), mid - t0 - t1};
    }

    Fp12 square() const {
        Fp6 t0 = c0 * c1;
        Fp6 a = (c0 + c1) * (c0 + c1.mul_by_v());
        return {a - t0 - t0.mul_by_v(), t0 + t0};
    }

    // p^6 Frobenius; the inverse on unitary (cyclotomic-subgroup) elements
    Fp12 conjugate() const { return {c0, -c1}; }

    Fp12 invert() const {
        Fp6 t = (c0 * c0 - (c1 * c1).mul_by_v()).invert();
        return {c0 * t, -(c1 * t)};
    }

    Fp12 pow(const Limbs& e) const {
        Fp12 out = one();
        bool started = false;
        for (int i = 3; i >= 0; --i) {
            for (int bit = 63; bit >= 0; --bit) {
                if (started) out = out.square();
                if ((e[i] >> bit) & 1) {
                    out = started ? out * *this : *this;
                    started = true;
                }
            }
        }
        return out;
    }
};

namespace detail {

struct FrobeniusConstants {
    Fp2 w1;   // xi^((p-1)/6), coefficient for w under p-Frobenius
    Fp2 v1;   // xi^((p-1)/3)
    Fp2 v2;   // xi^(2(p-1)/3)
    Fp2 g2x;  // xi^((p-1)/3), G2 point Frobenius, x coordinate
    Fp2 g2y;  // xi^((p-1)/2)
};

inline const FrobeniusConstants& frobenius_constants() {
    static const FrobeniusConstants fc = [] {
        Limbs pm1 = FqParams::modulus;
        pm1[0] -= 1;
        Fp2 xi{Fq::from_u64(9), Fq::one()};
        FrobeniusConstants out;
        out.w1 = xi.pow(limbs_div_u64(pm1, 6));
        out.v1 = xi.pow(limbs_div_u64(pm1, 3));
        out.v2 = out.v1.square();
        out.g2x = out.v1;
        out.g2y = xi.pow(limbs_div_u64(pm1, 2));
        return out;
    }();
    return fc;
}

}  // namespace detail

inline Fp6 frobenius(const Fp6& a) {
    const auto& fc = detail::frobenius_constants();
    return {a.c0.conjugate(), a.c1.conjugate() * fc.v1, a.c2.conjugate() * fc.v2};
}

inline Fp12 frobenius(const Fp12& a) {
    const auto& fc = detail::frobenius_constants();
    Fp6 f1 = frobenius(a.c1);
    return {frobenius(a.c0), f1.scale(fc.w1)};
}

inline Fp12 frobenius2(const Fp12& a) { return frobenius(frobenius(a)); }
inline Fp12 frobenius3(const Fp12& a) { return frobenius(frobenius2(a)); }

namespace detail {

// squaring in the fp4 subfield, helper for cyclotomic squaring
inline void fp4_square(const Fp2& a, const Fp2& b, Fp2& c0, Fp2& c1) {
    Fp2 t0 = a.square();
    Fp2 t1 = b.square();
    c0 = t1.mul_by_xi() + t0;
    c1 = (a + b).square() - t0 - t1;
}

}  // namespace detail

// Granger-Scott squaring, valid only on cyclotomic-subgroup elements
inline Fp12 cyclotomic_square(const Fp12& f) {
    Fp2 z0 = f.c0.c0, z4 = f.c0.c1, z3 = f.c0.c2;
    Fp2 z2 = f.c1.c0, z1 = f.c1.c1, z5 = f.c1.c2;
    Fp2 t0, t1, t2, t3;
    detail::fp4_square(z0, z1, t0, t1);
    z0 = (t0 - z0).dbl() + t0;
    z1 = (t1 + z1).dbl() + t1;
    detail::fp4_square(z2, z3, t0, t1);
    detail::fp4_square(z4, z5, t2, t3);
    z4 = (t0 - z4).dbl() + t0;
    z5 = (t1 + z5).dbl() + t1;
    Fp2 t = t3.mul_by_xi();
    z2 = (t + z2).dbl() + t;
    z3 = (t2 - z3).dbl() + t2;
    return {{z0, z4, z3}, {z2, z1, z5}};
}

// exponentiation within the cyclotomic subgroup (positive exponent)
inline Fp12 cyclotomic_pow(const Fp12& f, const Limbs& e) {
    Fp12 out = Fp12::one();
    bool started = false;
    for (int i = 3; i >= 0; --i) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) out = cyclotomic_square(out);
            if ((e[i] >> bit) & 1) {
                out = started ? out * f : f;
                started = true;
            }
        }
    }
    return started ? out : Fp12::one();
}

inline Fp12 cyclotomic_pow(const Fp12& f, uint64_t e) {
    return cyclotomic_pow(f, Limbs{e, 0, 0, 0});
}

}  // namespace anonchan
