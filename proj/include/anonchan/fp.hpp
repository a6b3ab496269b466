#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "anonchan/bytes.hpp"

namespace anonchan {

using Limbs = std::array<uint64_t, 4>;  // little-endian limb order
using u128 = unsigned __int128;

namespace detail {

inline bool limbs_ge(const Limbs& a, const Limbs& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}

inline bool limbs_is_zero(const Limbs& a) {
    return (a[0] | a[1] | a[2] | a[3]) == 0;
}

// returns carry out
inline uint64_t limbs_add(Limbs& a, const Limbs& b) {
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
        c += (u128)a[i] + b[i];
        a[i] = (uint64_t)c;
        c >>= 64;
    }
    return (uint64_t)c;
}

// returns borrow out
inline uint64_t limbs_sub(Limbs& a, const Limbs& b) {
    uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        uint64_t bi = b[i] + borrow;
        borrow = (bi < b[i]) || (a[i] < bi);
        a[i] -= bi;
    }
    return borrow;
}

inline void limbs_shr1(Limbs& a) {
    for (int i = 0; i < 3; ++i) a[i] = (a[i] >> 1) | (a[i + 1] << 63);
    a[3] >>= 1;
}

// divide by a small word; returns quotient, sets rem
inline Limbs limbs_div_u64(const Limbs& a, uint64_t d, uint64_t* rem = nullptr) {
    Limbs q{};
    u128 r = 0;
    for (int i = 3; i >= 0; --i) {
        r = (r << 64) | a[i];
        q[i] = (uint64_t)(r / d);
        r %= d;
    }
    if (rem) *rem = (uint64_t)r;
    return q;
}

inline Limbs limbs_from_be(ByteView b) {
    Limbs out{};
    for (size_t i = 0; i < 32; ++i)
        out[3 - i / 8] |= (uint64_t)b[i] << (8 * (7 - i % 8));
    return out;
}

inline void limbs_to_be(const Limbs& a, std::span<uint8_t> out) {
    for (size_t i = 0; i < 32; ++i)
        out[i] = (uint8_t)(a[3 - i / 8] >> (8 * (7 - i % 8)));
}

}  // namespace detail

// Prime-field element in Montgomery form (R = 2^256), modulus from Params.
template <class Params>
class Fp {
public:
    static constexpr Limbs MOD = Params::modulus;

    Fp() = default;

    static Fp zero() { return Fp{}; }
    static Fp one() { return from_u64(1); }

    static Fp from_u64(uint64_t v) {
        Fp out;
        out.v_ = mont_mul(Limbs{v, 0, 0, 0}, r2());
        return out;
    }

    // canonical 32-byte big-endian, rejects values >= modulus
    static std::optional<Fp> from_bytes(ByteView b) {
        if (b.size() != 32) return std::nullopt;
        Limbs raw = detail::limbs_from_be(b);
        if (detail::limbs_ge(raw, MOD)) return std::nullopt;
        Fp out;
        out.v_ = mont_mul(raw, r2());
        return out;
    }

    // reduce an arbitrary 64-byte big-endian value mod the modulus
    static Fp from_bytes_wide(ByteView b) {
        if (b.size() != 64) throw std::invalid_argument("wide input must be 64 bytes");
        Limbs hi = detail::limbs_from_be(b.first(32));
        Limbs lo = detail::limbs_from_be(b.subspan(32));
        Fp out;
        Limbs hi_m = mont_mul(hi, r2());          // hi * R
        hi_m = mont_mul(hi_m, r2());              // mont(hi * 2^256)
        Limbs lo_m = mont_mul(lo, r2());          // mont(lo)
        out.v_ = mod_add(hi_m, lo_m);
        return out;
    }

    void to_bytes(std::span<uint8_t> out) const {
        detail::limbs_to_be(to_plain(), out);
    }
    std::array<uint8_t, 32> to_bytes() const {
        std::array<uint8_t, 32> out;
        to_bytes(std::span<uint8_t>(out));
        return out;
    }

    Limbs to_plain() const { return mont_mul(v_, Limbs{1, 0, 0, 0}); }

    bool is_zero() const { return detail::limbs_is_zero(v_); }
    bool operator==(const Fp& o) const { return v_ == o.v_; }
    bool operator!=(const Fp& o) const { return v_ != o.v_; }

    Fp operator+(const Fp& o) const {
        Fp out;
        out.v_ = mod_add(v_, o.v_);
        return out;
    }
    Fp operator-(const Fp& o) const {
        Fp out;
        out.v_ = mod_sub(v_, o.v_);
        return out;
    }
    Fp operator-() const {
        Fp out;
        if (!is_zero()) {
            out.v_ = MOD;
            detail::limbs_sub(out.v_, v_);
        }
        return out;
    }
    Fp operator*(const Fp& o) const {
        Fp out;
        out.v_ = mont_mul(v_, o.v_);
        return out;
    }
    Fp& operator+=(const Fp& o) { return *this = *this + o; }
    Fp& operator-=(const Fp& o) { return *this = *this - o; }
    Fp& operator*=(const Fp& o) { return *this = *this * o; }

    Fp square() const { return *this * *this; }
    Fp dbl() const { return *this + *this; }

    Fp pow(const Limbs& e) const {
        Fp out = one();
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
        return started ? out : one();
    }

    // binary extended gcd; zero maps to zero
    Fp invert() const {
        if (is_zero()) return Fp{};
        Limbs a = to_plain();
        Limbs b = MOD;
        Limbs u{1, 0, 0, 0};
        Limbs v{};
        auto halve = [](Limbs& x) {
            if (x[0] & 1) {
                uint64_t carry = detail::limbs_add(x, MOD);
                detail::limbs_shr1(x);
                x[3] |= carry << 63;
            } else {
                detail::limbs_shr1(x);
            }
        };
        while (!detail::limbs_is_zero(a)) {
            while ((a[0] & 1) == 0) {
                detail::limbs_shr1(a);
                halve(u);
            }
            while ((b[0] & 1) == 0) {
                detail::limbs_shr1(b);
                halve(v);
            }
            if (detail::limbs_ge(a, b)) {
                detail::limbs_sub(a, b);
                u = mod_sub(u, v);
            } else {
                detail::limbs_sub(b, a);
                v = mod_sub(v, u);
            }
        }
        // b == gcd == 1, v == inverse (plain form)
        Fp out;
        out.v_ = mont_mul(v, r2());
        return out;
    }

    // parity of the canonical representative
    bool sign_bit() const { return to_plain()[0] & 1; }

    static std::array<uint8_t, 32> modulus_bytes() {
        std::array<uint8_t, 32> out;
        detail::limbs_to_be(MOD, std::span<uint8_t>(out));
        return out;
    }

private:
    Limbs v_{};

    static Limbs mod_add(const Limbs& a, const Limbs& b) {
        Limbs out = a;
        uint64_t carry = detail::limbs_add(out, b);
        if (carry || detail::limbs_ge(out, MOD)) detail::limbs_sub(out, MOD);
        return out;
    }

    static Limbs mod_sub(const Limbs& a, const Limbs& b) {
        Limbs out = a;
        if (detail::limbs_sub(out, b)) detail::limbs_add(out, MOD);
        return out;
    }

    static constexpr uint64_t n0inv() {
        // -MOD^{-1} mod 2^64 by Newton iteration
        uint64_t x = 1;
        for (int i = 0; i < 6; ++i) x *= 2 - MOD[0] * x;
        return ~x + 1;
    }

    static const Limbs& r2() {
        static const Limbs val = [] {
            // 2^512 mod MOD via repeated modular doubling
            Limbs acc{1, 0, 0, 0};
            for (int i = 0; i < 512; ++i) acc = mod_add(acc, acc);
            return acc;
        }();
        return val;
    }

    // CIOS Montgomery multiplication; tolerates any inputs < 2^256
    static Limbs mont_mul(const Limbs& a, const Limbs& b) {
        constexpr uint64_t N0 = n0inv();
        uint64_t t[6] = {0, 0, 0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            uint64_t carry = 0;
            for (int j = 0; j < 4; ++j) {
                u128 cs = (u128)a[i] * b[j] + t[j] + carry;
                t[j] = (uint64_t)cs;
                carry = (uint64_t)(cs >> 64);
            }
            u128 cs = (u128)t[4] + carry;
            t[4] = (uint64_t)cs;
            t[5] = (uint64_t)(cs >> 64);

            uint64_t m = t[0] * N0;
            cs = (u128)t[0] + (u128)m * MOD[0];
            carry = (uint64_t)(cs >> 64);
            for (int j = 1; j < 4; ++j) {
                cs = (u128)t[j] + (u128)m * MOD[j] + carry;
                t[j - 1] = (uint64_t)cs;
                carry = (uint64_t)(cs >> 64);
            }
            cs = (u128)t[4] + carry;
            t[3] = (uint64_t)cs;
            t[4] = t[5] + (uint64_t)(cs >> 64);
        }
        Limbs out{t[0], t[1], t[2], t[3]};
        while (t[4] || detail::limbs_ge(out, MOD)) {
            if (detail::limbs_sub(out, MOD)) --t[4];
        }
        return out;
    }
};

// BN254 base field (the curve coordinate field)
struct FqParams {
    static constexpr Limbs modulus = {0x3c208c16d87cfd47ull, 0x97816a916871ca8dull,
                                      0xb85045b68181585dull, 0x30644e72e131a029ull};
};

// BN254 scalar field: the 254-bit prime group order
struct FrParams {
    static constexpr Limbs modulus = {0x43e1f593f0000001ull, 0x2833e84879b97091ull,
                                      0xb85045b68181585dull, 0x30644e72e131a029ull};
};

using Fq = Fp<FqParams>;
using Fr = Fp<FrParams>;

// BN curve parameter x: p = 36x^4+36x^3+24x^2+6x+1, r = 36x^4+36x^3+18x^2+6x+1
inline constexpr uint64_t BN_X = 4965661367192848881ull;

}  // namespace anonchan
