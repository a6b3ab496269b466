#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "anonchan/groups.hpp"
#include "golden_util.hpp"

using namespace anonchan;
using testutil::golden;

TEST_CASE("generators and reference scalar multiples") {
    REQUIRE(g1_generator().on_curve());
    REQUIRE(g2_generator().on_curve());
    REQUIRE(in_prime_subgroup(g1_generator()));
    REQUIRE(in_prime_subgroup(g2_generator()));

    for (const auto& t : golden()["g1_mul"]) {
        G1Affine p = point_mul(g1_generator(), testutil::fr(t["k"]));
        CHECK(p.x == testutil::fq(t["x"]));
        CHECK(p.y == testutil::fq(t["y"]));
        CHECK(to_hex(serialize(p)) == t["compressed"]);
    }
    for (const auto& t : golden()["g2_mul"]) {
        G2Affine p = point_mul(g2_generator(), testutil::fr(t["k"]));
        CHECK(p.x.c0 == testutil::fq(t["x"][0]));
        CHECK(p.x.c1 == testutil::fq(t["x"][1]));
        CHECK(p.y.c0 == testutil::fq(t["y"][0]));
        CHECK(p.y.c1 == testutil::fq(t["y"][1]));
        CHECK(to_hex(serialize(p)) == t["compressed"]);
    }
}

TEST_CASE("group laws") {
    DeterministicRandom rng(21);
    Fr a = random_fr(rng), b = random_fr(rng);
    G1Affine pa = point_mul(g1_generator(), a);
    G1Affine pb = point_mul(g1_generator(), b);
    CHECK(point_add(pa, pb) == point_mul(g1_generator(), a + b));
    CHECK(point_add(pa, pa.negate()).infinity);
    CHECK(point_add(pa, G1Affine::identity()) == pa);

    G2Affine qa = point_mul(g2_generator(), a);
    G2Affine qb = point_mul(g2_generator(), b);
    CHECK(point_add(qa, qb) == point_mul(g2_generator(), a + b));
    CHECK(point_add(qa, qa.negate()).infinity);

    // order annihilates both groups
    CHECK(detail::mul_limbs(pa, FrParams::modulus).is_identity());
    CHECK(detail::mul_limbs(qa, FrParams::modulus).is_identity());
}

TEST_CASE("serialization round-trips at fixed length") {
    DeterministicRandom rng(22);
    for (int i = 0; i < 1000; ++i) {
        G1Affine p = random_g1(rng);
        Bytes enc = serialize(p);
        REQUIRE(enc.size() == G1_BYTES);
        CHECK(deserialize_g1(enc).value() == p);
    }
    for (int i = 0; i < 1000; ++i) {
        G2Affine q = point_mul(g2_generator(), random_nonzero_fr(rng));
        Bytes enc = serialize(q);
        REQUIRE(enc.size() == G2_BYTES);
        CHECK(deserialize_g2(enc).value() == q);
    }
}

TEST_CASE("identity encoding is pinned to all-zero bytes") {
    Bytes zero_g1(G1_BYTES, 0);
    CHECK(deserialize_g1(zero_g1).value().infinity);
    CHECK(serialize(G1Affine::identity()) == zero_g1);
    Bytes zero_g2(G2_BYTES, 0);
    CHECK(deserialize_g2(zero_g2).value().infinity);
    CHECK(serialize(G2Affine::identity()) == zero_g2);
}

TEST_CASE("decoder rejects malformed points") {
    DeterministicRandom rng(23);
    G1Affine p = random_g1(rng);
    Bytes enc = serialize(p);

    SECTION("truncated buffer") {
        CHECK_FALSE(deserialize_g1(ByteView(enc).first(enc.size() - 1)).has_value());
        CHECK_FALSE(deserialize_g2(ByteView(enc)).has_value());
    }
    SECTION("bad prefix byte") {
        enc[0] = 0x05;
        CHECK_FALSE(deserialize_g1(enc).has_value());
    }
    SECTION("identity prefix with trailing garbage") {
        enc[0] = 0x00;
        CHECK_FALSE(deserialize_g1(enc).has_value());
    }
    SECTION("non-canonical x >= p") {
        Bytes bad{0x02};
        auto mod = Fq::modulus_bytes();
        append(bad, ByteView(mod));
        CHECK_FALSE(deserialize_g1(bad).has_value());
    }
    SECTION("x with no point on the curve") {
        int rejected = 0;
        for (uint64_t k = 0; k < 40; ++k) {
            Bytes cand(G1_BYTES, 0);
            cand[0] = 0x02;
            cand[32] = static_cast<uint8_t>(5 + k);
            if (!deserialize_g1(cand).has_value()) ++rejected;
        }
        CHECK(rejected > 0);  // about half of all x values have no curve point
    }
    SECTION("g2 point outside the prime-order subgroup") {
        // find a twist point by x search; with overwhelming probability its
        // order is a multiple of the large cofactor, so decode must refuse it
        int rejected = 0;
        for (uint64_t k = 1; k < 60 && rejected == 0; ++k) {
            Fp2 x{Fq::from_u64(k), Fq::from_u64(3)};
            Fp2 rhs = x.square() * x + curve_b(static_cast<const Fp2*>(nullptr));
            auto y = rhs.sqrt();
            if (!y) continue;
            G2Affine cand = G2Affine::make(x, *y);
            REQUIRE(cand.on_curve());
            if (in_prime_subgroup(cand)) continue;
            Bytes enc2(G2_BYTES, 0);
            enc2[0] = y->sign_bit() ? 0x03 : 0x02;
            x.c0.to_bytes(std::span<uint8_t>(enc2).subspan(1, 32));
            x.c1.to_bytes(std::span<uint8_t>(enc2).subspan(33, 32));
            CHECK_FALSE(deserialize_g2(enc2).has_value());
            ++rejected;
        }
        CHECK(rejected == 1);
    }
}

TEST_CASE("hash_to_g1 matches reference vectors") {
    for (const auto& t : golden()["hash_to_g1"]) {
        std::string id_hex = t["id"];
        Bytes id = id_hex.empty() ? Bytes{} : testutil::hex_bytes(id_hex);
        G1Affine p = hash_to_g1(id);
        CHECK(p.x == testutil::fq(t["x"]));
        CHECK(p.y == testutil::fq(t["y"]));
        CHECK(to_hex(serialize(p)) == t["compressed"]);
    }
}

TEST_CASE("hash_to_g1 behaves like a random oracle into the group") {
    DeterministicRandom rng(24);
    std::set<Bytes> seen;
    for (int i = 0; i < 10000; ++i) {
        Bytes id = rng.bytes(16);
        G1Affine p = hash_to_g1(id);
        REQUIRE_FALSE(p.infinity);
        REQUIRE(p.on_curve());
        seen.insert(serialize(p));
        if (i == 0) CHECK(hash_to_g1(id) == p);  // deterministic
    }
    CHECK(seen.size() == 10000);
}
