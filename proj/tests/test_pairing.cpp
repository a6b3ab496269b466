#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "anonchan/pairing.hpp"
#include "golden_util.hpp"

using namespace anonchan;
using testutil::golden;

TEST_CASE("pairing matches reference vectors") {
    for (const auto& t : golden()["pairing"]) {
        G1Affine p = point_mul(g1_generator(), testutil::fr(t["a"]));
        G2Affine q = point_mul(g2_generator(), testutil::fr(t["b"]));
        CHECK(to_hex(serialize(pair(p, q))) == t["gt"]);
    }
}

TEST_CASE("final exponentiation matches reference vectors") {
    for (const auto& t : golden()["final_exp"]) {
        GT f = deserialize_gt(testutil::hex_bytes(t["f"])).value();
        CHECK(to_hex(serialize(detail::final_exponentiation(f))) == t["out"]);
    }
}

TEST_CASE("bilinearity over 200 random exponent pairs") {
    DeterministicRandom rng(31);
    const GT base = pair(g1_generator(), g2_generator());
    for (int i = 0; i < 200; ++i) {
        Fr x = random_fr(rng), y = random_fr(rng);
        GT lhs = pair(point_mul(g1_generator(), x), point_mul(g2_generator(), y));
        CHECK(lhs == gt_pow(base, x * y));
    }
}

TEST_CASE("non-degeneracy and degenerate inputs") {
    const GT e = pair(g1_generator(), g2_generator());
    CHECK_FALSE(e.is_one());
    CHECK(context().non_degenerate());
    CHECK(pair(G1Affine::identity(), g2_generator()).is_one());
    CHECK(pair(g1_generator(), G2Affine::identity()).is_one());
    // doubling one side squares the pairing
    G1Affine g1_2 = point_add(g1_generator(), g1_generator());
    CHECK(pair(g1_2, g2_generator()) == e.square());
    // the output has order r
    CHECK(cyclotomic_pow(e, FrParams::modulus) == GT::one());
}

TEST_CASE("pair_product equals the product of individual pairings") {
    DeterministicRandom rng(32);
    for (int i = 0; i < 5; ++i) {
        std::vector<std::pair<G1Affine, G2Affine>> inputs;
        GT expected = GT::one();
        for (int j = 0; j < 3; ++j) {
            G1Affine p = random_g1(rng);
            G2Affine q = point_mul(g2_generator(), random_nonzero_fr(rng));
            inputs.emplace_back(p, q);
            expected = expected * pair(p, q);
        }
        CHECK(pair_product(inputs) == expected);
    }
    CHECK(pair_product(std::span<const std::pair<G1Affine, G2Affine>>{}).is_one());
}

TEST_CASE("gt exponentiation and cyclotomic squaring") {
    DeterministicRandom rng(33);
    const GT e = pair(g1_generator(), g2_generator());
    CHECK(cyclotomic_square(e) == e.square());
    Fr a = random_fr(rng), b = random_fr(rng);
    CHECK(gt_pow(e, a) * gt_pow(e, b) == gt_pow(e, a + b));
    CHECK(gt_pow(gt_pow(e, a), b) == gt_pow(e, a * b));
    CHECK(gt_pow(e, Fr::zero()).is_one());
    // conjugation inverts pairing outputs
    CHECK(e * gt_inv(e) == GT::one());
    CHECK(gt_pow_neg(e, a) * gt_pow(e, a) == GT::one());
}

TEST_CASE("gt serialization") {
    DeterministicRandom rng(34);
    const GT e = pair(random_g1(rng), g2_generator());
    Bytes enc = serialize(e);
    REQUIRE(enc.size() == GT_BYTES);
    CHECK(deserialize_gt(enc).value() == e);

    // arbitrary canonical coefficient vectors round-trip at fixed length
    for (int i = 0; i < 1000; ++i) {
        Fp12 f;
        Fq* coeffs[12] = {&f.c0.c0.c0, &f.c0.c0.c1, &f.c0.c1.c0, &f.c0.c1.c1,
                          &f.c0.c2.c0, &f.c0.c2.c1, &f.c1.c0.c0, &f.c1.c0.c1,
                          &f.c1.c1.c0, &f.c1.c1.c1, &f.c1.c2.c0, &f.c1.c2.c1};
        for (Fq* c : coeffs) {
            std::array<uint8_t, 64> wide;
            rng.fill(wide);
            *c = Fq::from_bytes_wide(wide);
        }
        Bytes b = serialize(f);
        REQUIRE(b.size() == GT_BYTES);
        CHECK(deserialize_gt(b).value() == f);
    }
    CHECK_FALSE(deserialize_gt(ByteView(enc).first(GT_BYTES - 1)).has_value());
    // non-canonical coefficient
    Bytes bad = enc;
    auto mod = Fq::modulus_bytes();
    std::copy(mod.begin(), mod.end(), bad.begin());
    CHECK_FALSE(deserialize_gt(bad).has_value());
}

TEST_CASE("hash_to_scalar matches reference vectors and is domain separated") {
    for (const auto& t : golden()["hash_to_scalar"]) {
        std::string payload_hex = t["payload"];
        Bytes payload = payload_hex.empty() ? Bytes{} : testutil::hex_bytes(payload_hex);
        CHECK(hash_to_scalar(t["tag"].get<std::string>(), payload) == testutil::fr(t["out"]));
    }
    Bytes msg{1, 2, 3};
    CHECK(hash_to_scalar("tag-a", msg) == hash_to_scalar("tag-a", msg));
    CHECK_FALSE(hash_to_scalar("tag-a", msg) == hash_to_scalar("tag-b", msg));
    CHECK_THROWS_AS(hash_to_scalar("", msg), std::invalid_argument);
    // empty payload is fine
    (void)hash_to_scalar("tag-a", {});

    DeterministicRandom rng(35);
    std::set<Bytes> outs;
    for (int i = 0; i < 10000; ++i) {
        Bytes payload = rng.bytes(24);
        outs.insert(serialize(hash_to_scalar("collision-probe", payload)));
    }
    CHECK(outs.size() == 10000);
}

TEST_CASE("mask_bytes matches reference vectors, streams by prefix") {
    const GT e = pair(g1_generator(), g2_generator());
    for (const auto& t : golden()["mask_bytes"]) {
        CHECK(to_hex(mask_bytes(e, t["len"])) == t["out"]);
    }
    Bytes m32 = mask_bytes(e, 32);
    Bytes m16 = mask_bytes(e, 16);
    CHECK(Bytes(m32.begin(), m32.begin() + 16) == m16);
    CHECK(mask_bytes(e, 32) == m32);
    CHECK_THROWS_AS(mask_bytes(e, 0), std::invalid_argument);

    DeterministicRandom rng(36);
    GT other = pair(random_g1(rng), g2_generator());
    Bytes o32 = mask_bytes(other, 32);
    CHECK_FALSE(o32 == m32);
}
