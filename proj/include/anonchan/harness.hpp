#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <functional>
#include <set>

#include "anonchan/protocol.hpp"
#include "anonchan/wire.hpp"

namespace anonchan::harness {

// --------------------------------------------------------------- statistics

struct ChiSquare {
    std::string component;
    double statistic = 0;
    unsigned dof = 0;
    double p_value = 1.0;
};

using ByteHistogram = std::array<uint64_t, 256>;

inline void accumulate(ByteHistogram& h, ByteView bytes) {
    for (uint8_t b : bytes) ++h[b];
}

inline double chi2_p_value(double stat, unsigned dof) {
    if (dof == 0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

// two-sample test: do the histograms come from the same distribution?
inline ChiSquare chi_square_two_sample(std::string component, const ByteHistogram& a,
                                       const ByteHistogram& b) {
    double n1 = 0, n2 = 0;
    for (int i = 0; i < 256; ++i) {
        n1 += double(a[i]);
        n2 += double(b[i]);
    }
    ChiSquare out{std::move(component)};
    if (n1 == 0 || n2 == 0) return out;
    double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
    unsigned bins = 0;
    for (int i = 0; i < 256; ++i) {
        double tot = double(a[i]) + double(b[i]);
        if (tot == 0) continue;
        double d = k1 * double(a[i]) - k2 * double(b[i]);
        out.statistic += d * d / tot;
        ++bins;
    }
    out.dof = bins > 1 ? bins - 1 : 0;
    out.p_value = chi2_p_value(out.statistic, out.dof);
    return out;
}

inline ChiSquare chi_square_uniform(std::string component, const ByteHistogram& h) {
    double n = 0;
    for (auto c : h) n += double(c);
    ChiSquare out{std::move(component)};
    if (n == 0) return out;
    double expect = n / 256.0;
    for (int i = 0; i < 256; ++i) {
        double d = double(h[i]) - expect;
        out.statistic += d * d / expect;
    }
    out.dof = 255;
    out.p_value = chi2_p_value(out.statistic, out.dof);
    return out;
}

// three binomial standard deviations around 1/2 at n trials
inline double guessing_threshold(size_t trials) {
    return trials == 0 ? 0.5 : 3.0 * std::sqrt(0.25 / double(trials));
}

struct GameResult {
    std::string game;
    size_t trials = 0;
    size_t correct = 0;  // correct guesses, or wins for the forgery game
    size_t voided = 0;
    double advantage = 0;
    double threshold = 0;
    bool pass = false;

    std::string to_line() const {
        char buf[256];
        snprintf(buf, sizeof(buf), "game|%s|trials=%zu|correct=%zu|voided=%zu|advantage=%.5f|threshold=%.5f|%s",
                 game.c_str(), trials, correct, voided, advantage, threshold,
                 pass ? "pass" : "FAIL");
        return buf;
    }
};

// fixed addresses used by the in-process challengers
inline proto::Address game_src() { return {"10.0.0.1", 40000}; }
inline proto::Address game_proxy() { return {"10.0.0.2", 40001}; }
inline proto::Address game_dst() { return {"10.0.0.3", 40002}; }

// --------------------------------------------------------- anonymity (game)

// what the adversary observes in the challenge phase: the relayed frames
struct AnonView {
    Bytes auth_req_frame;  // (sigma*, TempID*, Adr_dst) toward the proxy
    Bytes auth_fwd_frame;  // (sigma*, TempID*, Adr_proxy) toward the SP
    Bytes relayed_c;       // whatever C the adversary returned, post-relay
    gs::GroupSignature sigma;
    proto::TempId temp_id;
    Bytes leak;  // empty unless a (test-only) cheating challenger is in use
};

class AnonAdversary {
public:
    // the three oracles of the anonymity definition, over the challenger's table
    struct Oracles {
        std::function<gs::GroupSignature(int, const proto::TempId&)> send_request;
        std::function<bool(const gs::GroupSignature&, const proto::TempId&)> relay_request;
        std::function<bool(const proto::TempId&, ByteView)> relay_content;
    };

    virtual ~AnonAdversary() = default;
    virtual std::string_view name() const = 0;

    virtual void on_setup(const gs::GroupPublicKey&, const gs::SigningKey& /*sk0*/,
                          const gs::SigningKey& /*sk1*/, const ibe::Params&,
                          const ibe::MasterKey&, Oracles&, RandomSource&) {}
    virtual proto::TempId choose_temp_id(RandomSource& rng) { return proto::TempId::fresh(rng); }
    virtual Bytes make_c(const AnonView&, RandomSource&) { return {}; }
    virtual int guess(const AnonView&, RandomSource&) = 0;
};

inline GameResult game_anonymity(AnonAdversary& adv, size_t trials, RandomSource& rng,
                                 bool leak_bit = false) {
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);
    gs::SigningKey sk[2] = {gs::join(gpk, ik, rng), gs::join(gpk, ik, rng)};
    proto::IdIpTable tbl;  // initialized empty once, as the definition has it

    AnonAdversary::Oracles oracles;
    oracles.send_request = [&](int i, const proto::TempId& id) {
        return gs::sign(gpk, sk[i & 1], id.view(), rng);
    };
    oracles.relay_request = [&](const gs::GroupSignature& sig, const proto::TempId& id) {
        return proto::relay_request(tbl, {sig, id, game_dst()}, game_src(), game_proxy())
            .has_value();
    };
    oracles.relay_content = [&](const proto::TempId& id, ByteView c) {
        auto ct = ibe::deserialize_ciphertext(c);
        if (!ct) return false;  // malformed C is dropped
        return proto::relay_content(tbl, {id, *ct}).has_value();
    };
    adv.on_setup(gpk, sk[0], sk[1], params, msk, oracles, rng);

    GameResult res;
    res.game = std::string("anonymity/") + std::string(adv.name());
    res.trials = trials;
    for (size_t t = 0; t < trials; ++t) {
        proto::TempId star = adv.choose_temp_id(rng);
        uint8_t b = rng.bytes(1)[0] & 1;

        gs::GroupSignature sigma = gs::sign(gpk, sk[b], star.view(), rng);
        auto fwd = proto::relay_request(tbl, {sigma, star, game_dst()}, game_src(), game_proxy());
        AnonView view;
        view.sigma = sigma;
        view.temp_id = star;
        view.auth_req_frame = wire::encode_frame(wire::AuthReq{sigma, star, game_dst()});
        if (fwd)
            view.auth_fwd_frame =
                wire::encode_frame(wire::AuthFwd{fwd->sig, fwd->temp_id, fwd->reply_to});
        if (leak_bit) view.leak = Bytes{b};

        Bytes c = adv.make_c(view, rng);
        if (!c.empty() && oracles.relay_content(star, c)) view.relayed_c = c;
        tbl.remove(star);  // close the challenge session either way

        int guess = adv.guess(view, rng);
        if (guess == b) ++res.correct;
    }
    res.advantage = std::abs(double(res.correct) / double(trials) - 0.5);
    res.threshold = guessing_threshold(trials);
    res.pass = res.advantage <= res.threshold;
    return res;
}

class RandomGuessAnon final : public AnonAdversary {
public:
    std::string_view name() const override { return "random-guess"; }
    int guess(const AnonView&, RandomSource& rng) override { return rng.bytes(1)[0] & 1; }
};

// builds per-key byte profiles from oracle signatures, classifies by L2 distance
class ByteStatsAnon final : public AnonAdversary {
public:
    explicit ByteStatsAnon(size_t samples_per_key = 64) : samples_(samples_per_key) {}
    std::string_view name() const override { return "byte-stats"; }

    void on_setup(const gs::GroupPublicKey&, const gs::SigningKey&, const gs::SigningKey&,
                  const ibe::Params&, const ibe::MasterKey&, Oracles& oracles,
                  RandomSource& rng) override {
        for (int key = 0; key < 2; ++key) {
            profile_[key].assign(gs::SIGNATURE_BYTES, 0.0);
            for (size_t s = 0; s < samples_; ++s) {
                Bytes sig = gs::serialize(oracles.send_request(key, proto::TempId::fresh(rng)));
                for (size_t i = 0; i < sig.size(); ++i) profile_[key][i] += sig[i];
            }
            for (auto& v : profile_[key]) v /= double(samples_);
        }
    }

    int guess(const AnonView& view, RandomSource&) override {
        Bytes sig = gs::serialize(view.sigma);
        double d[2] = {0, 0};
        for (int key = 0; key < 2; ++key) {
            for (size_t i = 0; i < sig.size(); ++i) {
                double diff = double(sig[i]) - profile_[key][i];
                d[key] += diff * diff;
            }
        }
        return d[1] < d[0] ? 1 : 0;
    }

private:
    size_t samples_;
    std::vector<double> profile_[2];
};

// self-test adversary: reads the bit a cheating challenger leaks
class LeakReaderAnon final : public AnonAdversary {
public:
    std::string_view name() const override { return "leak-reader"; }
    int guess(const AnonView& view, RandomSource& rng) override {
        if (!view.leak.empty()) return view.leak[0] & 1;
        return rng.bytes(1)[0] & 1;
    }
};

// --------------------------------------------------- semantic security game

struct SsChallengeInput {
    proto::TempId temp_id;
    Bytes m0, m1;
    gs::SigningKey sk;  // the adversary's own key choice (it holds ik)
};

struct SsView {
    Bytes auth_req_frame;
    ibe::Ciphertext c_star;
    proto::TempId temp_id;
    std::optional<ibe::DecryptionKey> leak;  // cheating challenger only
};

class SsAdversary {
public:
    // returns nullopt when the query is disallowed (challenge identity)
    using KeygenOracle = std::function<std::optional<ibe::DecryptionKey>(const proto::TempId&)>;

    virtual ~SsAdversary() = default;
    virtual std::string_view name() const = 0;
    virtual void on_setup(const gs::GroupPublicKey&, const gs::IssuerKey&, const ibe::Params&) {}
    virtual SsChallengeInput choose(const gs::GroupPublicKey&, const gs::IssuerKey&,
                                    KeygenOracle&, RandomSource&) = 0;
    virtual int guess(const SsView&, KeygenOracle&, RandomSource&) = 0;
};

inline GameResult game_semantic_security(SsAdversary& adv, size_t trials, RandomSource& rng,
                                         bool leak_key = false) {
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);
    adv.on_setup(gpk, ik, params);

    GameResult res;
    res.game = std::string("semantic-security/") + std::string(adv.name());
    res.trials = trials;
    for (size_t t = 0; t < trials; ++t) {
        std::set<std::array<uint8_t, 16>> queried;
        bool challenge_set = false;
        proto::TempId star{};
        bool violated = false;
        SsAdversary::KeygenOracle oracle =
            [&](const proto::TempId& id) -> std::optional<ibe::DecryptionKey> {
            if (challenge_set && id == star) {
                violated = true;  // forbidden query, trial voided
                return std::nullopt;
            }
            queried.insert(id.bytes);
            return proto::user_key_gen(params, msk, id);
        };

        SsChallengeInput in = adv.choose(gpk, ik, oracle, rng);
        if (queried.count(in.temp_id.bytes) || in.m0.size() != in.m1.size() || in.m0.empty()) {
            ++res.voided;
            continue;
        }
        star = in.temp_id;
        challenge_set = true;

        uint8_t b = rng.bytes(1)[0] & 1;
        gs::GroupSignature sigma = gs::sign(gpk, in.sk, star.view(), rng);
        SsView view;
        view.temp_id = star;
        view.auth_req_frame = wire::encode_frame(wire::AuthReq{sigma, star, game_dst()});
        view.c_star = ibe::encrypt(params, star.view(), b ? in.m1 : in.m0, rng);
        if (leak_key) view.leak = proto::user_key_gen(params, msk, star);

        int guess = adv.guess(view, oracle, rng);
        if (violated) {
            ++res.voided;
            continue;
        }
        if (guess == b) ++res.correct;
    }
    size_t counted = res.trials - res.voided;
    res.advantage = counted ? std::abs(double(res.correct) / double(counted) - 0.5) : 0;
    res.threshold = guessing_threshold(counted);
    res.pass = res.advantage <= res.threshold;
    return res;
}

namespace detail {

inline SsChallengeInput default_ss_choice(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik,
                                          RandomSource& rng) {
    SsChallengeInput in;
    in.temp_id = proto::TempId::fresh(rng);
    in.m0 = rng.bytes(48);
    in.m1 = rng.bytes(48);
    in.sk = gs::join(gpk, ik, rng);
    return in;
}

}  // namespace detail

class RandomGuessSs final : public SsAdversary {
public:
    std::string_view name() const override { return "random-guess"; }
    SsChallengeInput choose(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik, KeygenOracle&,
                            RandomSource& rng) override {
        return detail::default_ss_choice(gpk, ik, rng);
    }
    int guess(const SsView&, KeygenOracle&, RandomSource& rng) override {
        return rng.bytes(1)[0] & 1;
    }
};

// queries a key for some other identity and tries to decrypt the challenge
class WrongKeySs final : public SsAdversary {
public:
    std::string_view name() const override { return "wrong-key"; }
    SsChallengeInput choose(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik, KeygenOracle&,
                            RandomSource& rng) override {
        last_ = detail::default_ss_choice(gpk, ik, rng);
        return last_;
    }
    int guess(const SsView& view, KeygenOracle& oracle, RandomSource& rng) override {
        auto dk = oracle(proto::TempId::fresh(rng));  // some unrelated identity
        if (dk) {
            Bytes guess_pt = ibe::decrypt(ibe::Params{}, view.c_star, *dk);
            if (guess_pt == last_.m0) return 0;
            if (guess_pt == last_.m1) return 1;
        }
        return rng.bytes(1)[0] & 1;
    }

private:
    SsChallengeInput last_;
};

// classifies the challenge ciphertext body against the two candidate messages
class ByteStatsSs final : public SsAdversary {
public:
    std::string_view name() const override { return "byte-stats"; }
    SsChallengeInput choose(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik, KeygenOracle&,
                            RandomSource& rng) override {
        last_ = detail::default_ss_choice(gpk, ik, rng);
        return last_;
    }
    int guess(const SsView& view, KeygenOracle&, RandomSource&) override {
        auto score = [&](const Bytes& m) {
            double s = 0;
            size_t n = std::min(m.size(), view.c_star.v.size());
            for (size_t i = 0; i < n; ++i)
                s += std::abs(double(m[i]) - double(view.c_star.v[i]));
            return s;
        };
        return score(last_.m1) < score(last_.m0) ? 1 : 0;
    }

private:
    SsChallengeInput last_;
};

// self-test adversary paired with the leaking challenger
class LeakedKeySs final : public SsAdversary {
public:
    std::string_view name() const override { return "leaked-key"; }
    SsChallengeInput choose(const gs::GroupPublicKey& gpk, const gs::IssuerKey& ik, KeygenOracle&,
                            RandomSource& rng) override {
        last_ = detail::default_ss_choice(gpk, ik, rng);
        return last_;
    }
    int guess(const SsView& view, KeygenOracle&, RandomSource& rng) override {
        if (view.leak) {
            Bytes pt = ibe::decrypt(ibe::Params{}, view.c_star, *view.leak);
            if (pt == last_.m1) return 1;
            if (pt == last_.m0) return 0;
        }
        return rng.bytes(1)[0] & 1;
    }

private:
    SsChallengeInput last_;
};

// ------------------------------------------------------ unforgeability game

struct Forgery {
    Bytes sig_bytes;
    proto::TempId temp_id;
};

class UfAdversary {
public:
    using SignOracle = std::function<gs::GroupSignature(size_t, const proto::TempId&)>;

    virtual ~UfAdversary() = default;
    virtual std::string_view name() const = 0;
    virtual Forgery forge(const gs::GroupPublicKey&, const ibe::Params&, const ibe::MasterKey&,
                          SignOracle&, RandomSource&) = 0;
};

inline GameResult game_unforgeability(UfAdversary& adv, size_t trials, RandomSource& rng) {
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);

    GameResult res;
    res.game = std::string("unforgeability/") + std::string(adv.name());
    res.trials = trials;
    for (size_t t = 0; t < trials; ++t) {
        std::set<Bytes> issued;  // S, as sig || temp_id bytes
        std::vector<gs::SigningKey> keys;
        UfAdversary::SignOracle oracle = [&](size_t i, const proto::TempId& id) {
            while (keys.size() <= i) keys.push_back(gs::join(gpk, ik, rng));
            gs::GroupSignature sig = gs::sign(gpk, keys[i], id.view(), rng);
            Bytes rec = gs::serialize(sig);
            append(rec, id.view());
            issued.insert(rec);
            return sig;
        };

        Forgery f = adv.forge(gpk, params, msk, oracle, rng);
        Bytes rec = f.sig_bytes;
        append(rec, f.temp_id.view());
        if (issued.count(rec)) continue;  // replayed pair, S-membership loss
        if (gs::verify_bytes(gpk, f.sig_bytes, f.temp_id.view()) == gs::VerifyStatus::Accept)
            ++res.correct;
    }
    res.advantage = double(res.correct) / double(trials);  // win rate
    res.threshold = 0;
    res.pass = res.correct == 0;
    return res;
}

class ReplayUf final : public UfAdversary {
public:
    std::string_view name() const override { return "replay"; }
    Forgery forge(const gs::GroupPublicKey&, const ibe::Params&, const ibe::MasterKey&,
                  SignOracle& oracle, RandomSource& rng) override {
        proto::TempId id = proto::TempId::fresh(rng);
        gs::GroupSignature sig = oracle(0, id);
        return {gs::serialize(sig), id};
    }
};

class MaulerUf final : public UfAdversary {
public:
    std::string_view name() const override { return "bit-flip"; }
    Forgery forge(const gs::GroupPublicKey&, const ibe::Params&, const ibe::MasterKey&,
                  SignOracle& oracle, RandomSource& rng) override {
        proto::TempId id = proto::TempId::fresh(rng);
        Bytes sig = gs::serialize(oracle(0, id));
        Bytes coin = rng.bytes(3);
        size_t target = (size_t(coin[0]) << 8 | coin[1]) % (sig.size() + id.bytes.size());
        uint8_t mask = uint8_t(1) << (coin[2] % 8);
        if (target < sig.size()) {
            sig[target] ^= mask;
        } else {
            id.bytes[target - sig.size()] ^= mask;
        }
        return {sig, id};
    }
};

// submits a simulator transcript as a signature; Fiat-Shamir binds c to R
class SimulatorUf final : public UfAdversary {
public:
    std::string_view name() const override { return "simulator-transcript"; }
    Forgery forge(const gs::GroupPublicKey& gpk, const ibe::Params&, const ibe::MasterKey&,
                  SignOracle&, RandomSource& rng) override {
        proto::TempId id = proto::TempId::fresh(rng);
        gs::Transcript tr = gs::simulate(gpk, id.view(), rng);
        gs::GroupSignature sig{tr.t, tr.c, tr.s_x, tr.s_delta, tr.s_beta};
        return {gs::serialize(sig), id};
    }
};

// ----------------------------------------------- simulator / extractor checks

struct ZkReport {
    size_t samples = 0;
    size_t sim_accepting = 0;
    size_t real_verifying = 0;
    bool t_collision_free = true;
    std::vector<ChiSquare> components;
    ChiSquare c_uniformity;
    double p_threshold = 0.01;
    bool pass = false;
};

inline ZkReport check_zero_knowledge(size_t samples, RandomSource& rng,
                                     double p_threshold = 0.01) {
    auto [gpk, ik] = gs::setup(rng);
    gs::SigningKey sk = gs::join(gpk, ik, rng);

    ZkReport rep;
    rep.samples = samples;
    rep.p_threshold = p_threshold;

    const char* names[5] = {"T", "c", "s_x", "s_delta", "s_beta"};
    ByteHistogram real_h[5] = {};
    ByteHistogram sim_h[5] = {};
    ByteHistogram c_tail = {};  // real challenge bytes 1..31, near-uniform by construction
    std::set<Bytes> seen_t;

    for (size_t i = 0; i < samples; ++i) {
        proto::TempId msg = proto::TempId::fresh(rng);

        auto [sig, real_tr] = gs::sign_with_randomness(gpk, sk, msg.view(),
                                                       gs::SignRandomness::fresh(sk, rng));
        if (gs::verify(gpk, sig, msg.view())) ++rep.real_verifying;

        gs::Transcript sim = gs::simulate(gpk, msg.view(), rng);
        if (gs::transcript_accepting_raw(gpk, sim)) ++rep.sim_accepting;

        auto record = [&](const gs::Transcript& tr, ByteHistogram* h) {
            Bytes t_bytes = serialize(tr.t);
            accumulate(h[0], t_bytes);
            accumulate(h[1], serialize(tr.c));
            accumulate(h[2], serialize(tr.s_x));
            accumulate(h[3], serialize(tr.s_delta));
            accumulate(h[4], serialize(tr.s_beta));
            return t_bytes;
        };
        record(real_tr, real_h);
        Bytes sim_t = record(sim, sim_h);
        if (!seen_t.insert(sim_t).second) rep.t_collision_free = false;

        Bytes c_bytes = serialize(real_tr.c);
        accumulate(c_tail, ByteView(c_bytes).subspan(1));
    }

    bool separated = false;
    for (int k = 0; k < 5; ++k) {
        rep.components.push_back(chi_square_two_sample(names[k], real_h[k], sim_h[k]));
        if (rep.components.back().p_value < p_threshold) separated = true;
    }
    rep.c_uniformity = chi_square_uniform("c[1..31]", c_tail);

    rep.pass = rep.sim_accepting == samples && rep.real_verifying == samples &&
               rep.t_collision_free && !separated &&
               rep.c_uniformity.p_value >= p_threshold;
    return rep;
}

struct ExtractorReport {
    size_t trials = 0;
    size_t exact_recoveries = 0;
    size_t sdh_valid = 0;
    bool same_challenge_rejected = false;
    bool tamper_detected = false;
    bool pass = false;
};

inline ExtractorReport check_extractor(size_t trials, RandomSource& rng) {
    auto [gpk, ik] = gs::setup(rng);
    gs::SigningKey sk = gs::join(gpk, ik, rng);

    ExtractorReport rep;
    rep.trials = trials;
    for (size_t i = 0; i < trials; ++i) {
        gs::SignRandomness rnd = gs::SignRandomness::fresh(sk, rng);
        proto::TempId m1 = proto::TempId::fresh(rng);
        proto::TempId m2 = proto::TempId::fresh(rng);
        auto t1 = gs::sign_with_randomness(gpk, sk, m1.view(), rnd).second;
        auto t2 = gs::sign_with_randomness(gpk, sk, m2.view(), rnd).second;
        if (t1.c == t2.c) continue;  // astronomically unlikely hash collision

        auto w = gs::extract(gpk, t1, t2);
        if (!w) continue;
        if (w->x == sk.x && w->y == sk.y && w->a == sk.a) ++rep.exact_recoveries;
        if (w->satisfies_sdh(gpk)) ++rep.sdh_valid;
    }

    {
        gs::SignRandomness rnd = gs::SignRandomness::fresh(sk, rng);
        proto::TempId m = proto::TempId::fresh(rng);
        auto tr = gs::sign_with_randomness(gpk, sk, m.view(), rnd).second;
        rep.same_challenge_rejected = !gs::extract(gpk, tr, tr).has_value();
    }
    {
        gs::SignRandomness rnd = gs::SignRandomness::fresh(sk, rng);
        proto::TempId m1 = proto::TempId::fresh(rng);
        proto::TempId m2 = proto::TempId::fresh(rng);
        auto t1 = gs::sign_with_randomness(gpk, sk, m1.view(), rnd).second;
        auto t2 = gs::sign_with_randomness(gpk, sk, m2.view(), rnd).second;
        t2.s_delta = t2.s_delta + Fr::one();  // break the second transcript
        auto w = gs::extract(gpk, t1, t2);
        // either rejected outright (relation check) or the witness fails SDH
        rep.tamper_detected = !w || !w->satisfies_sdh(gpk);
    }

    rep.pass = rep.exact_recoveries == trials && rep.sdh_valid == trials &&
               rep.same_challenge_rejected && rep.tamper_detected;
    return rep;
}

}  // namespace anonchan::harness
