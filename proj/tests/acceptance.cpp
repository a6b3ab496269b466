// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>

#include "anonchan/harness.hpp"
#include "net_util.hpp"

using namespace anonchan;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    printf("criterion %d [%s]: %s — %s\n", idx, name, pass ? "PASS" : "FAIL", detail.c_str());
    fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Bytes payload_for(const proto::TempId& id, size_t session_index) {
    // deterministic payload per temp id, sizes spanning 1 B .. 64 KiB
    uint64_t seed = 0;
    std::memcpy(&seed, id.bytes.data(), sizeof(seed));
    DeterministicRandom rng(seed ^ 0x9e3779b97f4a7c15ull);
    size_t len;
    if (session_index == 0) len = 1;
    else if (session_index == 1) len = ibe::MAX_MESSAGE_BYTES;
    else {
        Bytes pick = rng.bytes(4);
        len = 1 + (read_u32be(pick) % ibe::MAX_MESSAGE_BYTES);
    }
    return rng.bytes(len);
}

// ---------------------------------------------------------------- criterion 1
void criterion_end_to_end() {
    auto t0 = Clock::now();
    DeterministicRandom rng(1001);
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);

    size_t counter = 0;
    net::SpService::PayloadProvider provider = [&](const proto::TempId& id) {
        return payload_for(id, counter);
    };
    net::GmService gm({}, gpk, ik);
    net::KgcService kgc({}, params, msk);
    net::SpService sp({}, gpk, params, provider);
    bool up = gm.start() && kgc.start() && sp.start();
    net::ProxyService proxy({}, {sp.address(), std::chrono::seconds(30)});
    up = up && proxy.start();
    if (!up) {
        report(1, "end-to-end correctness", false, "services failed to start");
        return;
    }

    auto sk = net::run_join(gm.address());
    if (!sk) {
        report(1, "end-to-end correctness", false, "join failed");
        return;
    }

    net::UserSessionConfig cfg;
    cfg.proxy = proxy.address();
    cfg.sp = sp.address();
    cfg.kgc = kgc.address();
    cfg.content_timeout_ms = 30000;

    size_t ok = 0;
    const size_t kSessions = 100;
    for (counter = 0; counter < kSessions; ++counter) {
        auto out = net::run_user_session(cfg, gpk, *sk, params, rng);
        if (out.status == net::SessionOutcome::Status::Ok &&
            out.content == payload_for(out.temp_id, counter))
            ++ok;
    }
    double secs = seconds_since(t0);
    char detail[160];
    snprintf(detail, sizeof(detail), "%zu/%zu sessions exact, %.1fs (budget 60s)", ok, kSessions,
             secs);
    report(1, "end-to-end correctness", ok == kSessions && secs < 60.0, detail);
    proxy.stop();
    sp.stop();
    kgc.stop();
    gm.stop();
}

// ---------------------------------------------------------------- criterion 2
void criterion_signature_size() {
    DeterministicRandom rng(1002);
    auto [gpk, ik] = gs::setup(rng);
    gs::SigningKey sk = gs::join(gpk, ik, rng);
    auto rep = gs::signature_size(gpk);

    bool sizes_ok = true;
    for (int i = 0; i < 10; ++i) {
        Bytes enc = gs::serialize(gs::sign(gpk, sk, rng.bytes(16), rng));
        if (enc.size() != size_t(G1_BYTES + 4 * SCALAR_BYTES) || enc.size() != rep.ours)
            sizes_ok = false;
    }
    bool ratio_ok = rep.ratio >= 0.40 && rep.ratio <= 0.55;
    char detail[160];
    snprintf(detail, sizeof(detail), "ours=%zuB original=%zuB ratio=%.3f in [0.40,0.55]", rep.ours,
             rep.original, rep.ratio);
    report(2, "signature size claim", sizes_ok && ratio_ok, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_extractor() {
    DeterministicRandom rng(1003);
    auto rep = harness::check_extractor(100, rng);
    char detail[160];
    snprintf(detail, sizeof(detail),
             "%zu/100 exact key recoveries, %zu/100 SDH-valid, guards %s", rep.exact_recoveries,
             rep.sdh_valid, (rep.same_challenge_rejected && rep.tamper_detected) ? "ok" : "broken");
    report(3, "extractor oracle", rep.pass && rep.trials == 100, detail);
}

// ---------------------------------------------------------------- criterion 4
void criterion_simulator() {
    DeterministicRandom rng(1004);
    auto rep = harness::check_zero_knowledge(10000, rng);
    double min_p = 1.0;
    for (const auto& c : rep.components) min_p = std::min(min_p, c.p_value);
    char detail[200];
    snprintf(detail, sizeof(detail),
             "%zu/10000 accepting, %zu/10000 real verified, min component p=%.4f (>=0.01), "
             "c-uniformity p=%.4f, T collisions: %s",
             rep.sim_accepting, rep.real_verifying, min_p, rep.c_uniformity.p_value,
             rep.t_collision_free ? "none" : "found");
    report(4, "simulator oracle", rep.pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_game_baselines() {
    DeterministicRandom rng(1005);
    const size_t kTrials = 1000;
    bool pass = true;
    std::string detail;

    harness::ReplayUf replay;
    harness::MaulerUf mauler;
    harness::SimulatorUf nooracle;
    for (harness::UfAdversary* adv :
         std::initializer_list<harness::UfAdversary*>{&replay, &mauler, &nooracle}) {
        auto r = harness::game_unforgeability(*adv, kTrials, rng);
        pass = pass && r.correct == 0;
        detail += std::string(adv->name()) + " wins=" + std::to_string(r.correct) + "/1000; ";
    }

    harness::RandomGuessAnon rga;
    harness::ByteStatsAnon bsa;
    for (harness::AnonAdversary* adv :
         std::initializer_list<harness::AnonAdversary*>{&rga, &bsa}) {
        auto r = harness::game_anonymity(*adv, kTrials, rng);
        pass = pass && r.advantage <= r.threshold;
        char buf[96];
        snprintf(buf, sizeof(buf), "anon/%s adv=%.4f (3sd=%.4f); ", std::string(adv->name()).c_str(),
                 r.advantage, r.threshold);
        detail += buf;
    }

    harness::RandomGuessSs rgs;
    harness::ByteStatsSs bss;
    for (harness::SsAdversary* adv : std::initializer_list<harness::SsAdversary*>{&rgs, &bss}) {
        auto r = harness::game_semantic_security(*adv, kTrials, rng);
        pass = pass && r.advantage <= r.threshold && r.voided == 0;
        char buf[96];
        snprintf(buf, sizeof(buf), "ss/%s adv=%.4f (3sd=%.4f); ", std::string(adv->name()).c_str(),
                 r.advantage, r.threshold);
        detail += buf;
    }

    harness::LeakReaderAnon leak_anon;
    auto la = harness::game_anonymity(leak_anon, 200, rng, /*leak_bit=*/true);
    harness::LeakedKeySs leak_ss;
    auto ls = harness::game_semantic_security(leak_ss, 200, rng, /*leak_key=*/true);
    pass = pass && la.advantage > 0.45 && ls.advantage > 0.45;
    char buf[96];
    snprintf(buf, sizeof(buf), "cheat-challenger adv=%.3f/%.3f (>0.45)", la.advantage,
             ls.advantage);
    detail += buf;

    report(5, "game baselines", pass, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_table_hygiene() {
    DeterministicRandom rng(1006);
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);
    gs::SigningKey sk = gs::join(gpk, ik, rng);
    Bytes payload = rng.bytes(180);

    testutil::FrameLog sp_log;
    net::ServiceConfig sp_cfg;
    sp_cfg.tap = sp_log.tap();
    net::SpService sp(sp_cfg, gpk, params, payload);
    net::KgcService kgc({}, params, msk);
    bool up = sp.start() && kgc.start();

    net::ProxyService single({}, {sp.address(), std::chrono::seconds(30)});
    up = up && single.start();
    if (!up) {
        report(6, "table hygiene", false, "services failed to start");
        return;
    }

    size_t delivered = 0;
    std::vector<proto::Address> sources;
    auto soak = [&](const proto::Address& entry, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            auto s = testutil::ManualSession::open(entry, sp.address(), gpk, sk, rng);
            if (!s) continue;
            sources.push_back(s->src);
            auto r = s->await();
            if (r.status != net::ReadResult::Status::Ok) continue;
            auto* fwd = std::get_if<wire::ContentFwd>(&*r.msg);
            if (!fwd) continue;
            auto dk = net::run_user_key_gen(kgc.address(), s->temp_id);
            if (dk && proto::get_content(params, fwd->ct, *dk) == payload) ++delivered;
        }
    };

    soak(single.address(), 100);
    size_t single_left = single.table().size();

    // 3-hop chain
    net::ProxyService c3({}, {sp.address(), std::chrono::seconds(30)});
    bool chain_up = c3.start();
    net::ProxyService c2({}, {c3.address(), std::chrono::seconds(30)});
    chain_up = chain_up && c2.start();
    net::ProxyService c1({}, {c2.address(), std::chrono::seconds(30)});
    chain_up = chain_up && c1.start();
    size_t chain_left = 1;
    size_t before_chain = delivered;
    if (chain_up) {
        soak(c1.address(), 100);
        chain_left = c1.table().size() + c2.table().size() + c3.table().size();
    }

    bool src_leaked = false;
    for (const auto& src : sources) {
        Bytes enc = proto::serialize(src);
        std::string txt = src.to_string();
        if (sp_log.any_contains(enc) ||
            sp_log.any_contains(ByteView(reinterpret_cast<const uint8_t*>(txt.data()), txt.size())))
            src_leaked = true;
    }

    char detail[200];
    snprintf(detail, sizeof(detail),
             "%zu/200 delivered, tables after soak: single=%zu chain=%zu, source bytes at SP: %s",
             delivered, single_left, chain_left, src_leaked ? "FOUND" : "none");
    report(6, "table hygiene", delivered == 200 && single_left == 0 && chain_left == 0 &&
                               !src_leaked && before_chain == 100, detail);
    c1.stop(); c2.stop(); c3.stop();
    single.stop();
    sp.stop();
    kgc.stop();
}

// ---------------------------------------------------------------- criterion 7
void criterion_codec_fuzz() {
    DeterministicRandom rng(1007);
    DeterministicRandom fuzz(1008);
    auto [gpk, ik] = gs::setup(rng);
    auto [params, msk] = ibe::setup(rng);
    gs::SigningKey sk = gs::join(gpk, ik, rng);

    std::vector<Bytes> seeds;
    proto::TempId id = proto::TempId::fresh(rng);
    proto::Address addr{"127.0.0.1", 4242};
    gs::GroupSignature sig = gs::sign(gpk, sk, id.view(), rng);
    ibe::Ciphertext ct = ibe::encrypt(params, id.view(), rng.bytes(64), rng);
    seeds.push_back(wire::encode_frame(wire::JoinReq{}));
    seeds.push_back(wire::encode_frame(wire::JoinResp{sk.x, sk.y, sk.a}));
    seeds.push_back(wire::encode_frame(wire::ExtractReq{id}));
    seeds.push_back(wire::encode_frame(wire::ExtractResp{id, ibe::extract(params, msk, id.view()).d}));
    seeds.push_back(wire::encode_frame(wire::AuthReq{sig, id, addr}));
    seeds.push_back(wire::encode_frame(wire::AuthFwd{sig, id, addr}));
    seeds.push_back(wire::encode_frame(wire::Content{id, ct}));
    seeds.push_back(wire::encode_frame(wire::ContentFwd{ct}));
    seeds.push_back(wire::encode_frame(wire::Refuse{1}));
    seeds.push_back(wire::encode_frame(wire::Error{1, "x"}));

    const size_t kInputs = 100000;
    size_t ok = 0;
    std::array<size_t, 6> error_counts{};
    for (size_t i = 0; i < kInputs; ++i) {
        Bytes input;
        uint8_t strategy = fuzz.bytes(1)[0] % 4;
        if (strategy == 0) {
            input = fuzz.bytes(fuzz.bytes(1)[0]);
        } else if (strategy == 1) {
            input = seeds[i % seeds.size()];
            Bytes coin = fuzz.bytes(3);
            if (!input.empty())
                input[(size_t(coin[0]) << 8 | coin[1]) % input.size()] ^= uint8_t(1) << (coin[2] % 8);
        } else if (strategy == 2) {
            input = seeds[i % seeds.size()];
            input.resize(size_t(input.size()) * (fuzz.bytes(1)[0] % 101) / 100);
        } else {
            input = seeds[i % seeds.size()];
            append(input, fuzz.bytes(fuzz.bytes(1)[0] % 40));
        }
        auto r = wire::decode_frame(input);
        if (std::holds_alternative<wire::WireMessage>(r)) {
            ++ok;
        } else {
            ++error_counts[size_t(std::get<wire::DecodeError>(r))];
        }
    }
    size_t classified = ok;
    for (auto c : error_counts) classified += c;
    char detail[200];
    snprintf(detail, sizeof(detail),
             "%zu inputs, 0 crashes, %zu decoded, errors t/m/v/u/o/b=%zu/%zu/%zu/%zu/%zu/%zu",
             kInputs, ok, error_counts[0], error_counts[1], error_counts[2], error_counts[3],
             error_counts[4], error_counts[5]);
    report(7, "codec robustness", classified == kInputs, detail);
}

// ---------------------------------------------------------------- criterion 8
void criterion_bench() {
    DeterministicRandom rng(1009);
    auto algo = bench::bench_algorithms(10, rng);
    const char* names[8] = {"GM.Setup",    "KGC.Setup",     "Join",        "UserKeyGen",
                            "SendRequest", "ValidityCheck", "SendContent", "GetContent"};
    bool rows_ok = algo.rows.size() == 8;
    for (auto* n : names) rows_ok = rows_ok && algo.find(n) != nullptr;

    const size_t kIters = 60;
    auto online = bench::bench_session({kIters, false, 256}, rng);
    auto offline = bench::bench_session({kIters, true, 256}, rng);
    const bench::BenchRow* on_row = online.find("Session");
    const bench::BenchRow* off_row = offline.find("Session (offline-sign)");
    bool session_ok = on_row && off_row;
    bool faster = session_ok && off_row->mean_ms < on_row->mean_ms;

    printf("%s", algo.to_text().c_str());
    if (session_ok) {
        printf("%s%s", online.to_text().c_str(), offline.to_text().c_str());
    }
    char detail[200];
    snprintf(detail, sizeof(detail),
             "8/8 algorithm rows %s; online mean=%.2fms offline mean=%.2fms over %zu iterations (strictly smaller: %s)",
             rows_ok ? "present" : "MISSING", session_ok ? on_row->mean_ms : -1.0,
             session_ok ? off_row->mean_ms : -1.0, kIters, faster ? "yes" : "no");
    report(8, "benchmark report", rows_ok && session_ok && faster, detail);
}

}  // namespace

int main() {
    auto t0 = Clock::now();
    criterion_end_to_end();
    criterion_signature_size();
    criterion_extractor();
    criterion_simulator();
    criterion_game_baselines();
    criterion_table_hygiene();
    criterion_codec_fuzz();
    criterion_bench();
    printf("acceptance total: %d/8 passed in %.1fs\n", 8 - g_failures, seconds_since(t0));
    return g_failures;
}
