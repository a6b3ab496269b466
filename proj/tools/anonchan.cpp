// anonchan: five-role anonymous authenticated channel over loopback/LAN.
#include <csignal>

#include "CLI11.hpp"
#include "anonchan/bench.hpp"
#include "anonchan/harness.hpp"

using namespace anonchan;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

void serve_forever(net::Service& svc, const char* role) {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    printf("%s listening on %s\n", role, svc.address().to_string().c_str());
    fflush(stdout);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    printf("%s shutting down\n", role);
    svc.stop();
}

proto::Address parse_addr(const std::string& s, const std::string& flag) {
    auto a = proto::Address::parse(s);
    if (!a) throw CLI::ValidationError(flag, "expected host:port");
    return *a;
}

Bytes read_payload_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read payload file " + path);
    return Bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

int cmd_gm(const std::string& listen, const std::string& keyfile, const std::string& gpk_path) {
    namespace fs = std::filesystem;
    gs::GroupPublicKey gpk;
    gs::IssuerKey ik;
    if (fs::exists(keyfile)) {
        ik = keyfiles::load_ik(keyfile);
        gpk = keyfiles::load_gpk(gpk_path);
        if (!(point_mul(context().g2, ik.gamma) == gpk.w))
            throw std::runtime_error("issuer key does not match group public key");
    } else {
        auto [g, i] = gs::setup(system_random());
        gpk = g;
        ik = i;
        keyfiles::save(keyfile, ik);
        keyfiles::save(gpk_path, gpk);
        printf("generated group: ik -> %s, gpk -> %s\n", keyfile.c_str(), gpk_path.c_str());
    }
    net::ServiceConfig cfg;
    cfg.listen = parse_addr(listen, "--listen");
    net::GmService svc(cfg, gpk, ik);
    if (!svc.start()) throw std::runtime_error("cannot bind " + listen);
    serve_forever(svc, "gm");
    return 0;
}

int cmd_kgc(const std::string& listen, const std::string& keyfile, const std::string& params_path) {
    namespace fs = std::filesystem;
    ibe::Params params;
    ibe::MasterKey msk;
    if (fs::exists(keyfile)) {
        msk = keyfiles::load_msk(keyfile);
        params = ibe::Params{point_mul(context().g2, msk.s)};
    } else {
        auto [p, m] = ibe::setup(system_random());
        params = p;
        msk = m;
        keyfiles::save(keyfile, msk);
        printf("generated master key -> %s\n", keyfile.c_str());
    }
    if (!params_path.empty()) {
        keyfiles::save(params_path, params);
        printf("published params -> %s\n", params_path.c_str());
    }
    net::ServiceConfig cfg;
    cfg.listen = parse_addr(listen, "--listen");
    net::KgcService svc(cfg, params, msk);
    if (!svc.start()) throw std::runtime_error("cannot bind " + listen);
    serve_forever(svc, "kgc");
    return 0;
}

int cmd_proxy(const std::string& listen, const std::string& next, unsigned ttl_s,
              const std::string& journal) {
    net::ServiceConfig cfg;
    cfg.listen = parse_addr(listen, "--listen");
    net::ProxyService svc(cfg,
                          {parse_addr(next, "--sp"), std::chrono::seconds(ttl_s), journal});
    if (!svc.start()) throw std::runtime_error("cannot bind " + listen);
    serve_forever(svc, "proxy");
    return 0;
}

int cmd_sp(const std::string& listen, const std::string& gpk_path, const std::string& params_path,
           const std::string& payload_path) {
    gs::GroupPublicKey gpk = keyfiles::load_gpk(gpk_path);
    if (!gpk.consistent()) throw std::runtime_error("group public key fails consistency check");
    ibe::Params params = keyfiles::load_params(params_path);
    Bytes payload = read_payload_file(payload_path);
    if (payload.empty() || payload.size() > ibe::MAX_MESSAGE_BYTES)
        throw std::runtime_error("payload must be 1 byte .. 64 KiB");
    net::ServiceConfig cfg;
    cfg.listen = parse_addr(listen, "--listen");
    net::SpService svc(cfg, gpk, params, payload);
    if (!svc.start()) throw std::runtime_error("cannot bind " + listen);
    serve_forever(svc, "sp");
    return 0;
}

int cmd_user(const std::string& proxy, const std::string& sp, const std::string& gm,
             const std::string& kgc, const std::string& keyfile, const std::string& gpk_path,
             const std::string& hops, const std::string& payload_path, size_t bench_n,
             bool offline_sign, const std::string& out_path) {
    namespace fs = std::filesystem;
    gs::GroupPublicKey gpk = keyfiles::load_gpk(gpk_path);

    gs::SigningKey sk;
    if (fs::exists(keyfile)) {
        sk = keyfiles::load_sk(keyfile);
    } else {
        if (gm.empty()) throw std::runtime_error("no signing key and no --gm to join with");
        auto joined = net::run_join(parse_addr(gm, "--gm"));
        if (!joined) throw std::runtime_error("join failed");
        sk = *joined;
        keyfiles::save(keyfile, sk);
        printf("joined group, signing key -> %s\n", keyfile.c_str());
    }
    if (!sk.valid_for(gpk)) throw std::runtime_error("signing key does not match gpk");

    net::UserSessionConfig cfg;
    cfg.sp = parse_addr(sp, "--sp");
    cfg.kgc = parse_addr(kgc, "--kgc");
    cfg.offline_sign = offline_sign;
    if (!hops.empty()) {
        // enter the chain at the first hop; each proxy forwards to its own
        // configured next hop
        std::string first = hops.substr(0, hops.find(','));
        cfg.proxy = parse_addr(first, "--hops");
    } else {
        cfg.proxy = parse_addr(proxy, "--proxy");
    }

    ibe::Params params{};  // not consulted on the user side
    size_t runs = std::max<size_t>(bench_n, 1);
    std::vector<double> online;
    net::SessionOutcome last;
    for (size_t i = 0; i < runs; ++i) {
        last = net::run_user_session(cfg, gpk, sk, params, system_random());
        if (last.status != net::SessionOutcome::Status::Ok) break;
        online.push_back(last.timings.online_ms);
    }

    switch (last.status) {
        case net::SessionOutcome::Status::Ok: break;
        case net::SessionOutcome::Status::Refused:
            fprintf(stderr, "refused by sp (reason 0x%02x)\n", last.refuse_reason);
            return 2;
        case net::SessionOutcome::Status::Timeout:
            fprintf(stderr, "timed out waiting for content\n");
            return 3;
        case net::SessionOutcome::Status::DecodeError:
            fprintf(stderr, "malformed frame received\n");
            return 4;
        default:
            fprintf(stderr, "transport error\n");
            return 5;
    }

    printf("received %zu bytes (TempID %s)\n", last.content.size(),
           to_hex(last.temp_id.view()).c_str());
    printf("timings: sign=%.2fms key=%.2fms round-trip=%.2fms decrypt=%.2fms online=%.2fms\n",
           last.timings.send_request_ms, last.timings.key_fetch_ms, last.timings.round_trip_ms,
           last.timings.get_content_ms, last.timings.online_ms);
    if (bench_n > 1 && !online.empty()) {
        double mean = 0, mn = online[0], mx = online[0];
        for (double v : online) {
            mean += v;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        mean /= double(online.size());
        printf("bench|Session%s|iters=%zu|mean_ms=%.4f|min_ms=%.4f|max_ms=%.4f\n",
               offline_sign ? " (offline-sign)" : "", online.size(), mean, mn, mx);
    }
    if (!payload_path.empty()) {
        Bytes expected = read_payload_file(payload_path);
        if (expected != last.content) {
            fprintf(stderr, "content mismatch against %s\n", payload_path.c_str());
            return 6;
        }
        printf("content matches %s\n", payload_path.c_str());
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(last.content.data()),
                static_cast<std::streamsize>(last.content.size()));
        printf("content -> %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_harness(const std::string& game, size_t trials, uint64_t seed) {
    DeterministicRandom rng(seed);
    int failures = 0;
    auto show = [&](const harness::GameResult& r) {
        printf("%s\n", r.to_line().c_str());
        if (!r.pass) ++failures;
    };

    if (game == "anon") {
        harness::RandomGuessAnon a;
        show(harness::game_anonymity(a, trials, rng));
        harness::ByteStatsAnon b;
        show(harness::game_anonymity(b, trials, rng));
        harness::LeakReaderAnon leak;
        auto r = harness::game_anonymity(leak, std::min<size_t>(trials, 300), rng, true);
        printf("%s (cheating-challenger self-test, expects advantage > 0.45: %s)\n",
               r.to_line().c_str(), r.advantage > 0.45 ? "ok" : "FAIL");
        if (r.advantage <= 0.45) ++failures;
    } else if (game == "ss") {
        harness::RandomGuessSs a;
        show(harness::game_semantic_security(a, trials, rng));
        harness::ByteStatsSs b;
        show(harness::game_semantic_security(b, trials, rng));
        harness::WrongKeySs w;
        show(harness::game_semantic_security(w, trials, rng));
        harness::LeakedKeySs leak;
        auto r = harness::game_semantic_security(leak, std::min<size_t>(trials, 300), rng, true);
        printf("%s (cheating-challenger self-test, expects advantage > 0.45: %s)\n",
               r.to_line().c_str(), r.advantage > 0.45 ? "ok" : "FAIL");
        if (r.advantage <= 0.45) ++failures;
    } else if (game == "uf") {
        harness::ReplayUf a;
        show(harness::game_unforgeability(a, trials, rng));
        harness::MaulerUf b;
        show(harness::game_unforgeability(b, trials, rng));
        harness::SimulatorUf c;
        show(harness::game_unforgeability(c, trials, rng));
    } else if (game == "zk") {
        auto rep = harness::check_zero_knowledge(trials, rng);
        printf("zk|samples=%zu|sim_accepting=%zu|real_verifying=%zu|t_collisions=%s\n",
               rep.samples, rep.sim_accepting, rep.real_verifying,
               rep.t_collision_free ? "none" : "FOUND");
        for (const auto& c : rep.components)
            printf("zk|component=%s|chi2=%.2f|dof=%u|p=%.5f\n", c.component.c_str(), c.statistic,
                   c.dof, c.p_value);
        printf("zk|c-uniformity p=%.5f|%s\n", rep.c_uniformity.p_value,
               rep.pass ? "pass" : "FAIL");
        if (!rep.pass) ++failures;
    } else if (game == "ext") {
        auto rep = harness::check_extractor(trials, rng);
        printf("extractor|trials=%zu|exact=%zu|sdh_valid=%zu|guards=%s|%s\n", rep.trials,
               rep.exact_recoveries, rep.sdh_valid,
               (rep.same_challenge_rejected && rep.tamper_detected) ? "ok" : "broken",
               rep.pass ? "pass" : "FAIL");
        if (!rep.pass) ++failures;
    } else {
        fprintf(stderr, "unknown game %s (anon|ss|uf|zk|ext)\n", game.c_str());
        return 64;
    }
    return failures == 0 ? 0 : 1;
}

int cmd_bench(size_t iterations, bool offline_sign, uint64_t seed) {
    DeterministicRandom rng(seed);
    auto algo = bench::bench_algorithms(iterations, rng);
    printf("%s\n%s", algo.to_text().c_str(), algo.to_machine().c_str());

    auto online = bench::bench_session({std::max<size_t>(iterations, 30), false, 256}, rng);
    printf("\n%s%s", online.to_text().c_str(), online.to_machine().c_str());
    if (offline_sign) {
        auto off = bench::bench_session({std::max<size_t>(iterations, 30), true, 256}, rng);
        printf("\n%s%s", off.to_text().c_str(), off.to_machine().c_str());
        double on_ms = online.rows.back().mean_ms;
        double off_ms = off.rows.back().mean_ms;
        printf("\noffline signing saves %.2f ms per session (%.2f -> %.2f)\n", on_ms - off_ms,
               on_ms, off_ms);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anonchan: anonymous authenticated channel (group signatures + IBE + relay proxies)"};
    app.require_subcommand(1);

    std::string listen = "127.0.0.1:0";
    std::string keyfile, gpk_path, params_path, payload_path, out_path;
    std::string proxy, sp, gm, kgc, hops, game = "anon";
    unsigned ttl_s = 30;
    size_t trials = 1000, iterations = 30, bench_n = 0;
    bool offline_sign = false;
    uint64_t seed = 42;

    auto* c_gm = app.add_subcommand("gm", "group manager: issues signing keys");
    c_gm->add_option("--listen", listen, "host:port to bind");
    c_gm->add_option("--keyfile", keyfile, "issuer key file (created if absent)")->required();
    c_gm->add_option("--gpk", gpk_path, "group public key file (created if absent)")->required();

    auto* c_kgc = app.add_subcommand("kgc", "key generation center: issues IBE decryption keys");
    c_kgc->add_option("--listen", listen, "host:port to bind");
    c_kgc->add_option("--keyfile", keyfile, "master key file (created if absent)")->required();
    c_kgc->add_option("--params", params_path, "write IBE params here");

    auto* c_proxy = app.add_subcommand("proxy", "relay proxy hiding user addresses");
    c_proxy->add_option("--listen", listen, "host:port to bind");
    c_proxy->add_option("--sp", sp, "next hop (the SP or the next proxy)")->required();
    c_proxy->add_option("--ttl", ttl_s, "session table TTL in seconds");
    std::string journal;
    c_proxy->add_option("--journal", journal,
                        "append-only table journal for crash recovery (off by default)");

    auto* c_sp = app.add_subcommand("sp", "service provider: verifies tokens, returns content");
    c_sp->add_option("--listen", listen, "host:port to bind");
    c_sp->add_option("--gpk", gpk_path, "group public key file")->required();
    c_sp->add_option("--params", params_path, "IBE params file")->required();
    c_sp->add_option("--payload", payload_path, "content file to serve")->required();

    auto* c_user = app.add_subcommand("user", "run sessions against the stack");
    c_user->add_option("--proxy", proxy, "entry proxy host:port");
    c_user->add_option("--sp", sp, "service provider host:port")->required();
    c_user->add_option("--gm", gm, "group manager host:port (for first-time join)");
    c_user->add_option("--kgc", kgc, "key generation center host:port")->required();
    c_user->add_option("--keyfile", keyfile, "signing key file (join if absent)")->required();
    c_user->add_option("--gpk", gpk_path, "group public key file")->required();
    c_user->add_option("--hops", hops, "comma-separated proxy chain; first is the entry");
    c_user->add_option("--payload", payload_path, "expected content file to compare against");
    c_user->add_option("--bench", bench_n, "run N sessions and report timing stats");
    c_user->add_flag("--offline-sign", offline_sign, "prepare TempID and signature off the clock");
    c_user->add_option("--out", out_path, "write received content here");

    auto* c_harness = app.add_subcommand("harness", "security game harness");
    c_harness->add_option("--game", game, "anon|ss|uf|zk|ext")->required();
    c_harness->add_option("--trials", trials, "trial count");
    c_harness->add_option("--seed", seed, "deterministic seed");

    auto* c_bench = app.add_subcommand("bench", "algorithm and session benchmarks");
    c_bench->add_option("--iterations", iterations, "iterations per row");
    c_bench->add_flag("--offline-sign", offline_sign, "also measure the offline-signing session");
    c_bench->add_option("--seed", seed, "deterministic seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_gm->parsed()) return cmd_gm(listen, keyfile, gpk_path);
        if (c_kgc->parsed()) return cmd_kgc(listen, keyfile, params_path);
        if (c_proxy->parsed()) return cmd_proxy(listen, sp, ttl_s, journal);
        if (c_sp->parsed()) return cmd_sp(listen, gpk_path, params_path, payload_path);
        if (c_user->parsed())
            return cmd_user(proxy, sp, gm, kgc, keyfile, gpk_path, hops, payload_path, bench_n,
                            offline_sign, out_path);
        if (c_harness->parsed()) return cmd_harness(game, trials, seed);
        if (c_bench->parsed()) return cmd_bench(iterations, offline_sign, seed);
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
