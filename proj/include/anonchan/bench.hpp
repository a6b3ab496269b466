#pragma once

#include <numeric>

#include "anonchan/net.hpp"

namespace anonchan::bench {

struct BenchRow {
    std::string name;
    std::string entity;
    size_t iterations = 0;
    double mean_ms = 0;
    double min_ms = 0;
    double max_ms = 0;
};

struct BenchReport {
    std::string title;
    std::vector<BenchRow> rows;
    std::string environment;

    std::string to_text() const {
        std::string out = title + " (" + environment + ")\n";
        char buf[160];
        snprintf(buf, sizeof(buf), "%-24s %-12s %10s %10s %10s %8s\n", "Algorithm", "Entity",
                 "mean(ms)", "min(ms)", "max(ms)", "iters");
        out += buf;
        for (const auto& r : rows) {
            snprintf(buf, sizeof(buf), "%-24s %-12s %10.3f %10.3f %10.3f %8zu\n", r.name.c_str(),
                     r.entity.c_str(), r.mean_ms, r.min_ms, r.max_ms, r.iterations);
            out += buf;
        }
        return out;
    }

    std::string to_machine() const {
        std::string out;
        for (const auto& r : rows) {
            char buf[200];
            snprintf(buf, sizeof(buf), "bench|%s|%s|iters=%zu|mean_ms=%.4f|min_ms=%.4f|max_ms=%.4f\n",
                     r.name.c_str(), r.entity.c_str(), r.iterations, r.mean_ms, r.min_ms, r.max_ms);
            out += buf;
        }
        return out;
    }

    const BenchRow* find(std::string_view name) const {
        for (const auto& r : rows)
            if (r.name == name) return &r;
        return nullptr;
    }
};

namespace detail {

template <class F>
BenchRow time_op(std::string name, std::string entity, size_t iterations, F&& op) {
    BenchRow row{std::move(name), std::move(entity), iterations};
    std::vector<double> samples;
    samples.reserve(iterations);
    for (size_t i = 0; i < iterations; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        op(i);
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    row.min_ms = *std::min_element(samples.begin(), samples.end());
    row.max_ms = *std::max_element(samples.begin(), samples.end());
    row.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / double(iterations);
    return row;
}

inline std::string environment_string() {
    char buf[128];
    snprintf(buf, sizeof(buf), "%u hardware threads, single host loopback",
             std::thread::hardware_concurrency());
    return buf;
}

}  // namespace detail

// the eight per-algorithm rows
inline BenchReport bench_algorithms(size_t iterations, RandomSource& rng) {
    BenchReport rep;
    rep.title = "Running time (algorithms)";
    rep.environment = detail::environment_string();

    auto [gpk, ik] = proto::gm_setup(rng);
    auto [params, msk] = proto::kgc_setup(rng);
    gs::SigningKey sk = proto::join(gpk, ik, rng);

    rep.rows.push_back(detail::time_op("GM.Setup", "GM", iterations,
                                       [&](size_t) { proto::gm_setup(rng); }));
    rep.rows.push_back(detail::time_op("KGC.Setup", "KGC", iterations,
                                       [&](size_t) { proto::kgc_setup(rng); }));
    rep.rows.push_back(detail::time_op("Join", "User-GM", iterations,
                                       [&](size_t) { proto::join(gpk, ik, rng); }));
    rep.rows.push_back(detail::time_op("UserKeyGen", "User-KGC", iterations, [&](size_t) {
        proto::user_key_gen(params, msk, proto::TempId::fresh(rng));
    }));

    std::vector<proto::RequestToken> tokens;
    tokens.reserve(iterations);
    rep.rows.push_back(detail::time_op("SendRequest", "User", iterations, [&](size_t) {
        tokens.push_back(proto::send_request(gpk, sk, {"127.0.0.1", 9}, rng).first);
    }));
    rep.rows.push_back(detail::time_op("ValidityCheck", "SP", iterations, [&](size_t i) {
        proto::validity_check(gpk, tokens[i].sig, tokens[i].temp_id);
    }));

    Bytes payload = rng.bytes(256);
    std::vector<proto::ContentMessage> contents;
    contents.reserve(iterations);
    rep.rows.push_back(detail::time_op("SendContent", "SP", iterations, [&](size_t i) {
        auto r = proto::send_content(gpk, params, tokens[i].sig, tokens[i].temp_id, payload, rng);
        contents.push_back(std::get<proto::ContentMessage>(r));
    }));
    rep.rows.push_back(detail::time_op("GetContent", "User", iterations, [&](size_t i) {
        auto dk = proto::user_key_gen(params, msk, contents[i].temp_id);
        proto::get_content(params, contents[i].ct, dk);
    }));
    return rep;
}

struct SessionBenchOptions {
    size_t iterations = 30;
    bool offline_sign = false;
    size_t payload_bytes = 256;
};

// full five-role session over loopback sockets, one row
inline BenchReport bench_session(const SessionBenchOptions& opt, RandomSource& rng) {
    BenchReport rep;
    rep.title = "Running time (one session)";
    rep.environment = detail::environment_string();

    auto [gpk, ik] = proto::gm_setup(rng);
    auto [params, msk] = proto::kgc_setup(rng);
    Bytes payload = rng.bytes(opt.payload_bytes);

    net::KgcService kgc({}, params, msk);
    net::SpService sp({}, gpk, params, payload);
    if (!kgc.start() || !sp.start()) throw std::runtime_error("bench services failed to start");
    net::ProxyService proxy({}, {sp.address(), std::chrono::seconds(30)});
    if (!proxy.start()) throw std::runtime_error("bench proxy failed to start");
    net::GmService gm({}, gpk, ik);
    if (!gm.start()) throw std::runtime_error("bench gm failed to start");

    auto sk = net::run_join(gm.address());
    if (!sk) throw std::runtime_error("bench join failed");

    net::UserSessionConfig cfg;
    cfg.proxy = proxy.address();
    cfg.sp = sp.address();
    cfg.kgc = kgc.address();
    cfg.offline_sign = opt.offline_sign;

    // the timed quantity is the online span; offline signing stays outside it
    BenchRow row{opt.offline_sign ? "Session (offline-sign)" : "Session", "all roles",
                 opt.iterations};
    std::vector<double> samples;
    samples.reserve(opt.iterations);
    for (size_t i = 0; i < opt.iterations; ++i) {
        auto out = net::run_user_session(cfg, gpk, *sk, params, rng);
        if (out.status != net::SessionOutcome::Status::Ok || out.content != payload)
            throw std::runtime_error("bench session failed at iteration " + std::to_string(i));
        samples.push_back(out.timings.online_ms);
    }
    row.min_ms = *std::min_element(samples.begin(), samples.end());
    row.max_ms = *std::max_element(samples.begin(), samples.end());
    row.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / double(opt.iterations);
    rep.rows.push_back(row);

    gm.stop();
    proxy.stop();
    sp.stop();
    kgc.stop();
    return rep;
}

}  // namespace anonchan::bench
