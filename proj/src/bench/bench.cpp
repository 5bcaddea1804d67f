#include "slapx/bench/bench.hpp"

#include <openssl/crypto.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

#include "slapx/crypto/sgn.hpp"
#include "slapx/dac/dac.hpp"
#include "slapx/dbp/dbp.hpp"
#include "slapx/protocol/prox.hpp"
#include "slapx/protocol/spectrum_db.hpp"
#include "slapx/rlrs/rlrs.hpp"
#include "slapx/vdf/vdf.hpp"

namespace slapx::bench {

namespace {

using Clock = std::chrono::steady_clock;
using crypto::Bytes;

void pin_thread() {
#ifdef __linux__
    const int cpu = sched_getcpu();
    if (cpu < 0) return;
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(cpu, &set);
    pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#endif
}

template <class F>
OpStats measure(const std::string& name, const std::string& side, int iterations, F&& fn, std::uint64_t kappa = 0) {
    fn();  // warm-up
    std::vector<double> ms;
    ms.reserve(static_cast<std::size_t>(iterations));
    for (int i = 0; i < iterations; ++i) {
        const auto t0 = Clock::now();
        fn();
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    OpStats s{name, side, iterations, 0.0, 0.0, 0.0, kappa};
    s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    std::tie(s.median_ms, s.p95_ms) = median_p95(std::move(ms));
    return s;
}

// Keeps results observable so the optimizer cannot drop the timed call.
volatile std::size_t g_sink = 0;

constexpr std::uint8_t kVerifyChallenges = 4;

dac::AttributeSet device_attrs(const std::string& id) {
    return {dac::attr_device_id(id), dac::attr_tx_power(23.0), dac::attr_device_type(1),
            dac::attr_validity(0, 4000000000ull)};
}

std::string fmt(double v, const char* f = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::pair<double, double> median_p95(std::vector<double> v) {
    if (v.empty()) return {0.0, 0.0};
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    return {median, v[std::max<std::size_t>(rank, 1) - 1]};
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_linear: need two or more points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_linear: x has no spread");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

std::string host_descriptor() {
    std::string cpu = "unknown cpu";
    std::ifstream in("/proc/cpuinfo");
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = line.substr(line.find_first_not_of(' ', colon + 1));
            break;
        }
    }
    return cpu + "; " + std::to_string(std::thread::hardware_concurrency()) + " hw threads; " +
           OpenSSL_version(OPENSSL_VERSION) + "; " + __VERSION__;
}

const OpStats& BenchReport::op(const std::string& name, std::uint64_t kappa) const {
    for (const auto& s : ops) {
        if (s.name == name && s.kappa == kappa) return s;
    }
    throw std::out_of_range("bench: no op " + name);
}

const PhaseTotal& BenchReport::phase(const std::string& name) const {
    for (const auto& p : phases) {
        if (p.phase == name) return p;
    }
    throw std::out_of_range("bench: no phase " + name);
}

double BenchReport::eval_rate() const {
    if (eval_fit.slope <= 0.0) throw std::logic_error("bench: eval fit has no positive slope");
    return 1000.0 / eval_fit.slope;
}

BenchReport bench_all(const BenchOptions& o) {
    if (o.iterations < 30) throw std::invalid_argument("bench_all: iterations must be at least 30");
    if (o.kappas.size() < 2) throw std::invalid_argument("bench_all: need two or more kappa values");
    const int it = o.iterations;
    const int vit = o.vdf_iterations > 0 ? o.vdf_iterations : o.iterations;
    auto note = [&](const std::string& s) {
        if (o.progress) o.progress(s);
    };
    pin_thread();

    BenchReport r;
    r.host = host_descriptor();
    r.iterations = it;
    crypto::SeededRng rng(o.seed);

    // Credentials: one holder among fillers so presentations use a full anonymity set.
    note("dac setup");
    const auto root = dac::dac_setup(128, 8, 2, rng);
    dac::DacRegistry registry(root.pp);
    auto issue = [&](const dac::UserKey& key, const dac::AttributeSet& attrs, int max_level) {
        const auto pending = dac::dac_cred_request(root.pp, key, max_level > 1, rng);
        const auto issued = dac::dac_create_cred(root, registry, pending.request, attrs, max_level, rng);
        return dac::dac_get_cred(registry, key, attrs, pending, issued);
    };
    for (int i = 0; i < 6; ++i) issue(dac::dac_keygen(root.pp, rng), device_attrs("filler"), 2);
    const auto key = dac::dac_keygen(root.pp, rng);
    const auto attrs = device_attrs("bench-device");
    const auto cred = issue(key, attrs, 2);
    const auto nym = dac::dac_nymgen(root.pp, key, rng);
    const Bytes ctx{'b', 'e', 'n', 'c', 'h'};
    const dac::AttributeSet disclose{attrs[1], attrs[2]};

    note("dac prove/verify");
    const auto pres = dac::dac_cred_prove(registry, key, nym, cred, disclose, ctx, rng);
    r.ops.push_back(measure("cred_prove", "client", it, [&] {
        g_sink = g_sink + dac::dac_cred_prove(registry, key, nym, cred, disclose, ctx, rng).slot_count;
    }));
    r.ops.push_back(measure("cred_verify", "server", it, [&] { g_sink = g_sink + dac::dac_cred_verify(registry, pres, ctx); }));
    const auto recipient = dac::dac_keygen(root.pp, rng);
    const dac::AttributeSet a_l{dac::attr_location(10.0, 20.0), dac::attr_timestamp(100)};
    r.ops.push_back(measure("cred_delegate", "server", it, [&] {
        const auto pending = dac::dac_cred_request(root.pp, recipient, false, rng);
        g_sink = g_sink + dac::dac_issue_cred(registry, cred, a_l, pending.request, 2, true, rng).registry_index;
    }));

    note("rlrs");
    auto issuer = rlrs::RlrsIssuer::setup(128, 16, rng);
    const rlrs::Ring ring{"ap-1", "ap-2", "ap-3", "ap-4"};
    for (const auto& id : ring) issuer.extract(id);
    const auto ap_key = issuer.extract("ap-1");
    const auto& rpp = issuer.params();
    const rlrs::EventId event{10.0, 20.0, 100, Bytes(40, 7)};
    const Bytes msg(200, 9);
    const auto sig = rlrs::rlrs_sign(rpp, ap_key, msg, ring, event, rng);
    r.ops.push_back(measure("rlrs_sign", "server", it, [&] {
        g_sink = g_sink + rlrs::rlrs_sign(rpp, ap_key, msg, ring, event, rng).responses.size();
    }));
    r.ops.push_back(measure("rlrs_verify", "server", it, [&] { g_sink = g_sink + rlrs::rlrs_verify(rpp, ring, msg, event, sig); }));
    // Linking a verified signature is a lookup of its tag among the window's tags.
    std::set<Bytes> window_tags;
    for (int i = 0; i < 1000; ++i) {
        const rlrs::EventId other{static_cast<double>(i), 0.0, 100, Bytes(40, 7)};
        window_tags.insert(rlrs::event_base(rpp.group, other).to_bytes());
    }
    r.ops.push_back(measure("rlrs_link", "server", it, [&] { g_sink = g_sink + window_tags.count(sig.tau.to_bytes()); }));

    note("dbp aka");
    const auto group = crypto::Group::setup(128);
    const auto dk1 = dbp::dbp_keygen(group, rng);
    const auto dk2 = dbp::dbp_keygen(group, rng);
    const Bytes nonce(16, 3);
    r.ops.push_back(measure("dbp_aka", "client", it, [&] { g_sink = g_sink + dbp::dbp_aka(dk1, dk2.pk, nonce, 100).size(); }));

    const protocol::RadioEnv env;
    r.ops.push_back(measure("prox_verify", "server", it, [&] {
        g_sink = g_sink + protocol::within_proximity(protocol::prox_verify(env.mean_rss(30.0), env.rtt_for(30.0), env, 0.5), 50.0);
    }));
    const auto db = protocol::SpectrumDb::synthetic(protocol::GridSpec{}, o.seed);
    r.ops.push_back(measure("db_lookup", "server", it, [&] { g_sink = g_sink + db.lookup(1234.0, 5678.0, {}).channels.size(); }));

    note("sgn");
    const auto sk = crypto::sgn_keygen(group, rng);
    const Bytes body(344, 5);
    const auto sgn = crypto::sgn_sign(group, sk, body);
    r.ops.push_back(measure("sgn_sign", "server", it, [&] { g_sink = g_sink + crypto::sgn_sign(group, sk, body).size(); }));
    r.ops.push_back(measure("sgn_verify", "server", it, [&] { g_sink = g_sink + crypto::sgn_verify(group, sk.pk, body, sgn); }));

    note("vdf setup");
    r.ops.push_back(measure("vdf_setup", "setup", vit, [&] {
        g_sink = g_sink + static_cast<std::size_t>(vdf::vdf_setup(o.modulus_bits, 1, rng).modulus.bit_length);
    }));
    const auto modulus = vdf::vdf_setup(o.modulus_bits, 1, rng).modulus;
    std::vector<double> xs, ys;
    for (auto kappa : o.kappas) {
        note("vdf kappa " + std::to_string(kappa));
        const auto params = vdf::vdf_params(modulus, kappa);
        const vdf::VdfChallenge ch{Bytes(48, 1), kappa};
        r.ops.push_back(measure("vdf_eval", "client", vit, [&] { g_sink = g_sink + vdf::vdf_eval(params, ch).y.bits(); }, kappa));
        xs.push_back(static_cast<double>(kappa));
        ys.push_back(r.ops.back().median_ms);
        // Verify cost depends on the challenge (prime search for ell), not on kappa, so rotate a few.
        std::vector<std::pair<vdf::VdfChallenge, vdf::VdfSolution>> cases;
        for (std::uint8_t k = 0; k < kVerifyChallenges; ++k) {
            vdf::VdfChallenge c{Bytes(48, static_cast<std::uint8_t>(k + 1)), kappa};
            auto sol = vdf::vdf_eval(params, c);
            cases.emplace_back(std::move(c), std::move(sol));
        }
        std::size_t next = 0;
        r.ops.push_back(measure("vdf_verify", "server", it, [&] {
            const auto& [c, sol] = cases[next++ % cases.size()];
            g_sink = g_sink + vdf::vdf_verify(params, c, sol);
        }, kappa));
    }
    r.eval_fit = fit_linear(xs, ys);

    if (std::find(o.kappas.begin(), o.kappas.end(), o.service_kappa) == o.kappas.end()) {
        throw std::invalid_argument("bench_all: service_kappa must be in the kappa grid");
    }
    const std::string eval = "vdf_eval@" + std::to_string(o.service_kappa);
    const std::string verify = "vdf_verify@" + std::to_string(o.service_kappa);
    r.phases = {
        {"pol_ap", {"cred_prove", "rlrs_verify"}, {"cred_verify", "prox_verify", "rlrs_sign"}},
        {"pol_nd", {"cred_prove", "dbp_aka"}, {"cred_verify", "dbp_aka", "cred_delegate"}},
        {"spectrum_query", {"cred_prove"}, {"cred_verify", "rlrs_verify", "rlrs_link", "db_lookup", "sgn_sign"}},
        {"service_request", {eval, "cred_prove"}, {"sgn_verify", verify, "cred_verify", "rlrs_verify"}},
    };
    auto median_of = [&](const std::string& name) {
        const auto at = name.find('@');
        if (at == std::string::npos) return r.op(name).median_ms;
        return r.op(name.substr(0, at), std::stoull(name.substr(at + 1))).median_ms;
    };
    for (auto& p : r.phases) {
        for (const auto& n : p.client_ops) p.client_ms += median_of(n);
        for (const auto& n : p.server_ops) p.server_ms += median_of(n);
    }
    return r;
}

simnet::CostModel calibrate(const BenchReport& r, const simnet::CostModel& reference) {
    simnet::CostModel c = reference;
    c.client_pol_ms = r.phase("pol_ap").client_ms;
    c.ap_ms = r.phase("pol_ap").server_ms;
    c.ap_reject_ms = r.op("rlrs_link").median_ms;
    c.client_query_ms = r.phase("spectrum_query").client_ms;
    c.psd_ms = r.phase("spectrum_query").server_ms;
    c.client_service_ms = r.op("cred_prove").median_ms;
    c.server_ms = r.phase("service_request").server_ms;
    c.reject_ms = r.op("sgn_verify").median_ms;
    c.vdf_eval_rate = r.eval_rate();
    return c;
}

std::string ops_csv_header() { return "op,side,kappa,iterations,median_ms,p95_ms,mean_ms"; }

std::string op_csv_row(const OpStats& s) {
    return s.name + "," + s.side + "," + std::to_string(s.kappa) + "," + std::to_string(s.iterations) + "," +
           fmt(s.median_ms) + "," + fmt(s.p95_ms) + "," + fmt(s.mean_ms);
}

std::string phases_csv_header() { return "phase,client_ms,server_ms"; }

std::string phase_csv_row(const PhaseTotal& p) { return p.phase + "," + fmt(p.client_ms) + "," + fmt(p.server_ms); }

void write_csv(std::ostream& os, const BenchReport& r) {
    os << ops_csv_header() << '\n';
    for (const auto& s : r.ops) os << op_csv_row(s) << '\n';
    os << '\n' << phases_csv_header() << '\n';
    for (const auto& p : r.phases) os << phase_csv_row(p) << '\n';
}

void write_table(std::ostream& os, const BenchReport& r) {
    char line[160];
    os << "host: " << r.host << '\n' << "iterations: " << r.iterations << "\n\n";
    std::snprintf(line, sizeof line, "%-14s %-7s %8s %12s %12s\n", "op", "side", "kappa", "median ms", "p95 ms");
    os << line;
    for (const auto& s : r.ops) {
        std::snprintf(line, sizeof line, "%-14s %-7s %8llu %12.3f %12.3f\n", s.name.c_str(), s.side.c_str(),
                      static_cast<unsigned long long>(s.kappa), s.median_ms, s.p95_ms);
        os << line;
    }
    os << '\n';
    std::snprintf(line, sizeof line, "%-16s %12s %12s\n", "phase", "client ms", "server ms");
    os << line;
    for (const auto& p : r.phases) {
        std::snprintf(line, sizeof line, "%-16s %12.3f %12.3f\n", p.phase.c_str(), p.client_ms, p.server_ms);
        os << line;
    }
    std::snprintf(line, sizeof line, "\nvdf eval: %.3e ms per squaring, R^2 %.4f, %.0f squarings/s\n", r.eval_fit.slope,
                  r.eval_fit.r2, r.eval_fit.slope > 0 ? 1000.0 / r.eval_fit.slope : 0.0);
    os << line;
}

}  // namespace slapx::bench
