#include <sstream>

#include "doctest.h"
#include "slapx/bench/bench.hpp"

using namespace slapx;
using namespace slapx::bench;

namespace {

const BenchReport& small_report() {
    static const BenchReport r = [] {
        BenchOptions o;
        o.modulus_bits = 512;
        o.kappas = {1000, 16000, 64000};
        o.vdf_iterations = 3;
        return bench_all(o);
    }();
    return r;
}

}  // namespace

TEST_CASE("median and p95 by nearest rank") {
    CHECK(median_p95({3.0, 1.0, 2.0}) == std::pair<double, double>{2.0, 3.0});
    CHECK(median_p95({4.0, 1.0, 3.0, 2.0}).first == 2.5);
    std::vector<double> v;
    for (int i = 1; i <= 40; ++i) v.push_back(i);
    // ceil(0.95 * 40) = 38
    CHECK(median_p95(v) == std::pair<double, double>{20.5, 38.0});
    CHECK(median_p95({}) == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("least squares recovers an exact line") {
    const auto f = fit_linear({1, 2, 3, 4}, {5, 7, 9, 11});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(3.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    const auto g = fit_linear({0, 1, 2}, {0, 1, 0});
    CHECK(g.r2 == doctest::Approx(0.0));
    CHECK_THROWS_AS(fit_linear({1}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear({1, 1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("bench_all refuses short runs") {
    BenchOptions o;
    o.iterations = 29;
    CHECK_THROWS_AS(bench_all(o), std::invalid_argument);
}

TEST_CASE("report covers every primitive") {
    const auto& r = small_report();
    for (const char* n : {"cred_prove", "cred_verify", "cred_delegate", "rlrs_sign", "rlrs_verify", "rlrs_link",
                          "dbp_aka", "sgn_sign", "sgn_verify", "vdf_setup"}) {
        INFO(n);
        CHECK(r.op(n).iterations >= 3);
        CHECK(r.op(n).p95_ms >= r.op(n).median_ms);
    }
    for (std::uint64_t k : {1000, 16000, 64000}) {
        CHECK(r.op("vdf_eval", k).median_ms > 0.0);
        CHECK(r.op("vdf_verify", k).median_ms > 0.0);
    }
    CHECK(r.op("cred_prove").iterations == 30);
    CHECK_THROWS_AS(r.op("nope"), std::out_of_range);
    CHECK(r.op("vdf_eval", 64000).median_ms > r.op("vdf_eval", 1000).median_ms);
    CHECK(r.eval_fit.slope > 0.0);
    CHECK_FALSE(r.host.empty());
}

TEST_CASE("phase totals are sums of op medians") {
    const auto& r = small_report();
    REQUIRE(r.phases.size() == 4);
    const auto& q = r.phase("spectrum_query");
    CHECK(q.client_ms == doctest::Approx(r.op("cred_prove").median_ms));
    CHECK(q.server_ms == doctest::Approx(r.op("cred_verify").median_ms + r.op("rlrs_verify").median_ms +
                                         r.op("rlrs_link").median_ms + r.op("db_lookup").median_ms +
                                         r.op("sgn_sign").median_ms));
    const auto& s = r.phase("service_request");
    CHECK(s.client_ms == doctest::Approx(r.op("vdf_eval", 1000).median_ms + r.op("cred_prove").median_ms));
    // Spectrum query shape: the PSD does more work than the client.
    CHECK(q.client_ms < q.server_ms);
    // Linking is a lookup; verifying is group arithmetic.
    CHECK(r.op("rlrs_link").median_ms * 10 < r.op("rlrs_verify").median_ms);
}

TEST_CASE("calibration maps phases onto simulator costs") {
    const auto& r = small_report();
    const auto c = calibrate(r);
    CHECK(c.client_pol_ms == r.phase("pol_ap").client_ms);
    CHECK(c.ap_ms == r.phase("pol_ap").server_ms);
    CHECK(c.psd_ms == r.phase("spectrum_query").server_ms);
    CHECK(c.server_ms == r.phase("service_request").server_ms);
    CHECK(c.reject_ms == r.op("sgn_verify").median_ms);
    CHECK(c.vdf_eval_rate == doctest::Approx(1000.0 / r.eval_fit.slope));
    CHECK(c.baseline_ms == simnet::CostModel{}.baseline_ms);
    CHECK_NOTHROW(c.validate());

    std::ostringstream out;
    simnet::save_calibration(c, out);
    simnet::ScenarioConfig cfg;
    std::istringstream in(out.str());
    simnet::apply_config(cfg, in);
    CHECK(cfg.costs.psd_ms == doctest::Approx(c.psd_ms));
}

TEST_CASE("csv layout") {
    CHECK(ops_csv_header() == "op,side,kappa,iterations,median_ms,p95_ms,mean_ms");
    CHECK(phases_csv_header() == "phase,client_ms,server_ms");
    CHECK(op_csv_row({"x", "client", 30, 1.5, 2.0, 1.75, 7}) == "x,client,7,30,1.5000,2.0000,1.7500");
    CHECK(phase_csv_row({"pol_ap", {}, {}, 1.0, 2.0}) == "pol_ap,1.0000,2.0000");
    std::ostringstream os;
    write_csv(os, small_report());
    CHECK(os.str().rfind(ops_csv_header() + "\n", 0) == 0);
}
