#include <cmath>
#include <sstream>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "slapx/simnet/simnet.hpp"

using namespace slapx;
using namespace slapx::simnet;

namespace {

ScenarioConfig dos_config(Scenario s, int n_ue, double r_mal, std::uint64_t seed = 3) {
    ScenarioConfig c;
    c.scenario = s;
    c.n_ue = n_ue;
    c.r_mal = r_mal;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("clock fires in time order, ties in insertion order") {
    SimClock clk;
    std::vector<int> seen;
    clk.at(30, [&] { seen.push_back(3); });
    clk.at(10, [&] { seen.push_back(1); });
    clk.at(10, [&] { seen.push_back(2); });
    clk.at(20, [&] {
        seen.push_back(0);
        clk.after(0, [&] { seen.push_back(9); });
    });
    clk.run();
    CHECK(seen == std::vector<int>{1, 2, 0, 9, 3});
    CHECK(clk.now() == 30);
    CHECK(clk.fired() == 5);
    CHECK_THROWS_AS(clk.at(29, [] {}), std::logic_error);
    CHECK_FALSE(clk.step());
}

TEST_CASE("server model queues, drops and conserves") {
    SimClock clk;
    ServerModel srv(clk, "s", 2, 3);
    int done = 0;
    auto job = [&](bool mal) { return Job{from_ms(10), mal, 0, [&] { ++done; }}; };

    CHECK(srv.submit(job(false)) == ServerModel::Admit::Immediate);
    CHECK(srv.submit(job(false)) == ServerModel::Admit::Immediate);
    for (int i = 0; i < 3; ++i) CHECK(srv.submit(job(true)) == ServerModel::Admit::Queued);
    CHECK(srv.submit(job(false)) == ServerModel::Admit::Dropped);
    CHECK(srv.submit(job(true)) == ServerModel::Admit::Dropped);
    srv.reject_at_arrival(job(true));
    CHECK(srv.queue_length() == 3);
    clk.run();

    const auto& s = srv.stats();
    CHECK(done == 5);
    CHECK(s.generated == 8);
    CHECK(s.immediate == 2);
    CHECK(s.enqueued == 3);
    CHECK(s.dropped_benign == 1);
    CHECK(s.dropped_malicious == 1);
    CHECK(s.rejected_at_arrival == 1);
    CHECK(s.conserved());
    CHECK(s.max_queue == 3);
    // Two jobs wait 10 ms, the third waits 20 ms.
    CHECK(s.mean_wait_ms() == doctest::Approx(40.0 / 3.0));
    CHECK(clk.now() == from_ms(30));
}

TEST_CASE("unbounded server never drops") {
    SimClock clk;
    ServerModel srv(clk, "ap", 1, 0);
    for (int i = 0; i < 500; ++i) CHECK(srv.submit(Job{from_ms(1), false, 0, {}}) != ServerModel::Admit::Dropped);
    clk.run();
    CHECK(srv.stats().served == 500);
    CHECK(srv.stats().max_queue == 499);
}

TEST_CASE("precompute limit is the validity window over the eval time") {
    CHECK(precompute_limit(24000, 60.0, 1e5) == 250);
    CHECK(precompute_limit(24000, 0.0, 1e5) == 0);
    CHECK(precompute_limit(48000, 60.0, 1e5) == 125);
    CHECK(precompute_limit(1000, 60.0, 3e5 / 3.17) == 5678);
    CHECK_THROWS_AS(precompute_limit(0, 60.0, 1e5), std::invalid_argument);
    CHECK_THROWS_AS(precompute_limit(1000, 60.0, 0.0), std::invalid_argument);
}

TEST_CASE("config text sets keys and rejects unknown ones") {
    ScenarioConfig c;
    std::istringstream in("# comment\nscenario = bypass\nn_ue = 250  # trailing\nr_mal=0.3\nserver_ms = 50\n\n");
    apply_config(c, in);
    CHECK(c.scenario == Scenario::Bypass);
    CHECK(c.n_ue == 250);
    CHECK(c.r_mal == 0.3);
    CHECK(c.costs.server_ms == 50.0);
    CHECK(c.n_malicious() == 75);

    CHECK_THROWS_AS(set_config_value(c, "no_such_key", "1"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(c, "n_ue", "ten"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(c, "scenario", "nope"), std::invalid_argument);
    CHECK(parse_scenario("full_protocol") == Scenario::FullProtocol);
    CHECK(scenario_name(Scenario::Precompute) == "precompute");

    c.r_mal = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("calibration round trips through text") {
    CostModel a;
    a.server_ms = 12.5;
    a.vdf_eval_rate = 123456.0;
    std::ostringstream out;
    save_calibration(a, out);

    ScenarioConfig c;
    std::istringstream in(out.str());
    apply_config(c, in);
    CHECK(c.costs.server_ms == 12.5);
    CHECK(c.costs.vdf_eval_rate == 123456.0);
    CHECK(c.costs.psd_ms == a.psd_ms);
}

TEST_CASE("dos runs are deterministic per seed") {
    for (auto s : {Scenario::Baseline, Scenario::FullProtocol, Scenario::Bypass, Scenario::Precompute}) {
        const auto cfg = dos_config(s, 120, 0.3, 11);
        const auto a = dos_csv_row(run_dos(cfg));
        CHECK(a == dos_csv_row(run_dos(cfg)));
        auto other = cfg;
        other.seed = 12;
        CHECK(a != dos_csv_row(run_dos(other)));
    }
}

TEST_CASE("dos output columns") {
    CHECK(dos_csv_header() ==
          "scenario,n_ue,r_mal,seed,n_malicious,n_benign,requests,n_q,n_d,n_d_malicious,t_q_ms,max_queue_len,"
          "immediate,rejected_at_arrival,utilization,benign_completed,benign_failed,benign_latency_ms,"
          "psd_drops_benign,ap_max_queue,malicious_grants,max_bank,bank_limit,attack_success_rate");
    CHECK(hijack_csv_header() == "honest_d,mal_d,w,trials,successes,rate");
    CHECK(fraud_csv_header() == "rounds,tolerance,guess,trials,accepted,rate,std_error");
    const auto m = run_dos(dos_config(Scenario::FullProtocol, 50, 0.2));
    const auto row = dos_csv_row(m);
    CHECK(std::count(row.begin(), row.end(), ',') == 23);
    CHECK(row.rfind("full,50,0.20,3,10,40,", 0) == 0);
    const auto j = dos_json({m});
    CHECK(j.find("\"runs\"") != std::string::npos);
}

TEST_CASE("every benign UE is accounted for") {
    for (auto s : {Scenario::Baseline, Scenario::FullProtocol, Scenario::Bypass, Scenario::Precompute}) {
        const auto m = run_dos(dos_config(s, 150, 0.4));
        CHECK(m.n_malicious == 60);
        CHECK(m.n_benign == 90);
        CHECK(m.benign_completed + m.benign_failed == m.n_benign);
        CHECK(m.max_queue_len <= 100);
        CHECK(m.n_q + m.immediate + m.n_d + m.n_d_malicious + m.rejected_at_arrival == m.requests);
    }
}

TEST_CASE("flooding the unprotected server drops benign traffic; the puzzle gate does not") {
    const auto base = run_dos(dos_config(Scenario::Baseline, 250, 0.4));
    CHECK(base.n_d > 0);
    CHECK(base.t_q_ms > 100.0);
    CHECK(base.max_queue_len == 100);

    const auto full = run_dos(dos_config(Scenario::FullProtocol, 250, 0.4));
    CHECK(full.n_d == 0);
    // Only legitimate runs reach the queue; N_Q itself is checked by the acceptance grid.
    CHECK(full.n_q * 10 < base.n_q);
    CHECK(full.t_q_ms < 65.0);
    CHECK(full.benign_failed == 0);

    const auto small = run_dos(dos_config(Scenario::Bypass, 50, 0.2));
    CHECK(small.n_d == 0);
    CHECK(small.max_queue_len < 100);
}

TEST_CASE("precompute bank stays inside the validity bound") {
    auto cfg = dos_config(Scenario::Precompute, 100, 0.4);
    cfg.costs.vdf_eval_rate = 1e5;
    cfg.kappa = 24000;
    cfg.precompute_lead_s = 120.0;
    cfg.attack_start_s = 100.0;
    cfg.attack_end_s = 106.0;
    cfg.duration_s = 110.0;
    const auto m = run_dos(cfg);
    CHECK(m.bank_limit == 250);
    CHECK(m.max_bank <= m.bank_limit);
    CHECK(m.max_bank > 0);

    // A shorter validity window tightens the bound and the bank follows it.
    cfg.validity_s = 2.0;
    cfg.window_s = 2.0;
    const auto tight = run_dos(cfg);
    CHECK(tight.bank_limit == 8);
    CHECK(tight.max_bank <= 8);
    CHECK(tight.rejected_at_arrival > 0);
}

TEST_CASE("noiseless hijack grid is the threshold indicator") {
    ScenarioConfig cfg;
    cfg.noiseless = true;
    cfg.hijack_trials = 3;
    const auto cells = run_hijack(cfg);
    REQUIRE(cells.size() == 6 * 6 * 9);
    for (const auto& c : cells) {
        const auto h = static_cast<int>(c.honest_d);
        const auto m = static_cast<int>(c.mal_d);
        const int w10 = static_cast<int>(std::lround(c.w * 10));
        const bool inside = oracle::hijack_inside(h, m, w10);
        INFO("h=" << h << " m=" << m << " w=" << w10);
        CHECK(c.successes == (inside ? c.trials : 0));
    }
}

TEST_CASE("noisy hijack is monotone in honest distance and weight") {
    ScenarioConfig cfg;
    cfg.seed = 5;
    const HijackGrid grid;
    const auto cells = run_hijack(cfg, grid);
    const std::size_t nm = grid.mal_d.size(), nw = grid.w_tenths.size();
    auto at = [&](std::size_t h, std::size_t m, std::size_t w) { return cells[(h * nm + m) * nw + w].rate(); };
    for (std::size_t h = 0; h < grid.honest_d.size(); ++h) {
        for (std::size_t m = 0; m < nm; ++m) {
            for (std::size_t w = 0; w < nw; ++w) {
                if (h + 1 < grid.honest_d.size()) CHECK(at(h + 1, m, w) <= at(h, m, w));
                if (w + 1 < nw) CHECK(at(h, m, w + 1) <= at(h, m, w) + 0.05);
            }
        }
    }
    // Relay delay only pushes the RTT estimate further out.
    cfg.relay_delay_ns = 100.0;
    const auto slow = run_hijack(cfg, grid);
    for (std::size_t i = 0; i < cells.size(); ++i) CHECK(slow[i].successes <= cells[i].successes);
}

TEST_CASE("distance fraud matches the binomial tail") {
    ScenarioConfig cfg;
    cfg.fraud_trials = 20000;
    struct Case {
        int n;
        double tol, g;
    };
    for (const auto& k : {Case{20, 0.0, 0.5}, Case{20, 0.2, 0.5}, Case{50, 0.1, 0.7}, Case{10, 0.0, 0.9}}) {
        cfg.rounds = k.n;
        cfg.tolerance = k.tol;
        cfg.guess = k.g;
        const auto r = run_fraud(cfg);
        const double p = oracle::fraud_accept(k.n, k.tol, k.g);
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(r.trials));
        INFO("n=" << k.n << " tol=" << k.tol << " g=" << k.g << " rate=" << r.rate() << " oracle=" << p);
        CHECK(std::abs(r.rate() - p) <= 4 * sigma + 1e-12);
    }
    CHECK(oracle::binomial_tail(20, 0.75, 20) == doctest::Approx(std::pow(0.75, 20)));

    cfg.rounds = 20;
    cfg.tolerance = 0.0;
    cfg.guess = 1.0;
    cfg.fraud_trials = 200;
    CHECK(run_fraud(cfg).accepted == 200);
}
