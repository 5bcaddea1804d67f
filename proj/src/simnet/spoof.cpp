#include <cmath>
#include <random>
#include <stdexcept>

#include "slapx/crypto/rng.hpp"
#include "slapx/dbp/dbp.hpp"
#include "slapx/simnet/simnet.hpp"

namespace slapx::simnet {

std::vector<HijackCell> run_hijack(const ScenarioConfig& cfg, const HijackGrid& grid) {
    cfg.validate();
    const RadioModel& env = cfg.radio;
    const int trials = cfg.hijack_trials;

    // Shadowing draws are shared by every cell: trial t sees the same fade
    // whatever the distances and weight, so cells differ only through the model.
    std::vector<double> fade(static_cast<std::size_t>(trials), 0.0);
    if (!cfg.noiseless) {
        std::mt19937_64 rng(crypto::SeededRng(cfg.seed).fork("simnet/hijack").next_u64());
        std::normal_distribution<double> shadow(0.0, env.shadowing_sigma_db);
        for (auto& f : fade) f = shadow(rng);
    }

    std::vector<HijackCell> out;
    for (double h : grid.honest_d) {
        for (double m : grid.mal_d) {
            for (int wt : grid.w_tenths) {
                const double w = wt / 10.0;
                HijackCell cell{h, m, w, trials, 0};
                for (double f : fade) {
                    // The AP hears the relay (honest UE) but the reply to each challenge
                    // only leaves once the malicious UE has answered.
                    const double rss = env.mean_rss(h) + f;
                    const double floor_s = env.rtt_for(m);
                    const double rtt = floor_s + cfg.relay_delay_ns * 1e-9;
                    if (rtt < floor_s || rtt < env.rtt_for(h)) throw std::logic_error("hijack: rtt below the physical floor");
                    const auto est = protocol::prox_verify(rss, rtt, env, w);
                    if (protocol::within_proximity(est, cfg.threshold_m)) ++cell.successes;
                }
                out.push_back(cell);
            }
        }
    }
    return out;
}

double FraudResult::std_error() const {
    const double p = rate();
    return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
}

FraudResult run_fraud(const ScenarioConfig& cfg) {
    cfg.validate();
    dbp::DbpConfig dc;
    dc.n = cfg.rounds;
    dc.th_m = cfg.threshold_m;
    dc.tolerance = cfg.tolerance;
    dc.validate();

    const double c = cfg.radio.propagation_speed;
    const double bound_ns = dc.rtt_bound_ns(c);
    std::mt19937_64 rng(crypto::SeededRng(cfg.seed).fork("simnet/fraud").next_u64());
    std::bernoulli_distribution bit(0.5);
    std::bernoulli_distribution right_guess(cfg.guess);
    std::uniform_real_distribution<double> where(cfg.threshold_m, 2.0 * cfg.threshold_m);

    const std::size_t len = 2 * static_cast<std::size_t>(dc.n);
    dbp::BitString ss(len), m(len);
    std::vector<dbp::RoundTranscript> rounds(static_cast<std::size_t>(dc.n));

    FraudResult r{dc.n, cfg.tolerance, cfg.guess, cfg.fraud_trials, 0};
    for (std::uint64_t t = 0; t < cfg.fraud_trials; ++t) {
        const double d = where(rng);
        const auto floor_ns = static_cast<std::int64_t>(std::ceil(2.0 * d / c * 1e9));
        for (auto& b : ss) b = bit(rng);
        for (auto& b : m) b = bit(rng);
        const auto a = dbp::dbp_response_table(ss, m);
        for (int i = 1; i <= dc.n; ++i) {
            auto& tr = rounds[static_cast<std::size_t>(i - 1)];
            tr.c = bit(rng) ? 1 : 0;
            if (floor_ns <= bound_ns) {
                // Close enough to answer honestly.
                tr.r = dbp::dbp_respond(a, i, tr.c);
                tr.rtt_ns = floor_ns;
                continue;
            }
            // Too far: commit to a challenge before it arrives and time the reply to land
            // inside the bound. The reply does not depend on the real challenge.
            const std::uint8_t guessed = right_guess(rng) ? tr.c : static_cast<std::uint8_t>(1 - tr.c);
            tr.r = dbp::dbp_respond(a, i, guessed);
            tr.rtt_ns = static_cast<std::int64_t>(bound_ns / 2.0);
        }
        if (dbp::dbp_verify(dc, a, rounds, c)) ++r.accepted;
    }
    return r;
}

}  // namespace slapx::simnet
