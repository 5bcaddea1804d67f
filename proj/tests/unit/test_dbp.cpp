#include <cmath>
#include <random>
#include <sstream>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "slapx/dbp/dbp.hpp"

using namespace slapx;
using dbp::BitString;

namespace {

BitString bits(const char* s) {
    BitString out;
    for (; *s; ++s) out.push_back(static_cast<std::uint8_t>(*s - '0'));
    return out;
}

// Honest prover at distance d with zero processing delay.
std::vector<dbp::RoundTranscript> honest_run(const dbp::DbpConfig& cfg, const BitString& a, double d_m,
                                             std::mt19937_64& gen) {
    std::vector<dbp::RoundTranscript> ts;
    const auto rtt = static_cast<std::int64_t>(2.0 * d_m / dbp::kSpeedOfLight * 1e9);
    for (int i = 1; i <= cfg.n; ++i) {
        const auto c = static_cast<std::uint8_t>(gen() & 1);
        ts.push_back({c, dbp::dbp_respond(a, i, c), rtt});
    }
    return ts;
}

}  // namespace

TEST_CASE("AKA is symmetric and nonce separated") {
    const auto g = crypto::Group::setup(128);
    crypto::SeededRng rng(1);
    const auto alice = dbp::dbp_keygen(g, rng);
    const auto bob = dbp::dbp_keygen(g, rng);
    const crypto::Bytes v{1, 2, 3};
    const auto ab = dbp::dbp_aka(alice, bob.pk, v, 100);
    CHECK(ab.size() == 200);
    CHECK(ab == dbp::dbp_aka(bob, alice.pk, v, 100));
    CHECK(ab != dbp::dbp_aka(bob, alice.pk, crypto::Bytes{1, 2, 4}, 100));
    CHECK_THROWS_AS(dbp::dbp_aka(alice, g.identity(), v, 100), std::invalid_argument);
}

TEST_CASE("response table is the xor of secret and mask") {
    CHECK(dbp::dbp_response_table(bits("1010"), bits("0110")) == bits("1100"));
    CHECK(dbp::dbp_response_table(bits("1010"), bits("1010")) == bits("0000"));
    CHECK(dbp::dbp_response_table(bits("1010"), bits("0000")) == bits("1010"));
    CHECK_THROWS_AS(dbp::dbp_response_table(bits("1010"), bits("101")), std::invalid_argument);
}

TEST_CASE("respond indexes a at 2i+c-1") {
    const BitString a = bits("1100");
    CHECK(dbp::dbp_respond(a, 1, 0) == 1);
    CHECK(dbp::dbp_respond(a, 1, 1) == 1);
    CHECK(dbp::dbp_respond(a, 2, 0) == 0);
    CHECK(dbp::dbp_respond(a, 2, 1) == 0);
    CHECK(dbp::dbp_respond(bits("0110"), 2, 0) == 1);
    CHECK_THROWS_AS(dbp::dbp_respond(a, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(dbp::dbp_respond(a, 3, 0), std::out_of_range);
}

TEST_CASE("config validation and failure budget") {
    dbp::DbpConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.max_failures() == 20);
    cfg.tolerance = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg.tolerance = 0.2;
    cfg.n = 0;
    CHECK_THROWS(cfg.validate());
    cfg.n = 10;
    cfg.th_m = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("honest provers within the threshold are always accepted") {
    crypto::SeededRng rng(2);
    std::mt19937_64 gen(2);
    dbp::DbpConfig cfg{100, 50.0, 0.0};
    for (double d : {0.0, 10.0, 49.9}) {
        for (int trial = 0; trial < 50; ++trial) {
            const BitString a = dbp::random_bits(rng, 200);
            REQUIRE(dbp::dbp_verify(cfg, a, honest_run(cfg, a, d, gen)));
        }
    }
    const BitString a = dbp::random_bits(rng, 200);
    CHECK_FALSE(dbp::dbp_verify(cfg, a, honest_run(cfg, a, 60.0, gen)));
}

TEST_CASE("acceptance needs at least 80 of 100 good rounds at tolerance 0.2") {
    crypto::SeededRng rng(3);
    std::mt19937_64 gen(3);
    const dbp::DbpConfig cfg{100, 50.0, 0.2};
    const BitString a = dbp::random_bits(rng, 200);
    for (int bad : {0, 19, 20, 21, 40}) {
        auto ts = honest_run(cfg, a, 1.0, gen);
        for (int k = 0; k < bad; ++k) ts[static_cast<std::size_t>(k)].r ^= 1;
        CHECK(dbp::dbp_verify(cfg, a, ts) == (bad <= 20));
    }
    auto ts = honest_run(cfg, a, 1.0, gen);
    ts.pop_back();
    CHECK_FALSE(dbp::dbp_verify(cfg, a, ts));
}

TEST_CASE("early-response fraud matches the binomial tail") {
    // An attacker answering before the challenge arrives guesses the challenge
    // with probability g; a wrong guess leaves a coin flip for the bit.
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int trials = 100000;
    struct Case {
        int n;
        double tol;
        double g;
    };
    for (const Case c : {Case{20, 0.0, 0.5}, Case{10, 0.2, 0.5}, Case{20, 0.1, 0.8}}) {
        const dbp::DbpConfig cfg{c.n, 50.0, c.tol};
        int accepted = 0;
        for (int t = 0; t < trials; ++t) {
            int failures = 0;
            for (int i = 0; i < c.n; ++i) {
                const bool guessed = u(gen) < c.g;
                const bool correct = guessed || (gen() & 1);
                if (!correct) ++failures;
            }
            if (failures <= cfg.max_failures()) ++accepted;
        }
        const double p = c.g + (1.0 - c.g) / 2.0;
        const double expected = oracle::binomial_tail(c.n, p, c.n - cfg.max_failures());
        const double sd = std::sqrt(expected * (1 - expected) / trials);
        CHECK(std::abs(static_cast<double>(accepted) / trials - expected) <= 3 * sd + 1e-12);
    }
    CHECK(oracle::binomial_tail(20, 0.75, 20) == doctest::Approx(std::pow(0.75, 20)));
    CHECK(std::pow(0.75, 20) == doctest::Approx(3.17e-3).epsilon(0.01));
}

TEST_CASE("bit packing and transcript csv") {
    crypto::SeededRng rng(5);
    const BitString b = dbp::random_bits(rng, 13);
    CHECK(dbp::unpack_bits(dbp::pack_bits(b), 13) == b);
    CHECK(dbp::pack_bits(bits("10000001")) == crypto::Bytes{0x81});
    const dbp::DbpConfig cfg{2, 50.0, 0.0};
    const BitString a = bits("1100");
    std::ostringstream os;
    dbp::write_transcript_csv(os, cfg, a, {{0, 1, 100}, {1, 1, 100}});
    CHECK(os.str() == "round,challenge,response,rtt_ns,pass\n1,0,1,100,1\n2,1,1,100,0\n");
}

TEST_CASE("claimed coordinates are checked against the threshold") {
    CHECK(dbp::within_threshold(0, 0, 30, 40, 50));
    CHECK_FALSE(dbp::within_threshold(0, 0, 30, 40.1, 50));
}
