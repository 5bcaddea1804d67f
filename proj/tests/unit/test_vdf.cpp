#include <chrono>
#include <cmath>
#include <vector>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "slapx/crypto/hash.hpp"
#include "slapx/vdf/difficulty.hpp"
#include "slapx/vdf/pool.hpp"
#include "slapx/vdf/vdf.hpp"

using namespace slapx;
using crypto::BigInt;
using crypto::Bytes;
using crypto::SeededRng;

namespace {

using oracle::u64;
using oracle::powmod;

}  // namespace

TEST_CASE("setup rejects zero difficulty and accepts tiny test moduli") {
    SeededRng rng(1);
    CHECK_THROWS_AS(vdf::vdf_setup(2048, 0, rng), std::invalid_argument);
    const auto p = vdf::vdf_setup(8, 4, rng, crypto::ModulusSize::OracleTest);
    CHECK(p.modulus.n.bits() == 8);
    CHECK(p.kappa == 4);
}

TEST_CASE("squaring chain matches direct exponentiation") {
    const BigInt n(35);
    CHECK(vdf::sequential_squarings(BigInt(2), 3, n).to_u64() == 11);
    CHECK(vdf::sequential_squarings(BigInt(2), 0, n).to_u64() == 2);
    for (u64 x = 0; x < 35; ++x) {
        for (u64 tau = 0; tau < 12; ++tau) {
            REQUIRE(vdf::sequential_squarings(BigInt(x), tau, n).to_u64() == powmod(x, u64{1} << tau, 35));
        }
    }
}

TEST_CASE("eval on tiny moduli agrees with the factoring oracle") {
    SeededRng rng(42);
    for (int i = 0; i < 100; ++i) {
        const int bits = 8 + static_cast<int>(rng.uniform(9));
        const auto params = vdf::vdf_setup(bits, 1, rng, crypto::ModulusSize::OracleTest);
        const u64 n = params.modulus.n.to_u64();
        const vdf::VdfChallenge c{rng.bytes(16), rng.uniform(1025)};
        const auto sol = vdf::vdf_eval(params, c);
        const u64 x = oracle::digest_mod(c.m, n);
        REQUIRE(vdf::vdf_input(params, c.m).to_u64() == x);
        REQUIRE(sol.y.to_u64() == oracle::vdf_y(x, c.tau, n));
        REQUIRE(sol.ell == crypto::hash_to_prime(BigInt(x + sol.y.to_u64()).to_bytes()));
        REQUIRE(vdf::vdf_verify(params, c, sol));
    }
}

TEST_CASE("tau zero yields y equal to x") {
    SeededRng rng(2);
    const auto params = vdf::vdf_setup(512, 1, rng);
    const vdf::VdfChallenge c{{1, 2, 3}, 0};
    const auto sol = vdf::vdf_eval(params, c);
    CHECK(sol.y == vdf::vdf_input(params, c.m));
    CHECK(vdf::vdf_verify(params, c, sol));
}

TEST_CASE("eval is deterministic and verify rejects tampering") {
    SeededRng rng(3);
    const auto params = vdf::vdf_setup(2048, 1000, rng);
    const vdf::VdfChallenge c{{9, 9, 9}, 1000};
    std::uint64_t count = 0;
    const auto before = vdf::total_squarings();
    const auto a = vdf::vdf_eval(params, c, &count);
    CHECK(count == 1000);
    CHECK(vdf::total_squarings() - before >= 1000);
    const auto b = vdf::vdf_eval(params, c);
    CHECK(a.y == b.y);
    CHECK(a.ell == b.ell);
    CHECK(a.pi == b.pi);
    CHECK(vdf::vdf_verify(params, c, a));

    auto bad = a;
    bad.pi = bad.pi + BigInt(1);
    CHECK_FALSE(vdf::vdf_verify(params, c, bad));
    bad = a;
    bad.y = bad.y + BigInt(1);
    CHECK_FALSE(vdf::vdf_verify(params, c, bad));
    bad = a;
    bad.ell = crypto::next_prime(bad.ell + BigInt(1));
    CHECK_FALSE(vdf::vdf_verify(params, c, bad));
    CHECK_FALSE(vdf::vdf_verify(params, vdf::VdfChallenge{c.m, 999}, a));
    CHECK_FALSE(vdf::vdf_verify(params, vdf::VdfChallenge{{9, 9, 8}, 1000}, a));
}

TEST_CASE("puzzle and solution encodings round-trip") {
    SeededRng rng(4);
    const auto params = vdf::vdf_setup(2048, 1000, rng);
    const vdf::VdfChallenge c{{1, 2, 3, 4, 5}, 1000};
    const Bytes body = vdf::encode_puzzle_body(params, c);
    const auto decoded = vdf::decode_puzzle_body(body);
    REQUIRE(decoded.has_value());
    CHECK(decoded->first.modulus.n == params.modulus.n);
    CHECK(decoded->first.kappa == 1000);
    CHECK(decoded->second.m == c.m);
    CHECK(decoded->second.tau == 1000);
    const auto sol = vdf::vdf_eval(params, c);
    const Bytes enc = vdf::encode_solution(params, sol);
    const auto back = vdf::decode_solution(enc);
    REQUIRE(back.has_value());
    CHECK(vdf::vdf_verify(decoded->first, decoded->second, *back));

    Bytes truncated(body.begin(), body.end() - 1);
    CHECK_FALSE(vdf::decode_puzzle_body(truncated).has_value());
    Bytes wrong_tag = body;
    wrong_tag[0] ^= 0xff;
    CHECK_FALSE(vdf::decode_puzzle_body(wrong_tag).has_value());
    CHECK_FALSE(vdf::decode_solution(Bytes{0, 5, 1}).has_value());
}

TEST_CASE("eval time grows linearly with tau") {
    SeededRng rng(5);
    const auto params = vdf::vdf_setup(2048, 1, rng);
    std::vector<double> taus, times;
    for (int k = 8; k <= 14; ++k) {
        const vdf::VdfChallenge c{{static_cast<std::uint8_t>(k)}, std::uint64_t{1} << k};
        double best = 1e30;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)vdf::vdf_eval(params, c);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        taus.push_back(static_cast<double>(c.tau));
        times.push_back(best);
    }
    CHECK(oracle::r_squared(taus, times) > 0.95);
}

TEST_CASE("difficulty table maps device classes") {
    const vdf::DifficultyTable t;
    CHECK(t.kappa_for(vdf::DeviceClass::Default) == 1000);
    CHECK(t.kappa_for(vdf::DeviceClass::HighPower) == 10000);
    CHECK(t.kappa_for(vdf::DeviceClass::Flagged) == 80000);
}

TEST_CASE("modulus pool hands out the seeded sequence") {
    std::vector<BigInt> seen;
    {
        vdf::ModulusPool pool(256, 2, 99);
        for (int i = 0; i < 4; ++i) seen.push_back(pool.take().n);
        CHECK(pool.produced() >= 4);
    }
    const SeededRng root(99);
    for (int i = 0; i < 4; ++i) {
        SeededRng r = root.fork("modulus/" + std::to_string(i));
        CHECK(crypto::rsa_setup(256, r).n == seen[static_cast<std::size_t>(i)]);
    }
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK_FALSE(seen[i] == seen[0]);
}
