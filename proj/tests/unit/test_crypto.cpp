#include <set>
#include <vector>

#include "doctest.h"
#include "slapx/crypto/group.hpp"
#include "slapx/crypto/hash.hpp"
#include "slapx/crypto/rng.hpp"
#include "slapx/crypto/rsa.hpp"
#include "slapx/crypto/sgn.hpp"

using namespace slapx::crypto;

namespace {

// Brute-force oracle: sieve of Eratosthenes.
std::vector<bool> sieve(std::size_t limit) {
    std::vector<bool> prime(limit + 1, true);
    prime[0] = false;
    if (limit >= 1) prime[1] = false;
    for (std::size_t i = 2; i * i <= limit; ++i) {
        if (!prime[i]) continue;
        for (std::size_t j = i * i; j <= limit; j += i) prime[j] = false;
    }
    return prime;
}

std::uint64_t oracle_next_prime(std::uint64_t n, const std::vector<bool>& prime) {
    while (!prime[n]) ++n;
    return n;
}

}  // namespace

TEST_CASE("group_setup maps security levels to prime-order curves") {
    const Group g = Group::setup(128);
    CHECK(g.order().bits() == 256);
    CHECK(g.element_size() == 33);
    CHECK(g.scalar_size() == 32);
    CHECK(Group::setup(192).order().bits() == 384);
    CHECK_THROWS_AS(Group::setup(64), std::invalid_argument);
    CHECK_THROWS_AS(Group::setup(100), std::invalid_argument);
}

TEST_CASE("scalar multiplication by zero and by the order gives the identity") {
    const Group g = Group::setup(128);
    CHECK((g.generator() * g.scalar(0)).is_identity());
    CHECK((g.generator() * g.scalar(g.order())).is_identity());
    CHECK_FALSE((g.generator() * g.scalar(1)).is_identity());
}

TEST_CASE("group laws hold on random triples") {
    const Group g = Group::setup(128);
    SeededRng rng(2024);
    const auto gen = g.generator();
    for (int i = 0; i < 1000; ++i) {
        const auto a = gen * g.random_scalar(rng);
        const auto b = gen * g.random_scalar(rng);
        const auto c = gen * g.random_scalar(rng);
        REQUIRE(((a + b) + c) == (a + (b + c)));
        REQUIRE((a + g.identity()) == a);
        REQUIRE((a + (-a)).is_identity());
        REQUIRE((a + b) == (b + a));
    }
}

TEST_CASE("scalar arithmetic is consistent with the group action") {
    const Group g = Group::setup(128);
    SeededRng rng(5);
    const auto gen = g.generator();
    for (int i = 0; i < 50; ++i) {
        const Scalar x = g.random_scalar(rng);
        const Scalar y = g.random_scalar(rng);
        CHECK(gen * (x + y) == gen * x + gen * y);
        CHECK(gen * (x * y) == (gen * x) * y);
        if (!x.is_zero()) CHECK((x * x.inverse()) == g.scalar(1));
    }
}

TEST_CASE("element and scalar encodings are fixed width and round-trip") {
    const Group g = Group::setup(128);
    SeededRng rng(9);
    for (int i = 0; i < 20; ++i) {
        const Scalar s = g.random_scalar(rng);
        const auto e = g.generator() * s;
        CHECK(e.to_bytes().size() == 33);
        CHECK(g.element_from_bytes(e.to_bytes()) == e);
        CHECK(g.scalar_from_bytes(s.to_bytes()) == s);
    }
    const Bytes id = g.identity().to_bytes();
    CHECK(id == Bytes(33, 0));
    CHECK(g.element_from_bytes(id).is_identity());
    Bytes junk(33, 0x02);
    junk[1] = 0xff;
    for (int i = 2; i < 33; ++i) junk[i] = 0xff;
    CHECK_THROWS_AS(g.element_from_bytes(junk), std::invalid_argument);
    CHECK_THROWS_AS(g.scalar_from_bytes(g.order().to_bytes(32)), std::invalid_argument);
}

TEST_CASE("hash_to_element is deterministic and domain separated") {
    const Group g = Group::setup(128);
    const Bytes data{1, 2, 3};
    CHECK(g.hash_to_element("a", data) == g.hash_to_element("a", data));
    CHECK_FALSE(g.hash_to_element("a", data) == g.hash_to_element("b", data));
    CHECK_FALSE(g.hash_to_element("a", data).is_identity());
}

TEST_CASE("primality test agrees with a sieve below 20000") {
    const auto prime = sieve(20000);
    for (std::uint64_t n = 0; n <= 20000; ++n) {
        REQUIRE(is_probable_prime(BigInt(n)) == prime[n]);
    }
}

TEST_CASE("next_prime agrees with a brute-force oracle") {
    const auto prime = sieve(30000);
    CHECK(next_prime(BigInt(8)).to_u64() == 11);
    CHECK(next_prime(BigInt(11)).to_u64() == 11);
    CHECK(next_prime(BigInt(0)).to_u64() == 2);
    for (std::uint64_t n = 2; n < 25000; n += 7) {
        REQUIRE(next_prime(BigInt(n)).to_u64() == oracle_next_prime(n, prime));
    }
    // Carmichael numbers must be rejected.
    for (std::uint64_t c : {561ULL, 1105ULL, 1729ULL, 2465ULL, 41041ULL, 825265ULL}) {
        CHECK_FALSE(is_probable_prime(BigInt(c)));
    }
}

TEST_CASE("hash_to_prime returns the smallest prime at or above the digest") {
    for (int i = 0; i < 20; ++i) {
        const Bytes m{static_cast<std::uint8_t>(i), 0x42};
        const BigInt h = BigInt::from_bytes(sha256(m));
        const BigInt p = hash_to_prime(m);
        CHECK(p >= h);
        CHECK(is_probable_prime(p, 64));
        for (BigInt c = h; c < p; c = c + BigInt(1)) {
            REQUIRE_FALSE(is_probable_prime(c, 64));
        }
        CHECK(hash_to_prime(m) == p);
    }
}

TEST_CASE("seeded rng streams are reproducible") {
    SeededRng a(77), b(77), c(78);
    const Bytes sa = a.bytes(1000);
    CHECK(sa == b.bytes(1000));
    CHECK(sa != c.bytes(1000));
    SeededRng d(77);
    CHECK(d.fork("x").bytes(64) == SeededRng(77).fork("x").bytes(64));
    CHECK(d.fork("x").bytes(64) != d.fork("y").bytes(64));
    SeededRng e(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(e.uniform(std::uint64_t{7}) < 7);
    }
}

TEST_CASE("rsa_setup enforces its floors") {
    SeededRng rng(1);
    CHECK_THROWS_AS(rsa_setup(63, rng), std::invalid_argument);
    CHECK_THROWS_AS(rsa_setup(7, rng, ModulusSize::OracleTest), std::invalid_argument);
}

TEST_CASE("tiny oracle moduli are products of two distinct small primes") {
    const auto prime = sieve(255);
    std::set<std::uint64_t> products;
    for (std::uint64_t p = 2; p < 256; ++p) {
        for (std::uint64_t q = p + 1; p * q < 256; ++q) {
            if (prime[p] && prime[q]) products.insert(p * q);
        }
    }
    CHECK(products.count(35) == 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SeededRng rng(seed);
        const RsaModulus m = rsa_setup(8, rng, ModulusSize::OracleTest);
        CHECK(m.bit_length == 8);
        CHECK(products.count(m.n.to_u64()) == 1);
    }
}

TEST_CASE("rsa_setup produces full-size odd moduli deterministically") {
    SeededRng a(3), b(3);
    const RsaModulus m = rsa_setup(1024, a);
    CHECK(m.n.bits() == 1024);
    CHECK(m.n.is_odd());
    CHECK(rsa_setup(1024, b).n == m.n);
    SeededRng big(4);
    CHECK(rsa_setup(2048, big).n.bits() == 2048);
}

TEST_CASE("ECDSA puzzle signatures verify and reject tampering") {
    const Group g = Group::setup(128);
    SeededRng rng(11);
    const SgnKeyPair k = sgn_keygen(g, rng);
    const Bytes msg{1, 2, 3, 4};
    Bytes sig = sgn_sign(g, k, msg);
    CHECK(sgn_verify(g, k.pk, msg, sig));
    Bytes other = msg;
    other[0] ^= 1;
    CHECK_FALSE(sgn_verify(g, k.pk, other, sig));
    sig[sig.size() - 1] ^= 1;
    CHECK_FALSE(sgn_verify(g, k.pk, msg, sig));
    const SgnKeyPair k2 = sgn_keygen(g, rng);
    CHECK_FALSE(sgn_verify(g, k2.pk, msg, sgn_sign(g, k, msg)));
    CHECK_FALSE(sgn_verify(g, k.pk, msg, Bytes{}));
}

TEST_CASE("combined generator multiply-add matches separate operations") {
    const Group g = Group::setup(128);
    SeededRng rng(12);
    for (int i = 0; i < 20; ++i) {
        const Scalar a = g.random_scalar(rng);
        const Scalar b = g.random_scalar(rng);
        const auto q = g.generator() * g.random_scalar(rng);
        CHECK(g.mul_gen_add(a, q, b) == g.generator() * a + q * b);
    }
}
