#include <set>

#include "doctest.h"
#include "slapx/rlrs/rlrs.hpp"

using namespace slapx;
using rlrs::EventId;
using rlrs::Ring;

namespace {

struct Fixture {
    crypto::SeededRng rng{7};
    rlrs::RlrsIssuer issuer = rlrs::RlrsIssuer::setup(128, 16, rng);
    std::vector<rlrs::RlrsUserKey> keys;
    Ring ring;

    explicit Fixture(int members = 5) {
        for (int i = 0; i < members; ++i) {
            keys.push_back(issuer.extract("AP-" + std::to_string(i)));
            ring.push_back(keys.back().id);
        }
    }
    const rlrs::RlrsPublicParams& pp() const { return issuer.params(); }
};

EventId event(std::uint64_t ts, double x = 10.0) {
    return EventId{x, 20.0, ts, crypto::Bytes{0xbe, 0xac, static_cast<std::uint8_t>(ts)}};
}

}  // namespace

TEST_CASE("setup validates t_max against the signature budget") {
    crypto::SeededRng a(1), b(1);
    CHECK(rlrs::RlrsIssuer::setup(128, 16, a).params().t_max == 16);
    CHECK_THROWS_AS(rlrs::RlrsIssuer::setup(128, 0, b), std::invalid_argument);
    CHECK(rlrs::max_ring_size(crypto::Group::setup(128)) == 17);
    CHECK_THROWS_AS(rlrs::RlrsIssuer::setup(128, 18, b), std::invalid_argument);

    crypto::SeededRng c(5), d(5);
    auto i1 = rlrs::RlrsIssuer::setup(128, 4, c);
    auto i2 = rlrs::RlrsIssuer::setup(128, 4, d);
    CHECK(i1.extract("AP-1").s == i2.extract("AP-1").s);
}

TEST_CASE("extract is deterministic and key separated") {
    Fixture f;
    CHECK(f.issuer.extract("AP-1").s == f.issuer.extract("AP-1").s);
    crypto::SeededRng other(99);
    auto issuer2 = rlrs::RlrsIssuer::setup(128, 16, other);
    CHECK_FALSE(issuer2.extract("AP-1").s == f.issuer.extract("AP-1").s);
    CHECK_THROWS_AS(f.issuer.extract(""), std::invalid_argument);
}

TEST_CASE("sign and verify round-trip with binding") {
    Fixture f;
    const crypto::Bytes m{1, 2, 3};
    const auto ev = event(1);
    const auto sig = rlrs::rlrs_sign(f.pp(), f.keys[2], m, f.ring, ev, f.rng);
    CHECK(rlrs::rlrs_verify(f.pp(), f.ring, m, ev, sig));
    CHECK(sig.tau == rlrs::event_base(f.pp().group, ev) * f.keys[2].s);

    crypto::Bytes flipped = m;
    flipped[0] ^= 1;
    CHECK_FALSE(rlrs::rlrs_verify(f.pp(), f.ring, flipped, ev, sig));
    Ring reordered = f.ring;
    std::swap(reordered[0], reordered[1]);
    CHECK_FALSE(rlrs::rlrs_verify(f.pp(), reordered, m, ev, sig));
    Ring shorter(f.ring.begin(), f.ring.end() - 1);
    CHECK_FALSE(rlrs::rlrs_verify(f.pp(), shorter, m, ev, sig));
    CHECK_FALSE(rlrs::rlrs_verify(f.pp(), f.ring, m, event(2), sig));

    CHECK_THROWS_AS(rlrs::rlrs_sign(f.pp(), f.keys[2], m, Ring{"AP-0", "AP-1"}, ev, f.rng), std::invalid_argument);
    CHECK_THROWS_AS(rlrs::rlrs_sign(f.pp(), f.keys[0], m, Ring{"AP-0", "AP-0"}, ev, f.rng), std::invalid_argument);
}

TEST_CASE("tags are deterministic per event and separated across events") {
    Fixture f;
    const auto ev = event(3);
    const auto s1 = rlrs::rlrs_sign(f.pp(), f.keys[1], crypto::Bytes{1}, f.ring, ev, f.rng);
    const auto s2 = rlrs::rlrs_sign(f.pp(), f.keys[1], crypto::Bytes{2}, f.ring, ev, f.rng);
    CHECK(s1.tau == s2.tau);
    const auto s3 = rlrs::rlrs_sign(f.pp(), f.keys[1], crypto::Bytes{1}, f.ring, event(4), f.rng);
    CHECK_FALSE(s1.tau == s3.tau);

    const rlrs::SignedMessage a{f.ring, {1}, s1}, b{f.ring, {2}, s2};
    CHECK(rlrs::rlrs_link(f.pp(), ev, a, b));
    const auto other = rlrs::rlrs_sign(f.pp(), f.keys[3], crypto::Bytes{2}, f.ring, ev, f.rng);
    CHECK_FALSE(rlrs::rlrs_link(f.pp(), ev, a, {f.ring, {2}, other}));
    // Cross-event pair: signature s3 does not verify under ev.
    CHECK_THROWS_AS(rlrs::rlrs_link(f.pp(), ev, a, {f.ring, {1}, s3}), std::invalid_argument);
}

TEST_CASE("distinct signers never share a tag under one event") {
    Fixture f(1);
    const auto& g = f.pp().group;
    std::set<crypto::Bytes> tags;
    for (int i = 0; i < 100; ++i) {
        const auto key = f.issuer.extract("dev-" + std::to_string(i));
        for (int e = 0; e < 100; ++e) {
            const auto tag = rlrs::event_base(g, event(static_cast<std::uint64_t>(e))) * key.s;
            REQUIRE(tags.insert(tag.to_bytes()).second);
        }
    }
}

TEST_CASE("revoke returns the double signer and only when linked") {
    Fixture f(6);
    const auto ev = event(9);
    const Ring l{"AP-0", "AP-1", "AP-2", "AP-3"};
    const Ring l2{"AP-2", "AP-3", "AP-4", "AP-5"};
    const Ring disjoint{"AP-4", "AP-5"};

    const rlrs::SignedMessage a{l, {1}, rlrs::rlrs_sign(f.pp(), f.keys[2], crypto::Bytes{1}, l, ev, f.rng)};
    const rlrs::SignedMessage b{l2, {2}, rlrs::rlrs_sign(f.pp(), f.keys[2], crypto::Bytes{2}, l2, ev, f.rng)};
    CHECK(f.issuer.revoke(ev, a, b) == std::optional<std::string>("AP-2"));

    const rlrs::SignedMessage c{l2, {3}, rlrs::rlrs_sign(f.pp(), f.keys[3], crypto::Bytes{3}, l2, ev, f.rng)};
    CHECK_FALSE(f.issuer.revoke(ev, a, c).has_value());

    // Linked through a different key pair but rings share nobody with the signer.
    const rlrs::SignedMessage d{disjoint, {4},
                                rlrs::rlrs_sign(f.pp(), f.keys[4], crypto::Bytes{4}, disjoint, ev, f.rng)};
    const rlrs::SignedMessage e{l, {5}, rlrs::rlrs_sign(f.pp(), f.keys[0], crypto::Bytes{5}, l, ev, f.rng)};
    CHECK_FALSE(f.issuer.revoke(ev, d, e).has_value());
    const rlrs::SignedMessage d2{disjoint, {6},
                                 rlrs::rlrs_sign(f.pp(), f.keys[4], crypto::Bytes{6}, disjoint, ev, f.rng)};
    CHECK(f.issuer.revoke(ev, d, d2) == std::optional<std::string>("AP-4"));

    // Revoke-iff-link over every pair in the corpus.
    const std::vector<rlrs::SignedMessage> corpus{a, b, c, d, e, d2};
    for (const auto& x : corpus) {
        for (const auto& y : corpus) {
            const bool linked = rlrs::rlrs_link(f.pp(), ev, x, y);
            CHECK(f.issuer.revoke(ev, x, y).has_value() == linked);
        }
    }
}

TEST_CASE("encoded signatures are always 640 bytes and round-trip") {
    crypto::SeededRng rng(11);
    auto issuer = rlrs::RlrsIssuer::setup(128, 17, rng);
    std::vector<rlrs::RlrsUserKey> keys;
    Ring full;
    for (int i = 0; i < 17; ++i) {
        keys.push_back(issuer.extract("AP-" + std::to_string(i)));
        full.push_back(keys.back().id);
    }
    const auto ev = event(1);
    for (std::size_t n = 1; n <= 17; ++n) {
        const Ring ring(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
        const auto sig = rlrs::rlrs_sign(issuer.params(), keys[n - 1], crypto::Bytes{7}, ring, ev, rng);
        const auto enc = rlrs::encode_signature(issuer.params(), sig);
        REQUIRE(enc.size() == rlrs::kSignatureBytes);
        const auto dec = rlrs::decode_signature(issuer.params(), enc);
        REQUIRE(dec.has_value());
        CHECK(rlrs::rlrs_verify(issuer.params(), ring, crypto::Bytes{7}, ev, *dec));
    }
    crypto::Bytes bad(rlrs::kSignatureBytes, 0);
    CHECK_FALSE(rlrs::decode_signature(issuer.params(), bad).has_value());
    CHECK_FALSE(rlrs::decode_signature(issuer.params(), crypto::Bytes(639, 0)).has_value());
}

TEST_CASE("event encoding is fixed width and field sensitive") {
    const EventId a{1.5, 2.5, 3, {1}};
    CHECK(a.encode().size() == 56);
    CHECK(a.encode() != EventId{1.5, 2.5, 4, {1}}.encode());
    CHECK(a.encode() != EventId{2.5, 1.5, 3, {1}}.encode());
    CHECK(a.encode() != EventId{1.5, 2.5, 3, {2}}.encode());
    CHECK(EventId{0.0, 0.0, 0, {}}.encode() == EventId{-0.0, -0.0, 0, {}}.encode());
}
