#include "slapx/crypto/rng.hpp"

#include <stdexcept>

namespace slapx::crypto {

namespace {

Digest seed_key(std::uint64_t seed) {
    Transcript t("slapx/rng/seed");
    t.absorb_u64(seed);
    return t.finish();
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : SeededRng(seed, seed_key(seed)) {}

SeededRng::SeededRng(std::uint64_t seed, const Digest& key) : seed_(seed), key_(key) {}

void SeededRng::refill() {
    Transcript t("slapx/rng/block");
    t.absorb(key_).absorb_u64(counter_++);
    block_ = t.finish();
    used_ = 0;
}

void SeededRng::fill(std::span<std::uint8_t> out) {
    for (auto& b : out) {
        if (used_ == block_.size()) refill();
        b = block_[used_++];
    }
}

Bytes SeededRng::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

std::uint64_t SeededRng::next_u64() {
    std::uint8_t b[8];
    fill(b);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("rng: empty range");
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

BigInt SeededRng::uniform(const BigInt& bound) {
    if (bound.is_zero()) throw std::invalid_argument("rng: empty range");
    const int bits = bound.bits();
    const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
    const int excess = static_cast<int>(nbytes * 8) - bits;
    while (true) {
        Bytes b = bytes(nbytes);
        b[0] &= static_cast<std::uint8_t>(0xff >> excess);
        BigInt v = BigInt::from_bytes(b);
        if (v < bound) return v;
    }
}

double SeededRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

SeededRng SeededRng::fork(std::string_view label) const {
    Transcript t("slapx/rng/fork");
    t.absorb(key_).absorb(label);
    return SeededRng(seed_, t.finish());
}

}  // namespace slapx::crypto
