#pragma once

#include <cstdint>
#include <string_view>

#include "slapx/crypto/bignum.hpp"
#include "slapx/crypto/hash.hpp"

namespace slapx::crypto {

/// Deterministic byte stream (SHA-256 counter-mode DRBG) keyed by a 64-bit seed.
/// Single owner; equal seeds give byte-identical streams.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);
    std::uint64_t next_u64();
    /// Uniform integer in [0, bound).
    std::uint64_t uniform(std::uint64_t bound);
    /// Uniform integer in [0, bound) for big bounds (rejection sampling).
    BigInt uniform(const BigInt& bound);
    double uniform01();

    /// Independent child stream, deterministic in (parent seed, label).
    SeededRng fork(std::string_view label) const;

private:
    SeededRng(std::uint64_t seed, const Digest& key);
    void refill();

    std::uint64_t seed_;
    Digest key_{};
    std::uint64_t counter_ = 0;
    Digest block_{};
    std::size_t used_ = sizeof(Digest);
};

}  // namespace slapx::crypto
