#pragma once

#include "slapx/crypto/bignum.hpp"
#include "slapx/crypto/rng.hpp"

namespace slapx::crypto {

/// RSA modulus of unknown order. Only N is kept; the factors never leave rsa_setup.
struct RsaModulus {
    BigInt n;
    int bit_length = 0;
};

enum class ModulusSize {
    Standard,   // bit_length >= 64
    OracleTest  // bit_length >= 8, factorable by enumeration
};

inline constexpr int kMinModulusBits = 64;
inline constexpr int kMinOracleModulusBits = 8;

/// Draws two distinct primes from `rng` whose product has exactly `bit_length` bits.
RsaModulus rsa_setup(int bit_length, SeededRng& rng, ModulusSize size = ModulusSize::Standard);

/// Wraps an externally chosen modulus (used by oracle tests and persisted puzzles).
RsaModulus rsa_from_n(const BigInt& n);

}  // namespace slapx::crypto
