#pragma once

#include <cstdint>
#include <optional>

#include "slapx/crypto/bignum.hpp"
#include "slapx/crypto/rng.hpp"
#include "slapx/crypto/rsa.hpp"

namespace slapx::vdf {

using crypto::BigInt;
using crypto::Bytes;
using crypto::ByteView;

enum class HashSuite : std::uint8_t { Sha256 = 1 };

struct VdfParams {
    crypto::RsaModulus modulus;
    std::uint64_t kappa = 0;
    HashSuite hash = HashSuite::Sha256;
};

struct VdfChallenge {
    Bytes m;
    std::uint64_t tau = 0;
};

struct VdfSolution {
    BigInt ell;
    BigInt pi;
    BigInt y;
};

/// Fresh RSA modulus of `modulus_bits` bits plus difficulty kappa.
VdfParams vdf_setup(int modulus_bits, std::uint64_t kappa, crypto::SeededRng& rng,
                    crypto::ModulusSize size = crypto::ModulusSize::Standard);
/// Same as vdf_setup but with a modulus that was generated ahead of time.
VdfParams vdf_params(crypto::RsaModulus modulus, std::uint64_t kappa);

/// x = H(m) mod N.
BigInt vdf_input(const VdfParams& params, ByteView m);

/// x^(2^tau) mod n by tau dependent Montgomery squarings.
BigInt sequential_squarings(const BigInt& x, std::uint64_t tau, const BigInt& n);

/// Runs tau sequential squarings. `squarings`, if given, receives the number actually performed.
VdfSolution vdf_eval(const VdfParams& params, const VdfChallenge& challenge, std::uint64_t* squarings = nullptr);

bool vdf_verify(const VdfParams& params, const VdfChallenge& challenge, const VdfSolution& sol);

/// Process-wide count of squarings done by vdf_eval (instrumentation only).
std::uint64_t total_squarings();

// Wire encodings. Integers are 2-byte length prefixed big-endian; pi and y use the modulus width.
Bytes encode_puzzle_body(const VdfParams& params, const VdfChallenge& challenge);
/// Returns nullopt on malformed input.
std::optional<std::pair<VdfParams, VdfChallenge>> decode_puzzle_body(ByteView in);
Bytes encode_solution(const VdfParams& params, const VdfSolution& sol);
std::optional<VdfSolution> decode_solution(ByteView in);

inline constexpr std::uint8_t kPuzzleTag = 0x50;

}  // namespace slapx::vdf
