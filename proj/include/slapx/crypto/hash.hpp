#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include <openssl/evp.h>

#include "slapx/crypto/bignum.hpp"

namespace slapx::crypto {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 with length-prefixed absorption, so that
/// concatenations of variable-length fields stay injective.
class Transcript {
public:
    explicit Transcript(std::string_view domain);
    Transcript(const Transcript& other);
    Transcript& operator=(const Transcript&) = delete;

    Transcript& absorb(ByteView data);
    Transcript& absorb(std::string_view s);
    Transcript& absorb_u64(std::uint64_t v);
    Digest finish() const;

private:
    struct Deleter {
        void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
    };
    std::unique_ptr<EVP_MD_CTX, Deleter> ctx_;
};

Digest sha256(ByteView data);
Digest sha256(std::string_view s);

/// Expands a digest-sized seed into `len` pseudorandom bytes (SHA-256 in counter mode).
Bytes expand(ByteView seed, std::string_view domain, std::size_t len);

/// Miller-Rabin with `rounds` deterministic bases derived from n; preceded by trial division.
bool is_probable_prime(const BigInt& n, int rounds = 64);

/// Smallest probable prime >= n.
BigInt next_prime(const BigInt& n);

/// H_p(m): smallest prime >= SHA-256(m) read as a big-endian integer.
BigInt hash_to_prime(ByteView m);

}  // namespace slapx::crypto
