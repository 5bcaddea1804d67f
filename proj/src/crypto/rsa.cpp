#include "slapx/crypto/rsa.hpp"

#include <stdexcept>
#include <string>

#include "slapx/crypto/hash.hpp"

namespace slapx::crypto {

namespace {

constexpr int kMaxAttempts = 1000;

BigInt random_prime(int bits, SeededRng& rng) {
    const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
    const int excess = static_cast<int>(nbytes * 8) - bits;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Bytes b = rng.bytes(nbytes);
        b[0] &= static_cast<std::uint8_t>(0xff >> excess);
        BigInt c = BigInt::from_bytes(b);
        BN_set_bit(c.get(), bits - 1);
        if (bits >= 16) BN_set_bit(c.get(), bits - 2);
        BigInt p = next_prime(c);
        if (p.bits() == bits) return p;
    }
    throw std::runtime_error("rsa_setup: prime generation failed after bounded retries");
}

}  // namespace

RsaModulus rsa_setup(int bit_length, SeededRng& rng, ModulusSize size) {
    const int floor = size == ModulusSize::Standard ? kMinModulusBits : kMinOracleModulusBits;
    if (bit_length < floor) {
        throw std::invalid_argument("rsa_setup: bit_length " + std::to_string(bit_length) + " below floor " +
                                    std::to_string(floor));
    }
    const int p_bits = bit_length / 2;
    const int q_bits = bit_length - p_bits;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        BigInt p = random_prime(p_bits, rng);
        BigInt q = random_prime(q_bits, rng);
        if (p == q) continue;
        BigInt n = p * q;
        if (n.bits() != bit_length) continue;
        return RsaModulus{std::move(n), bit_length};
    }
    throw std::runtime_error("rsa_setup: no modulus of exact size after bounded retries");
}

RsaModulus rsa_from_n(const BigInt& n) {
    if (!n.is_odd() || n <= BigInt(1)) throw std::invalid_argument("rsa modulus must be odd and > 1");
    return RsaModulus{n, n.bits()};
}

}  // namespace slapx::crypto
