#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <openssl/bn.h>

namespace slapx::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

struct BnCtxDeleter {
    void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;

BnCtx make_ctx();

/// Owning arbitrary-precision integer backed by an OpenSSL BIGNUM.
class BigInt {
public:
    BigInt();
    explicit BigInt(std::uint64_t v);
    BigInt(const BigInt& other);
    BigInt(BigInt&& other) noexcept = default;
    BigInt& operator=(const BigInt& other);
    BigInt& operator=(BigInt&& other) noexcept = default;
    ~BigInt() = default;

    static BigInt from_bytes(ByteView be);
    static BigInt from_dec(const std::string& s);
    static BigInt from_hex(const std::string& s);

    /// Minimal big-endian encoding (empty for zero).
    Bytes to_bytes() const;
    /// Left-zero-padded big-endian encoding; throws if the value does not fit.
    Bytes to_bytes(std::size_t width) const;
    std::string to_dec() const;
    std::string to_hex() const;
    std::uint64_t to_u64() const;

    int bits() const { return BN_num_bits(bn_.get()); }
    bool is_zero() const { return BN_is_zero(bn_.get()) == 1; }
    bool is_one() const { return BN_is_one(bn_.get()) == 1; }
    bool is_odd() const { return BN_is_odd(bn_.get()) == 1; }
    bool bit(int i) const { return BN_is_bit_set(bn_.get(), i) == 1; }

    BIGNUM* get() { return bn_.get(); }
    const BIGNUM* get() const { return bn_.get(); }

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);
    friend bool operator==(const BigInt& a, const BigInt& b) { return BN_cmp(a.get(), b.get()) == 0; }
    friend bool operator<(const BigInt& a, const BigInt& b) { return BN_cmp(a.get(), b.get()) < 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return BN_cmp(a.get(), b.get()) <= 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return BN_cmp(a.get(), b.get()) > 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return BN_cmp(a.get(), b.get()) >= 0; }

private:
    struct Deleter {
        void operator()(BIGNUM* b) const { BN_clear_free(b); }
    };
    std::unique_ptr<BIGNUM, Deleter> bn_;
};

BigInt mod_exp(const BigInt& base, const BigInt& exp, const BigInt& mod);
BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& mod);
BigInt mod_inverse(const BigInt& a, const BigInt& mod);
BigInt gcd(const BigInt& a, const BigInt& b);
/// 2^k as an integer.
BigInt pow2(std::uint64_t k);

}  // namespace slapx::crypto
