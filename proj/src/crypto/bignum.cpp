#include "slapx/crypto/bignum.hpp"

#include <stdexcept>

#include <openssl/crypto.h>

namespace slapx::crypto {

namespace {

void check(int rc, const char* what) {
    if (rc != 1) {
        throw std::runtime_error(std::string("bignum: ") + what + " failed");
    }
}

}  // namespace

BnCtx make_ctx() {
    BnCtx ctx(BN_CTX_new());
    if (!ctx) {
        throw std::bad_alloc();
    }
    return ctx;
}

BigInt::BigInt() : bn_(BN_new()) {
    if (!bn_) {
        throw std::bad_alloc();
    }
}

BigInt::BigInt(std::uint64_t v) : BigInt() {
    check(BN_set_word(bn_.get(), v), "set_word");
}

BigInt::BigInt(const BigInt& other) : bn_(BN_dup(other.get())) {
    if (!bn_) {
        throw std::bad_alloc();
    }
}

BigInt& BigInt::operator=(const BigInt& other) {
    if (this != &other) {
        check(BN_copy(bn_.get(), other.get()) != nullptr ? 1 : 0, "copy");
    }
    return *this;
}

BigInt BigInt::from_bytes(ByteView be) {
    BigInt r;
    if (BN_bin2bn(be.data(), static_cast<int>(be.size()), r.get()) == nullptr) {
        throw std::runtime_error("bignum: bin2bn failed");
    }
    return r;
}

BigInt BigInt::from_dec(const std::string& s) {
    BigInt r;
    BIGNUM* p = r.get();
    if (BN_dec2bn(&p, s.c_str()) == 0) {
        throw std::invalid_argument("bignum: bad decimal '" + s + "'");
    }
    return r;
}

BigInt BigInt::from_hex(const std::string& s) {
    BigInt r;
    BIGNUM* p = r.get();
    if (BN_hex2bn(&p, s.c_str()) == 0) {
        throw std::invalid_argument("bignum: bad hex '" + s + "'");
    }
    return r;
}

Bytes BigInt::to_bytes() const {
    Bytes out(static_cast<std::size_t>(BN_num_bytes(bn_.get())));
    BN_bn2bin(bn_.get(), out.data());
    return out;
}

Bytes BigInt::to_bytes(std::size_t width) const {
    if (static_cast<std::size_t>(BN_num_bytes(bn_.get())) > width) {
        throw std::length_error("bignum: value wider than " + std::to_string(width) + " bytes");
    }
    Bytes out(width);
    check(BN_bn2binpad(bn_.get(), out.data(), static_cast<int>(width)) >= 0 ? 1 : 0, "bn2binpad");
    return out;
}

std::string BigInt::to_dec() const {
    char* s = BN_bn2dec(bn_.get());
    std::string out(s);
    OPENSSL_free(s);
    return out;
}

std::string BigInt::to_hex() const {
    char* s = BN_bn2hex(bn_.get());
    std::string out(s);
    OPENSSL_free(s);
    return out;
}

std::uint64_t BigInt::to_u64() const {
    if (bits() > 64) {
        throw std::overflow_error("bignum: value exceeds 64 bits");
    }
    const Bytes b = to_bytes(8);
    std::uint64_t v = 0;
    for (auto byte : b) {
        v = (v << 8) | byte;
    }
    return v;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    BigInt r;
    check(BN_add(r.get(), a.get(), b.get()), "add");
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) {
    BigInt r;
    check(BN_sub(r.get(), a.get(), b.get()), "sub");
    return r;
}

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_mul(r.get(), a.get(), b.get(), ctx.get()), "mul");
    return r;
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_div(r.get(), nullptr, a.get(), b.get(), ctx.get()), "div");
    return r;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_nnmod(r.get(), a.get(), b.get(), ctx.get()), "nnmod");
    return r;
}

BigInt mod_exp(const BigInt& base, const BigInt& exp, const BigInt& mod) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_mod_exp(r.get(), base.get(), exp.get(), mod.get(), ctx.get()), "mod_exp");
    return r;
}

BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& mod) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_mod_mul(r.get(), a.get(), b.get(), mod.get(), ctx.get()), "mod_mul");
    return r;
}

BigInt mod_inverse(const BigInt& a, const BigInt& mod) {
    BigInt r;
    auto ctx = make_ctx();
    if (BN_mod_inverse(r.get(), a.get(), mod.get(), ctx.get()) == nullptr) {
        throw std::domain_error("bignum: no modular inverse");
    }
    return r;
}

BigInt gcd(const BigInt& a, const BigInt& b) {
    BigInt r;
    auto ctx = make_ctx();
    check(BN_gcd(r.get(), a.get(), b.get(), ctx.get()), "gcd");
    return r;
}

BigInt pow2(std::uint64_t k) {
    BigInt r;
    check(BN_set_bit(r.get(), static_cast<int>(k)), "set_bit");
    return r;
}

}  // namespace slapx::crypto
