#include "slapx/crypto/hash.hpp"

#include <stdexcept>
#include <vector>

namespace slapx::crypto {

namespace {

void put_u64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
}

const std::vector<BN_ULONG>& small_primes() {
    static const std::vector<BN_ULONG> primes = [] {
        constexpr BN_ULONG limit = 17863;  // first 2048 primes
        std::vector<bool> composite(limit + 1, false);
        std::vector<BN_ULONG> out;
        for (BN_ULONG i = 2; i <= limit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (BN_ULONG j = i * i; j <= limit; j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

// One Miller-Rabin round; d odd with n-1 = d * 2^s.
bool mr_round(const BigInt& n, const BigInt& n_minus_1, const BigInt& d, int s, const BigInt& base,
              BN_CTX* ctx, BN_MONT_CTX* mont) {
    BigInt x;
    BN_mod_exp_mont(x.get(), base.get(), d.get(), n.get(), ctx, mont);
    if (x.is_one() || x == n_minus_1) return true;
    for (int r = 1; r < s; ++r) {
        BN_mod_sqr(x.get(), x.get(), n.get(), ctx);
        if (x == n_minus_1) return true;
        if (x.is_one()) return false;
    }
    return false;
}

}  // namespace

Transcript::Transcript(std::string_view domain) : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 init failed");
    }
    absorb(domain);
}

Transcript::Transcript(const Transcript& other) : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_MD_CTX_copy_ex(ctx_.get(), other.ctx_.get()) != 1) {
        throw std::runtime_error("sha256 copy failed");
    }
}

Transcript& Transcript::absorb(ByteView data) {
    std::uint8_t len[8];
    put_u64(len, data.size());
    EVP_DigestUpdate(ctx_.get(), len, sizeof len);
    EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
    return *this;
}

Transcript& Transcript::absorb(std::string_view s) {
    return absorb(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Transcript& Transcript::absorb_u64(std::uint64_t v) {
    std::uint8_t b[8];
    put_u64(b, v);
    return absorb(ByteView(b, 8));
}

Digest Transcript::finish() const {
    Transcript copy(*this);
    Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(copy.ctx_.get(), out.data(), &len);
    return out;
}

Digest sha256(ByteView data) {
    Digest out{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
    return out;
}

Digest sha256(std::string_view s) {
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Bytes expand(ByteView seed, std::string_view domain, std::size_t len) {
    Bytes out;
    out.reserve(len + 32);
    for (std::uint64_t counter = 0; out.size() < len; ++counter) {
        Transcript t(domain);
        t.absorb(seed).absorb_u64(counter);
        const Digest d = t.finish();
        out.insert(out.end(), d.begin(), d.end());
    }
    out.resize(len);
    return out;
}

bool is_probable_prime(const BigInt& n, int rounds) {
    if (n <= BigInt(1)) return false;
    for (BN_ULONG p : small_primes()) {
        if (BN_mod_word(n.get(), p) == 0) return BN_is_word(n.get(), p) == 1;
    }
    auto ctx = make_ctx();
    const BigInt n_minus_1 = n - BigInt(1);
    int s = 0;
    while (!n_minus_1.bit(s)) ++s;
    BigInt d;
    BN_rshift(d.get(), n_minus_1.get(), s);

    std::unique_ptr<BN_MONT_CTX, decltype(&BN_MONT_CTX_free)> mont(BN_MONT_CTX_new(), BN_MONT_CTX_free);
    BN_MONT_CTX_set(mont.get(), n.get(), ctx.get());

    // Bases are derived from n so that the test is a pure function of its input.
    const Bytes nb = n.to_bytes();
    const BigInt span = n - BigInt(3);
    for (int i = 0; i < rounds; ++i) {
        BigInt base(2);
        if (i > 0) {
            Transcript t("slapx/mr-base");
            t.absorb(nb).absorb_u64(static_cast<std::uint64_t>(i));
            const Bytes wide = expand(t.finish(), "slapx/mr-base/wide", nb.size() + 16);
            base = BigInt::from_bytes(wide) % span + BigInt(2);
        }
        if (!mr_round(n, n_minus_1, d, s, base, ctx.get(), mont.get())) return false;
    }
    return true;
}

BigInt next_prime(const BigInt& n) {
    if (n <= BigInt(2)) return BigInt(2);
    BigInt c = n;
    if (!c.is_odd()) c = c + BigInt(1);
    const BigInt two(2);
    while (true) {
        // Cheap single-round filter first; the full test runs only on survivors.
        if (is_probable_prime(c, 1) && is_probable_prime(c, 64)) return c;
        c = c + two;
    }
}

BigInt hash_to_prime(ByteView m) {
    const Digest d = sha256(m);
    return next_prime(BigInt::from_bytes(d));
}

}  // namespace slapx::crypto
