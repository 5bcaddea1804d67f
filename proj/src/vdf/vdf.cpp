#include "slapx/vdf/vdf.hpp"

#include <atomic>
#include <stdexcept>

#include "slapx/crypto/codec.hpp"
#include "slapx/crypto/hash.hpp"

namespace slapx::vdf {

using crypto::ByteReader;
using crypto::ByteWriter;

namespace {

std::atomic<std::uint64_t> g_squarings{0};

struct MontDeleter {
    void operator()(BN_MONT_CTX* m) const { BN_MONT_CTX_free(m); }
};

void check(int rc, const char* what) {
    if (rc != 1) throw std::runtime_error(std::string("vdf: ") + what + " failed");
}

BigInt challenge_prime(const BigInt& x, const BigInt& y) {
    return crypto::hash_to_prime((x + y).to_bytes());
}

std::size_t modulus_width(const VdfParams& params) {
    return static_cast<std::size_t>((params.modulus.n.bits() + 7) / 8);
}

}  // namespace

VdfParams vdf_params(crypto::RsaModulus modulus, std::uint64_t kappa) {
    if (kappa == 0) throw std::invalid_argument("vdf: kappa must be positive");
    return VdfParams{std::move(modulus), kappa, HashSuite::Sha256};
}

VdfParams vdf_setup(int modulus_bits, std::uint64_t kappa, crypto::SeededRng& rng, crypto::ModulusSize size) {
    if (kappa == 0) throw std::invalid_argument("vdf: kappa must be positive");
    return vdf_params(crypto::rsa_setup(modulus_bits, rng, size), kappa);
}

BigInt vdf_input(const VdfParams& params, ByteView m) {
    return BigInt::from_bytes(crypto::sha256(m)) % params.modulus.n;
}

BigInt sequential_squarings(const BigInt& x, std::uint64_t tau, const BigInt& n) {
    auto ctx = crypto::make_ctx();
    std::unique_ptr<BN_MONT_CTX, MontDeleter> mont(BN_MONT_CTX_new());
    check(mont != nullptr, "mont_new");
    check(BN_MONT_CTX_set(mont.get(), n.get(), ctx.get()), "mont_set");

    BigInt acc;
    check(BN_to_montgomery(acc.get(), x.get(), mont.get(), ctx.get()), "to_mont");
    for (std::uint64_t i = 0; i < tau; ++i) {
        check(BN_mod_mul_montgomery(acc.get(), acc.get(), acc.get(), mont.get(), ctx.get()), "square");
    }
    BigInt y;
    check(BN_from_montgomery(y.get(), acc.get(), mont.get(), ctx.get()), "from_mont");
    g_squarings.fetch_add(tau, std::memory_order_relaxed);
    return y;
}

VdfSolution vdf_eval(const VdfParams& params, const VdfChallenge& challenge, std::uint64_t* squarings) {
    const BigInt& n = params.modulus.n;
    const BigInt x = vdf_input(params, challenge.m);
    BigInt y = sequential_squarings(x, challenge.tau, n);
    if (squarings != nullptr) *squarings = challenge.tau;

    BigInt ell = challenge_prime(x, y);
    const BigInt q = crypto::pow2(challenge.tau) / ell;
    BigInt pi = crypto::mod_exp(x, q, n);
    return VdfSolution{std::move(ell), std::move(pi), std::move(y)};
}

bool vdf_verify(const VdfParams& params, const VdfChallenge& challenge, const VdfSolution& sol) {
    const BigInt& n = params.modulus.n;
    if (sol.pi >= n || sol.y >= n || sol.ell <= BigInt(1)) return false;
    const BigInt x = vdf_input(params, challenge.m);
    const BigInt r = crypto::mod_exp(BigInt(2), BigInt(challenge.tau), sol.ell);
    const BigInt y = crypto::mod_mul(crypto::mod_exp(sol.pi, sol.ell, n), crypto::mod_exp(x, r, n), n);
    if (!(y == sol.y)) return false;
    return challenge_prime(x, y) == sol.ell;
}

std::uint64_t total_squarings() {
    return g_squarings.load(std::memory_order_relaxed);
}

Bytes encode_puzzle_body(const VdfParams& params, const VdfChallenge& challenge) {
    ByteWriter w;
    w.u8(kPuzzleTag).u8(static_cast<std::uint8_t>(params.hash));
    w.var(params.modulus.n.to_bytes(modulus_width(params)));
    w.u64(params.kappa).u64(challenge.tau).var(challenge.m);
    return w.take();
}

std::optional<std::pair<VdfParams, VdfChallenge>> decode_puzzle_body(ByteView in) {
    ByteReader r(in);
    std::uint8_t tag = 0, hash = 0;
    Bytes n_bytes, m;
    std::uint64_t kappa = 0, tau = 0;
    if (!r.u8(tag) || !r.u8(hash) || !r.var(n_bytes) || !r.u64(kappa) || !r.u64(tau) || !r.var(m) || !r.done()) {
        return std::nullopt;
    }
    if (tag != kPuzzleTag || hash != static_cast<std::uint8_t>(HashSuite::Sha256) || kappa == 0) return std::nullopt;
    const BigInt n = BigInt::from_bytes(n_bytes);
    if (!n.is_odd() || n <= BigInt(1)) return std::nullopt;
    return std::make_pair(vdf_params(crypto::rsa_from_n(n), kappa), VdfChallenge{std::move(m), tau});
}

Bytes encode_solution(const VdfParams& params, const VdfSolution& sol) {
    const std::size_t width = modulus_width(params);
    ByteWriter w;
    w.var(sol.ell.to_bytes()).var(sol.pi.to_bytes(width)).var(sol.y.to_bytes(width));
    return w.take();
}

std::optional<VdfSolution> decode_solution(ByteView in) {
    ByteReader r(in);
    Bytes ell, pi, y;
    if (!r.var(ell) || !r.var(pi) || !r.var(y) || !r.done()) return std::nullopt;
    return VdfSolution{BigInt::from_bytes(ell), BigInt::from_bytes(pi), BigInt::from_bytes(y)};
}

}  // namespace slapx::vdf
