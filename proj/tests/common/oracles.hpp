#pragma once

// Reference computations the tests compare the library against. None of them
// call into the library's arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "slapx/crypto/hash.hpp"

namespace slapx::oracle {

using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

// SHA-256 digest reduced mod n by Horner's rule over bytes.
inline u64 digest_mod(const crypto::Bytes& m, u64 n) {
    u64 r = 0;
    for (auto byte : crypto::sha256(m)) r = (r * 256 + byte) % n;
    return r;
}

// x^(2^tau) mod n for n = p*q with distinct primes: factor by trial division,
// reduce 2^tau mod p-1 per factor (Fermat), recombine by CRT.
inline std::optional<u64> vdf_y(u64 x, u64 tau, u64 n) {
    u64 p = 2;
    while (n % p != 0) ++p;
    const u64 q = n / p;
    if (p == q) return std::nullopt;
    auto part = [&](u64 prime) {
        if (x % prime == 0) return u64{0};
        return powmod(x, powmod(2, tau, prime - 1), prime);
    };
    const u64 yp = part(p), yq = part(q);
    for (u64 y = yq; y < n; y += q) {
        if (y % p == yp) return y;
    }
    return std::nullopt;
}

inline double r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double cov = sxy - sx * sy / n;
    return cov * cov / ((sxx - sx * sx / n) * (syy - sy * sy / n));
}

// P[Bin(n, p) >= k], summed in log space.
inline double binomial_tail(int n, double p, int k) {
    double total = 0.0;
    for (int j = std::max(k, 0); j <= n; ++j) {
        const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        total += std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
    }
    return total;
}

// Rounds a far prover must get right: ceil((1 - tol) * n).
inline int fraud_required(int n, double tol) { return static_cast<int>(std::ceil((1.0 - tol) * n - 1e-9)); }

// Early responder: right challenge with probability g, else a coin flip on the response.
inline double fraud_accept(int n, double tol, double g) { return binomial_tail(n, g + (1.0 - g) / 2.0, fraud_required(n, tol)); }

// Noiseless hijack in integer meters and tenths: w*d_path + (1-w)*honest_d <= threshold.
inline bool hijack_inside(int honest_d, int d_path, int w_tenths, int threshold_m = 50) {
    return w_tenths * d_path + (10 - w_tenths) * honest_d <= 10 * threshold_m;
}

// Packets for a payload by filling each one in turn.
inline std::size_t packets_by_filling(std::size_t payload, std::size_t mtu, std::size_t header) {
    std::size_t packets = 0;
    for (std::size_t left = payload; left > 0; ++packets) {
        const std::size_t room = mtu - header;
        left = left > room ? left - room : 0;
    }
    return packets;
}

}  // namespace slapx::oracle
