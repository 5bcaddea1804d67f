#include "slapx/dbp/dbp.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "slapx/crypto/hash.hpp"

namespace slapx::dbp {

void DbpConfig::validate() const {
    if (n < 1) throw std::invalid_argument("dbp: rounds must be >= 1");
    if (!(tolerance >= 0.0 && tolerance < 1.0)) throw std::invalid_argument("dbp: tolerance must be in [0, 1)");
    if (!(th_m > 0.0)) throw std::invalid_argument("dbp: threshold must be positive");
}

int DbpConfig::max_failures() const {
    // Small epsilon so that e.g. 0.2 * 100 is not floored to 19.
    return static_cast<int>(std::floor(tolerance * n + 1e-9));
}

double DbpConfig::rtt_bound_ns(double c_light) const {
    return 2.0 * th_m / c_light * 1e9;
}

DbpKeyPair dbp_keygen(const crypto::Group& group, crypto::SeededRng& rng) {
    crypto::Scalar sk = group.random_scalar(rng);
    while (sk.is_zero()) sk = group.random_scalar(rng);
    crypto::GroupElement pk = group.generator() * sk;
    return DbpKeyPair{std::move(sk), std::move(pk)};
}

BitString dbp_aka(const DbpKeyPair& own, const crypto::GroupElement& peer_pk, ByteView nonce, int n) {
    if (n < 1) throw std::invalid_argument("dbp_aka: rounds must be >= 1");
    if (peer_pk.is_identity()) throw std::invalid_argument("dbp_aka: identity peer key");
    const crypto::GroupElement shared = peer_pk * own.sk;
    const Bytes point = shared.to_bytes();
    const crypto::Digest seed = crypto::Transcript("slapx/dbp/aka").absorb(point).absorb(nonce).finish();
    const std::size_t len = static_cast<std::size_t>(2 * n);
    return unpack_bits(crypto::expand(seed, "slapx/dbp/ss", (len + 7) / 8), len);
}

BitString dbp_response_table(const BitString& ss, const BitString& m) {
    if (ss.size() != m.size()) throw std::invalid_argument("dbp_response_table: length mismatch");
    BitString a(ss.size());
    for (std::size_t i = 0; i < ss.size(); ++i) a[i] = (ss[i] ^ m[i]) & 1;
    return a;
}

std::uint8_t dbp_respond(const BitString& a, int i, std::uint8_t c) {
    const long idx = 2L * i + c - 1;
    if (i < 1 || c > 1 || idx > static_cast<long>(a.size())) throw std::out_of_range("dbp_respond: round index");
    return a[static_cast<std::size_t>(idx - 1)];
}

bool dbp_round_passes(const DbpConfig& cfg, const BitString& a, int i, const RoundTranscript& t, double c_light) {
    if (t.rtt_ns < 0 || static_cast<double>(t.rtt_ns) > cfg.rtt_bound_ns(c_light)) return false;
    return t.r == dbp_respond(a, i, t.c);
}

bool dbp_verify(const DbpConfig& cfg, const BitString& a, const std::vector<RoundTranscript>& transcripts,
                double c_light) {
    if (static_cast<int>(transcripts.size()) != cfg.n || a.size() != static_cast<std::size_t>(2 * cfg.n)) {
        return false;
    }
    int failures = 0;
    for (int i = 1; i <= cfg.n; ++i) {
        if (!dbp_round_passes(cfg, a, i, transcripts[static_cast<std::size_t>(i - 1)], c_light)) ++failures;
    }
    return failures <= cfg.max_failures();
}

bool within_threshold(double vx, double vy, double lx, double ly, double th_m) {
    return std::hypot(lx - vx, ly - vy) <= th_m;
}

BitString random_bits(crypto::SeededRng& rng, std::size_t len) {
    return unpack_bits(rng.bytes((len + 7) / 8), len);
}

Bytes pack_bits(const BitString& bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
    }
    return out;
}

BitString unpack_bits(ByteView packed, std::size_t len) {
    if (packed.size() * 8 < len) throw std::invalid_argument("unpack_bits: not enough bytes");
    BitString out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = (packed[i / 8] >> (7 - i % 8)) & 1;
    return out;
}

void write_transcript_csv(std::ostream& os, const DbpConfig& cfg, const BitString& a,
                          const std::vector<RoundTranscript>& transcripts) {
    os << "round,challenge,response,rtt_ns,pass\n";
    for (std::size_t k = 0; k < transcripts.size(); ++k) {
        const auto& t = transcripts[k];
        const int i = static_cast<int>(k) + 1;
        const bool pass = i <= cfg.n && dbp_round_passes(cfg, a, i, t);
        os << i << ',' << int{t.c} << ',' << int{t.r} << ',' << t.rtt_ns << ',' << (pass ? 1 : 0) << '\n';
    }
}

}  // namespace slapx::dbp
