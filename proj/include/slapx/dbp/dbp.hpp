#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "slapx/crypto/group.hpp"

namespace slapx::dbp {

using crypto::Bytes;
using crypto::ByteView;

/// One bit per byte, values 0 or 1.
using BitString = std::vector<std::uint8_t>;

inline constexpr double kSpeedOfLight = 299792458.0;

struct DbpKeyPair {
    crypto::Scalar sk;
    crypto::GroupElement pk;
};

struct RoundTranscript {
    std::uint8_t c = 0;
    std::uint8_t r = 0;
    std::int64_t rtt_ns = 0;
};

struct DbpConfig {
    int n = 100;
    double th_m = 50.0;
    double tolerance = 0.2;

    void validate() const;
    /// Largest number of failed rounds still accepted.
    int max_failures() const;
    /// Round-trip bound 2*th/c in nanoseconds.
    double rtt_bound_ns(double c_light = kSpeedOfLight) const;
};

DbpKeyPair dbp_keygen(const crypto::Group& group, crypto::SeededRng& rng);

/// ss = KDF(peer_pk^sk || nonce) expanded to 2n bits. Throws on an identity peer key.
BitString dbp_aka(const DbpKeyPair& own, const crypto::GroupElement& peer_pk, ByteView nonce, int n);

/// a = ss XOR m.
BitString dbp_response_table(const BitString& ss, const BitString& m);

/// a[2i + c - 1] with 1-based i and 1-based indexing into a.
std::uint8_t dbp_respond(const BitString& a, int i, std::uint8_t c);

bool dbp_round_passes(const DbpConfig& cfg, const BitString& a, int i, const RoundTranscript& t,
                      double c_light = kSpeedOfLight);
bool dbp_verify(const DbpConfig& cfg, const BitString& a, const std::vector<RoundTranscript>& transcripts,
                double c_light = kSpeedOfLight);

/// Claimed coordinates lie within th meters of the verifier.
bool within_threshold(double vx, double vy, double lx, double ly, double th_m);

BitString random_bits(crypto::SeededRng& rng, std::size_t len);
Bytes pack_bits(const BitString& bits);
BitString unpack_bits(ByteView packed, std::size_t len);

/// CSV: round,challenge,response,rtt_ns,pass
void write_transcript_csv(std::ostream& os, const DbpConfig& cfg, const BitString& a,
                          const std::vector<RoundTranscript>& transcripts);

}  // namespace slapx::dbp
