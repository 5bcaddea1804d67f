#pragma once

#include <optional>
#include <string>

#include "slapx/crypto/codec.hpp"
#include "slapx/dac/dac.hpp"
#include "slapx/protocol/spectrum_db.hpp"
#include "slapx/protocol/wire.hpp"
#include "slapx/rlrs/rlrs.hpp"
#include "slapx/vdf/vdf.hpp"

namespace slapx::protocol {

/// Time-synchronized AP beacon for one window.
struct Beacon {
    std::string ap_id;  // at most 16 bytes
    std::uint64_t ts = 0;
    Bytes nonce;  // 16 bytes

    /// ap_id zero-padded to 16 || ts || nonce, 40 bytes.
    Bytes encode() const;
    static std::optional<Beacon> decode(crypto::ByteReader& r);
    friend bool operator==(const Beacon&, const Beacon&) = default;
};

inline constexpr std::size_t kBeaconBytes = 40;
inline constexpr std::size_t kNonceBytes = 16;

/// D_TS = (beacon, (lx, ly), TS).
struct LocationClaim {
    Beacon beacon;
    double lx = 0.0;
    double ly = 0.0;
    std::uint64_t ts = 0;

    Bytes encode() const;
    static std::optional<LocationClaim> decode(crypto::ByteReader& r);
    rlrs::EventId event() const { return {lx, ly, ts, beacon.encode()}; }
};

/// Φ = (m, sigma_AP, tau_AP) with m = (D_TS, nym_c, cred_c). cred_c is the
/// re-randomized commitment the client presented to the AP.
struct LocationProof {
    LocationClaim claim;
    crypto::GroupElement nym;
    crypto::GroupElement cred_ref;
    rlrs::Ring ring;
    rlrs::RlrsSignature sig;

    Bytes message() const;
    rlrs::EventId event() const { return claim.event(); }
    rlrs::SignedMessage signed_message() const { return {ring, message(), sig}; }
    bool verify(const rlrs::RlrsPublicParams& pp) const;

    /// m || ring || signature (kSignatureBytes).
    Bytes encode(const rlrs::RlrsPublicParams& pp) const;
    static std::optional<LocationProof> decode(const rlrs::RlrsPublicParams& pp, crypto::ByteReader& r);
};

/// ρ_c = ((lx, ly), ch, TV) plus the window the query belongs to.
struct SpectrumQuery {
    double lx = 0.0;
    double ly = 0.0;
    std::uint16_t channel = 0;
    std::uint32_t validity_s = 0;
    std::uint64_t ts = 0;

    Bytes encode() const;
    static std::optional<SpectrumQuery> decode(crypto::ByteReader& r);
};

/// Π: VDF parameters, a fresh nonce and the binding to the requester's pseudonym.
struct Puzzle {
    vdf::VdfParams params;
    Bytes nonce;  // 16 bytes
    std::uint64_t issued_ms = 0;
    std::uint64_t ts = 0;
    crypto::Digest binding{};

    Bytes encode() const;
    static std::optional<Puzzle> decode(ByteView in);
    /// VDF challenge for a service message m: H(nonce || m) with tau = kappa.
    vdf::VdfChallenge challenge_for(ByteView m) const;
};

crypto::Digest nym_binding(const crypto::GroupElement& nym);

/// Longest service message m a client may bind a puzzle solution to.
inline constexpr std::size_t kMaxServiceMessage = 64;

/// Which proof of location accompanies a request.
enum class PolPath : std::uint8_t { AccessPoint = 1, NeighborDevice = 2 };

/// Presentation context: hash of verifier role, TS window, request type and request fields.
Bytes presentation_context(std::string_view verifier, std::uint64_t ts, std::string_view request_type,
                           ByteView fields);

}  // namespace slapx::protocol
