#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "slapx/crypto/group.hpp"

namespace slapx::rlrs {

using crypto::Bytes;
using crypto::ByteView;

/// Encoded signature width (tau, ring size, challenge, responses, zero padding).
inline constexpr std::size_t kSignatureBytes = 640;

/// An event: claimed location, time-window index and the window's beacon.
struct EventId {
    double lx = 0.0;
    double ly = 0.0;
    std::uint64_t ts = 0;
    Bytes beacon;

    /// lx || ly (IEEE-754 big-endian) || ts || SHA-256(beacon), 56 bytes.
    Bytes encode() const;
};

using Ring = std::vector<std::string>;

struct RlrsPublicParams {
    crypto::Group group;
    int t_max = 0;
    /// id -> g^s(id), published at extraction time.
    std::map<std::string, crypto::GroupElement> keys;
};

struct RlrsUserKey {
    std::string id;
    crypto::Scalar s;
};

struct RlrsSignature {
    crypto::Scalar c0;
    std::vector<crypto::Scalar> responses;
    crypto::GroupElement tau;
};

struct SignedMessage {
    Ring ring;
    Bytes m;
    RlrsSignature sig;
};

/// Largest ring whose signature still fits in kSignatureBytes.
int max_ring_size(const crypto::Group& group);

class RlrsIssuer {
public:
    static RlrsIssuer setup(int security_bits, int t_max, crypto::SeededRng& rng);

    /// s = H(msk || id) mod p. Repeated calls return the same key.
    RlrsUserKey extract(const std::string& id);
    const RlrsPublicParams& params() const { return params_; }

    /// Identity in L ∩ L' whose event tag matches both signatures, if they link.
    std::optional<std::string> revoke(const EventId& event, const SignedMessage& a, const SignedMessage& b) const;

    RlrsIssuer(const RlrsIssuer& other);
    RlrsIssuer(RlrsIssuer&&) noexcept;

private:
    RlrsIssuer(Bytes msk, RlrsPublicParams params) : msk_(std::move(msk)), params_(std::move(params)) {}
    crypto::Scalar secret_for(const std::string& id) const;

    Bytes msk_;
    RlrsPublicParams params_;
    mutable std::shared_mutex mu_;
    mutable std::map<std::pair<Bytes, std::string>, crypto::GroupElement> registry_;
};

/// Event base u0 = G_0(event).
crypto::GroupElement event_base(const crypto::Group& group, const EventId& event);

/// Throws std::invalid_argument if the ring is malformed or does not contain the signer.
RlrsSignature rlrs_sign(const RlrsPublicParams& pp, const RlrsUserKey& key, ByteView m, const Ring& ring,
                        const EventId& event, crypto::SeededRng& rng);
bool rlrs_verify(const RlrsPublicParams& pp, const Ring& ring, ByteView m, const EventId& event,
                 const RlrsSignature& sig);
/// Throws std::invalid_argument if either signature fails to verify.
bool rlrs_link(const RlrsPublicParams& pp, const EventId& event, const SignedMessage& a, const SignedMessage& b);

Bytes encode_signature(const RlrsPublicParams& pp, const RlrsSignature& sig);
std::optional<RlrsSignature> decode_signature(const RlrsPublicParams& pp, ByteView in);

}  // namespace slapx::rlrs
