#pragma once

#include "slapx/crypto/group.hpp"

namespace slapx::crypto {

/// Standard signature used to authenticate issued puzzles (ECDSA over P-256 with SHA-256).
struct SgnKeyPair {
    Scalar sk;
    GroupElement pk;
};

SgnKeyPair sgn_keygen(const Group& group, SeededRng& rng);
/// DER-encoded ECDSA signature.
Bytes sgn_sign(const Group& group, const SgnKeyPair& key, ByteView msg);
bool sgn_verify(const Group& group, const GroupElement& pk, ByteView msg, ByteView sig);

}  // namespace slapx::crypto
