#pragma once

#include "slapx/crypto/codec.hpp"
#include "slapx/protocol/roles.hpp"

namespace slapx::protocol::detail {

using crypto::ByteReader;
using crypto::ByteWriter;

/// Status byte followed by zero padding.
inline Bytes reject_payload(MessageType t, Reject r) { return pad_to_budget(t, Bytes{static_cast<std::uint8_t>(r)}); }

/// True if the proof window `ts` is in the future or older than the validity threshold.
inline bool expired(const ProtocolConfig& cfg, std::uint64_t ts, std::uint64_t now_ms) {
    if (ts > window_of(cfg, now_ms)) return true;
    return now_ms / 1000 - ts * cfg.window_s > cfg.validity_s;
}

/// Public 2n-bit string m mixed into the response table, derived from both nonces.
dbp::BitString dbp_public_bits(ByteView client_nonce, ByteView nd_nonce, int n);
Bytes session_nonce(ByteView client_nonce, ByteView nd_nonce);

void write_cred_request(ByteWriter& w, const dac::CredRequest& req);
std::optional<dac::CredRequest> read_cred_request(const crypto::Group& g, ByteReader& r);

void write_attributes(ByteWriter& w, const dac::AttributeSet& attrs);
std::optional<dac::AttributeSet> read_attributes(ByteReader& r);

std::optional<dac::Presentation> read_presentation(const dac::DacParams& pp, ByteReader& r);

}  // namespace slapx::protocol::detail
