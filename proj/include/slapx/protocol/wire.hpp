#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "slapx/crypto/bignum.hpp"

namespace slapx::protocol {

using crypto::Bytes;
using crypto::ByteView;

enum class MessageType : std::uint8_t {
    PolRequest = 1,
    PolResponse = 2,
    NdRequest = 3,
    NdResponse = 4,
    SpectrumRequest = 5,
    SpectrumResponse = 6,
    ServiceRequest = 7,
    ServiceResponse = 8,
};

inline constexpr std::array<MessageType, 8> kAllMessageTypes{
    MessageType::PolRequest,      MessageType::PolResponse,      MessageType::NdRequest,
    MessageType::NdResponse,      MessageType::SpectrumRequest,  MessageType::SpectrumResponse,
    MessageType::ServiceRequest,  MessageType::ServiceResponse,
};

std::string_view message_name(MessageType t);

/// Fixed payload size of each message type. Payloads are zero-padded up to it.
std::size_t payload_budget(MessageType t);

enum class Phase { PolAp, PolNd, SpectrumQuery, ServiceRequest };
std::string_view phase_name(Phase p);
/// Request and response message types of a phase.
std::pair<MessageType, MessageType> phase_messages(Phase p);
std::size_t phase_budget(Phase p);

/// 1-byte type || 4-byte big-endian length || payload.
struct WireMessage {
    MessageType type = MessageType::PolRequest;
    Bytes payload;
};

inline constexpr std::size_t kFrameHeaderBytes = 5;

Bytes frame(const WireMessage& m);
/// Parses one frame; nullopt if the header is malformed or the buffer is short.
std::optional<WireMessage> unframe(ByteView in);

/// Pads `content` with zeros to the budget of `t`. Throws std::length_error if it does not fit.
Bytes pad_to_budget(MessageType t, Bytes content);

}  // namespace slapx::protocol
