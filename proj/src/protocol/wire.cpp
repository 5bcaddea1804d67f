#include "slapx/protocol/wire.hpp"

#include <stdexcept>

#include "slapx/protocol/reject.hpp"

namespace slapx::protocol {

std::string_view message_name(MessageType t) {
    switch (t) {
        case MessageType::PolRequest: return "pol_request";
        case MessageType::PolResponse: return "pol_response";
        case MessageType::NdRequest: return "nd_request";
        case MessageType::NdResponse: return "nd_response";
        case MessageType::SpectrumRequest: return "spectrum_request";
        case MessageType::SpectrumResponse: return "spectrum_response";
        case MessageType::ServiceRequest: return "service_request";
        case MessageType::ServiceResponse: return "service_response";
    }
    return "unknown";
}

std::size_t payload_budget(MessageType t) {
    switch (t) {
        case MessageType::PolRequest: return 1040;
        case MessageType::PolResponse: return 1416;
        case MessageType::NdRequest: return 968;
        case MessageType::NdResponse: return 976;
        case MessageType::SpectrumRequest: return 1556;
        case MessageType::SpectrumResponse: return 1460;
        case MessageType::ServiceRequest: return 2452;
        case MessageType::ServiceResponse: return 260;
    }
    throw std::invalid_argument("payload_budget: unknown message type");
}

std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::PolAp: return "pol_ap";
        case Phase::PolNd: return "pol_nd";
        case Phase::SpectrumQuery: return "spectrum_query";
        case Phase::ServiceRequest: return "service_request";
    }
    return "unknown";
}

std::pair<MessageType, MessageType> phase_messages(Phase p) {
    switch (p) {
        case Phase::PolAp: return {MessageType::PolRequest, MessageType::PolResponse};
        case Phase::PolNd: return {MessageType::NdRequest, MessageType::NdResponse};
        case Phase::SpectrumQuery: return {MessageType::SpectrumRequest, MessageType::SpectrumResponse};
        case Phase::ServiceRequest: return {MessageType::ServiceRequest, MessageType::ServiceResponse};
    }
    throw std::invalid_argument("phase_messages: unknown phase");
}

std::size_t phase_budget(Phase p) {
    const auto [req, resp] = phase_messages(p);
    return payload_budget(req) + payload_budget(resp);
}

Bytes frame(const WireMessage& m) {
    if (m.payload.size() > 0xffffffffu) throw std::length_error("frame: payload too large");
    Bytes out;
    out.reserve(kFrameHeaderBytes + m.payload.size());
    out.push_back(static_cast<std::uint8_t>(m.type));
    const auto n = static_cast<std::uint32_t>(m.payload.size());
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(n >> s));
    out.insert(out.end(), m.payload.begin(), m.payload.end());
    return out;
}

std::optional<WireMessage> unframe(ByteView in) {
    if (in.size() < kFrameHeaderBytes) return std::nullopt;
    const std::uint8_t t = in[0];
    if (t < 1 || t > 8) return std::nullopt;
    std::uint32_t n = 0;
    for (int i = 1; i < 5; ++i) n = (n << 8) | in[i];
    if (in.size() - kFrameHeaderBytes != n) return std::nullopt;
    return WireMessage{static_cast<MessageType>(t), Bytes(in.begin() + kFrameHeaderBytes, in.end())};
}

Bytes pad_to_budget(MessageType t, Bytes content) {
    const std::size_t budget = payload_budget(t);
    if (content.size() > budget) {
        throw std::length_error(std::string(message_name(t)) + ": content of " + std::to_string(content.size()) +
                                " bytes exceeds budget " + std::to_string(budget));
    }
    content.resize(budget, 0);
    return content;
}

std::string_view reject_name(Reject r) {
    switch (r) {
        case Reject::Ok: return "GRANTED";
        case Reject::Malformed: return "MALFORMED";
        case Reject::CredentialInvalid: return "CREDENTIAL_INVALID";
        case Reject::StaleBeacon: return "STALE_BEACON";
        case Reject::OutsideProximity: return "OUTSIDE_PROXIMITY";
        case Reject::DbpFailed: return "DBP_FAILED";
        case Reject::DelegationFailed: return "DELEGATION_FAILED";
        case Reject::AlreadyIssued: return "ALREADY_ISSUED";
        case Reject::PolInvalid: return "POL_INVALID";
        case Reject::Linked: return "LINKED";
        case Reject::Expired: return "EXPIRED";
        case Reject::OutOfArea: return "OUT_OF_AREA";
        case Reject::PuzzleSignatureInvalid: return "PUZZLE_SIGNATURE_INVALID";
        case Reject::PuzzleExpired: return "PUZZLE_EXPIRED";
        case Reject::PuzzleReused: return "PUZZLE_REUSED";
        case Reject::VdfInvalid: return "VDF_INVALID";
        case Reject::BindingMismatch: return "BINDING_MISMATCH";
    }
    return "UNKNOWN";
}

}  // namespace slapx::protocol
