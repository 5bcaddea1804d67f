#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slapx::protocol {

/// Protocol outcomes. The CLI maps each to its own exit code (value + 10, see cli).
enum class Reject : int {
    Ok = 0,
    Malformed = 1,
    CredentialInvalid = 2,
    StaleBeacon = 3,
    OutsideProximity = 4,
    DbpFailed = 5,
    DelegationFailed = 6,
    AlreadyIssued = 7,
    PolInvalid = 8,
    Linked = 9,
    Expired = 10,
    OutOfArea = 11,
    PuzzleSignatureInvalid = 12,
    PuzzleExpired = 13,
    PuzzleReused = 14,
    VdfInvalid = 15,
    BindingMismatch = 16,
};

inline constexpr int kRejectCount = 17;

std::string_view reject_name(Reject r);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(Reject code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Reject code() const { return code_; }

private:
    Reject code_;
};

}  // namespace slapx::protocol
