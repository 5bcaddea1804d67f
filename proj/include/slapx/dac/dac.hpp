#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "slapx/crypto/group.hpp"

namespace slapx::dac {

using crypto::Bytes;
using crypto::ByteView;
using crypto::GroupElement;
using crypto::Scalar;

/// Attribute kinds with fixed canonical widths (see attribute_width).
enum class AttrKind : std::uint8_t {
    DeviceId = 1,         // 16 bytes
    TxPower = 2,          // 2 bytes, dBm * 10, signed
    DeviceType = 3,       // 1 byte
    Validity = 4,         // 16 bytes, not-before || not-after (unix seconds)
    Location = 5,         // 16 bytes, lx || ly as IEEE-754 doubles
    Timestamp = 6,        // 8 bytes, TS window index
    ProofOfLocation = 7,  // 32 bytes, digest of the location proof
    Beacon = 8,           // 16 bytes, beacon nonce
};

std::size_t attribute_width(AttrKind kind);

struct Attribute {
    AttrKind kind = AttrKind::DeviceId;
    Bytes value;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

using AttributeSet = std::vector<Attribute>;

Attribute attr_device_id(std::string_view id);
Attribute attr_tx_power(double dbm);
Attribute attr_device_type(std::uint8_t type);
Attribute attr_validity(std::uint64_t not_before, std::uint64_t not_after);
Attribute attr_location(double lx, double ly);
Attribute attr_timestamp(std::uint64_t ts);
Attribute attr_proof_of_location(ByteView digest);
Attribute attr_beacon(ByteView nonce);

/// Reads back helpers for the fixed-width encodings.
double tx_power_of(const Attribute& a);
std::pair<double, double> location_of(const Attribute& a);
std::uint64_t timestamp_of(const Attribute& a);

struct DacParams {
    crypto::Group group;
    int t = 0;
    int eta = 0;
    GroupElement h0;
    std::vector<GroupElement> h;  // one base per attribute slot
    GroupElement root_pk;
};

struct SchnorrSig {
    Scalar c;
    Scalar z;
};

SchnorrSig schnorr_sign(const crypto::Group& g, const Scalar& sk, ByteView msg, crypto::SeededRng& rng);
bool schnorr_verify(const crypto::Group& g, const GroupElement& pk, ByteView msg, const SchnorrSig& sig);

struct DacRoot {
    DacParams pp;
    Scalar root_sk;
};

/// eta >= 2 and 1 <= t.
DacRoot dac_setup(int security_bits, int t, int eta, crypto::SeededRng& rng);

struct UserKey {
    Scalar sk;
    GroupElement pk;
};

struct Pseudonym {
    GroupElement nym;
    Scalar aux;
};

UserKey dac_keygen(const DacParams& pp, crypto::SeededRng& rng);
/// nym = g^sk * h0^aux for fresh aux.
Pseudonym dac_nymgen(const DacParams& pp, const UserKey& key, crypto::SeededRng& rng);

struct DelegationKey {
    Scalar x;
    GroupElement pk;
};

/// Public record of one issued commitment, signed by its issuer.
struct RegistryEntry {
    std::uint8_t level = 1;
    std::uint8_t max_level = 1;
    std::uint32_t parent = kNoParent;  // registry index of the delegator; kNoParent for root-issued
    GroupElement commitment;
    std::optional<GroupElement> dk_pk;
    SchnorrSig sig;

    static constexpr std::uint32_t kNoParent = 0xffffffffu;
    Bytes signed_bytes() const;
};

/// Append-only public bulletin of issued commitments. Entries are validated on insertion.
class DacRegistry {
public:
    explicit DacRegistry(DacParams pp) : pp_(std::move(pp)) {}
    DacRegistry(const DacRegistry&) = delete;

    /// Throws std::invalid_argument if the entry's signature chain does not check out.
    std::uint32_t add(RegistryEntry entry);
    RegistryEntry get(std::uint32_t index) const;
    std::size_t size() const;
    std::vector<std::uint32_t> indices_at_level(std::uint8_t level) const;
    const DacParams& params() const { return pp_; }

private:
    DacParams pp_;
    mutable std::shared_mutex mu_;
    std::vector<RegistryEntry> entries_;
};

struct Credential {
    std::uint8_t level = 1;
    std::uint8_t max_level = 1;
    AttributeSet attrs;
    GroupElement commitment;
    Scalar rho;
    std::optional<DelegationKey> dk;  // nullopt is the terminal key
    std::uint32_t registry_index = 0;
};

/// Sent by the user to an issuer: pk with proof of knowledge of sk, plus an optional delegation key.
struct CredRequest {
    GroupElement pk;
    SchnorrSig pok;
    std::optional<GroupElement> dk_pk;
};

struct PendingCred {
    CredRequest request;
    std::optional<DelegationKey> dk;
};

/// What the issuer returns: the registry slot and the commitment randomness.
struct IssuedCred {
    std::uint32_t registry_index = 0;
    Scalar rho;
};

PendingCred dac_cred_request(const DacParams& pp, const UserKey& key, bool want_delegation, crypto::SeededRng& rng);

/// Root issuance at level 1. `max_level` is L' (1 means no delegation right).
IssuedCred dac_create_cred(const DacRoot& root, DacRegistry& registry, const CredRequest& req,
                           const AttributeSet& attrs, int max_level, crypto::SeededRng& rng);
Credential dac_get_cred(const DacRegistry& registry, const UserKey& key, const AttributeSet& attrs,
                        const PendingCred& pending, const IssuedCred& issued);

/// Delegation: the holder of `delegator` issues a level+1 credential over (A, A_l).
/// With terminal=true the recipient gets dk = ⊥ and max_level = its own level.
IssuedCred dac_issue_cred(DacRegistry& registry, const Credential& delegator, const AttributeSet& a_l,
                          const CredRequest& req, int max_level, bool terminal, crypto::SeededRng& rng);
Credential dac_receive_cred(const DacRegistry& registry, const UserKey& key, const Credential& delegator,
                            const AttributeSet& a_l, const PendingCred& pending, const IssuedCred& issued);
/// Same, for a recipient that only learned the delegator's attribute values.
Credential dac_receive_cred(const DacRegistry& registry, const UserKey& key, const AttributeSet& delegator_attrs,
                            const AttributeSet& a_l, const PendingCred& pending, const IssuedCred& issued);

struct DisclosedAttribute {
    std::uint8_t slot = 0;
    Attribute attr;
};

struct Presentation {
    std::uint8_t level = 1;
    std::uint8_t slot_count = 0;
    GroupElement nym;
    GroupElement commitment;  // re-randomized
    std::vector<std::uint32_t> ring;
    std::vector<Scalar> or_c;
    std::vector<Scalar> or_z;
    Scalar z_sk;
    Scalar z_aux;
    Scalar z_rho;
    std::vector<Scalar> z_attr;  // undisclosed slots, ascending
    std::vector<DisclosedAttribute> disclosed;

    /// Disclosed attribute of the given kind, if any.
    const Attribute* find(AttrKind kind) const;
};

inline constexpr int kDefaultAnonymitySet = 4;

/// Throws std::invalid_argument if some attribute of D is not in the credential.
Presentation dac_cred_prove(const DacRegistry& registry, const UserKey& key, const Pseudonym& nym,
                            const Credential& cred, const AttributeSet& disclose, ByteView context,
                            crypto::SeededRng& rng, int anonymity = kDefaultAnonymitySet);
bool dac_cred_verify(const DacRegistry& registry, const Presentation& p, ByteView context);

/// Issuance transfer form of a credential, padded to kCredentialBytes.
inline constexpr std::size_t kCredentialBytes = 224;
Bytes encode_credential(const DacRegistry& registry, const Credential& cred);

Bytes encode_presentation(const Presentation& p);
std::optional<Presentation> decode_presentation(const DacParams& pp, ByteView in);

}  // namespace slapx::dac
