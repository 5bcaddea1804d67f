#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "slapx/crypto/sgn.hpp"
#include "slapx/dbp/dbp.hpp"
#include "slapx/protocol/messages.hpp"
#include "slapx/protocol/prox.hpp"
#include "slapx/protocol/reject.hpp"
#include "slapx/vdf/difficulty.hpp"

namespace slapx::protocol {

struct ProtocolConfig {
    int security_bits = 128;
    int dac_slots = 8;
    int rlrs_t_max = 16;
    double proximity_m = 50.0;
    double rtt_weight = 0.5;
    std::uint64_t window_s = 60;
    std::uint64_t validity_s = 60;
    int anonymity = dac::kDefaultAnonymitySet;
    dbp::DbpConfig dbp;
    RadioEnv radio;
    vdf::DifficultyTable difficulty;
    double high_power_dbm = 30.0;  // strictly above: HighPower
    std::vector<std::uint8_t> flagged_device_types;
};

std::uint64_t window_of(const ProtocolConfig& cfg, std::uint64_t now_ms);

/// Public state every role reads: configuration, the credential registry and the AP key directory.
struct Directory {
    Directory(ProtocolConfig c, dac::DacParams pp, rlrs::RlrsPublicParams r)
        : cfg(std::move(c)), registry(std::move(pp)), rlrs(std::move(r)) {}

    ProtocolConfig cfg;
    dac::DacRegistry registry;
    rlrs::RlrsPublicParams rlrs;
};

/// The regulator: DAC root and RLRS issuer.
class Authority {
public:
    Authority(ProtocolConfig cfg, std::uint64_t seed);

    Directory& directory() { return *dir_; }
    const Directory& directory() const { return *dir_; }

    dac::Credential enroll(const dac::UserKey& key, const dac::AttributeSet& attrs, int max_level);
    rlrs::RlrsUserKey enroll_ap(const std::string& id);
    /// AP identity when two proofs link under the same event.
    std::optional<std::string> revoke(const LocationProof& a, const LocationProof& b) const;

private:
    crypto::SeededRng rng_;
    dac::DacRoot root_;
    rlrs::RlrsIssuer issuer_;
    std::unique_ptr<Directory> dir_;
};

class AccessPoint {
public:
    AccessPoint(const Directory& dir, rlrs::RlrsUserKey key, rlrs::Ring ring, double x, double y,
                std::uint64_t seed);

    const std::string& id() const { return key_.id; }
    double x() const { return x_; }
    double y() const { return y_; }
    Beacon beacon(std::uint64_t ts) const;

    /// Alg. 1 AP side. Always returns a PolResponse payload; status byte first.
    Bytes respond(ByteView request, const Measurement& meas, std::uint64_t now_ms);
    /// A colluding AP signs the same event more than once.
    void set_enforce_unique(bool on) { enforce_unique_ = on; }

private:
    const Directory& dir_;
    rlrs::RlrsUserKey key_;
    rlrs::Ring ring_;
    double x_;
    double y_;
    Bytes beacon_key_;
    crypto::SeededRng rng_;
    bool enforce_unique_ = true;
    std::mutex mu_;
    std::map<std::uint64_t, std::set<Bytes>> issued_;  // window -> encoded events
};

/// Prover side of the rapid bit exchange, as seen by the verifier.
class DbpProver {
public:
    virtual ~DbpProver() = default;
    virtual void setup(const crypto::GroupElement& verifier_pk, ByteView verifier_nonce) = 0;
    virtual dbp::RoundTranscript round(int i, std::uint8_t c) = 0;
};

class NeighborDevice {
public:
    NeighborDevice(Directory& dir, dac::UserKey key, dac::Credential cred, double x, double y, std::uint64_t seed);

    double x() const { return x_; }
    double y() const { return y_; }

    /// Alg. 2 ND side, including the timed phase against `prover`. Returns an NdResponse payload.
    Bytes respond(ByteView request, std::uint64_t now_ms, DbpProver& prover);
    const std::vector<dbp::RoundTranscript>& last_transcript() const { return transcript_; }

private:
    Directory& dir_;
    dac::UserKey key_;
    dac::Credential cred_;
    double x_;
    double y_;
    crypto::SeededRng rng_;
    std::vector<dbp::RoundTranscript> transcript_;
};

/// What the PSD returns on success.
struct SpectrumGrant {
    Puzzle puzzle;
    Bytes puzzle_bytes;
    Bytes puzzle_sig;
    SpectrumRecord record;
};

struct ServiceGrant {
    Bytes grant_id;
    std::uint64_t valid_until_ms = 0;
};

class Client {
public:
    Client(const Directory& dir, dac::UserKey key, dac::Credential cred, std::uint64_t seed);

    /// Fresh pseudonym for a new protocol run; drops the previous run's proofs.
    void new_run();

    Bytes pol_request(const Beacon& beacon, double lx, double ly, std::uint64_t ts);
    LocationProof accept_pol_response(ByteView response);

    Bytes nd_request(double lx, double ly, std::uint64_t ts);
    /// Honest prover at the given distance from the ND (RTT from light speed).
    std::unique_ptr<DbpProver> honest_prover(double distance_m);
    dac::Credential accept_nd_response(ByteView response);

    Bytes spectrum_request(const SpectrumQuery& q, PolPath path);
    SpectrumGrant accept_spectrum_response(ByteView response);

    /// Solves the puzzle for m. `squarings` receives the VDF work actually done.
    Bytes service_request(ByteView m, const SpectrumGrant& grant, PolPath path, std::uint64_t* squarings = nullptr);
    ServiceGrant accept_service_response(ByteView response);

    const ProtocolConfig& config() const { return dir_.cfg; }
    /// Use a proof of location obtained elsewhere (replay experiments).
    void adopt_proof(LocationProof phi) { phi_ = std::move(phi); }
    const std::optional<LocationProof>& proof() const { return phi_; }
    bool has_delegated() const { return delegated_.has_value(); }
    const dac::Credential& delegated_credential() const;

private:
    struct Delegated {
        dac::UserKey key;
        dac::Credential cred;
        dac::Pseudonym nym;
    };
    struct NdPending {
        dbp::DbpKeyPair eph;
        Bytes nonce;
        dac::UserKey key;
        dac::PendingCred pending;
        dac::AttributeSet a_l;
    };
    const dac::UserKey& key_for(PolPath path) const;
    const dac::Credential& cred_for(PolPath path) const;
    const dac::Pseudonym& nym_for(PolPath path) const;
    dac::AttributeSet disclose_for(PolPath path) const;

    const Directory& dir_;
    dac::UserKey key_;
    dac::Credential cred_;
    crypto::SeededRng rng_;
    std::optional<dac::Pseudonym> nym_;
    std::optional<LocationClaim> pending_claim_;
    std::optional<LocationProof> phi_;
    std::optional<NdPending> nd_;
    std::optional<Delegated> delegated_;
};

using ModulusSource = std::function<crypto::RsaModulus()>;

class Psd {
public:
    Psd(const Directory& dir, SpectrumDb db, ModulusSource moduli, std::uint64_t seed);

    const crypto::GroupElement& public_key() const { return sgn_.pk; }
    /// Alg. 3 part 2. Returns a SpectrumResponse payload; status byte first.
    Bytes respond(ByteView request, std::uint64_t now_ms);
    vdf::DeviceClass classify(const dac::Presentation& p) const;
    std::size_t tracked_tags() const;

private:
    Reject check(ByteView request, std::uint64_t now_ms, Bytes& out);

    const Directory& dir_;
    SpectrumDb db_;
    ModulusSource moduli_;
    crypto::SeededRng rng_;
    crypto::SgnKeyPair sgn_;
    mutable std::mutex mu_;
    std::map<std::uint64_t, std::set<Bytes>> tags_;  // window -> link tags already served
};

class ServiceServer {
public:
    ServiceServer(const Directory& dir, crypto::GroupElement psd_pk);

    struct GrantRecord {
        Bytes grant_id;
        std::uint64_t kappa = 0;
        std::uint64_t ts = 0;
        PolPath path = PolPath::AccessPoint;
    };

    /// Alg. 3 part 4. Returns a ServiceResponse payload; status byte first.
    Bytes respond(ByteView request, std::uint64_t now_ms);
    std::vector<GrantRecord> grants() const;

private:
    Reject check(ByteView request, std::uint64_t now_ms, GrantRecord& rec);

    const Directory& dir_;
    crypto::GroupElement psd_pk_;
    mutable std::mutex mu_;
    std::set<Bytes> spent_;
    std::vector<GrantRecord> grants_;
};

/// Reject code carried in the first byte of a response payload.
Reject response_status(ByteView response);

// In-process drivers for whole phases. Each throws ProtocolError on a reject.

struct PhaseBytes {
    std::size_t request = 0;
    std::size_t response = 0;
    std::size_t total() const { return request + response; }
};

LocationProof pol_ap(Client& client, AccessPoint& ap, std::uint64_t now_ms, double lx, double ly,
                     const Measurement& meas, PhaseBytes* bytes = nullptr);
dac::Credential pol_nd(Client& client, NeighborDevice& nd, std::uint64_t now_ms, double lx, double ly,
                       double distance_m, PhaseBytes* bytes = nullptr);
SpectrumGrant spectrum_query(Client& client, Psd& psd, PolPath path, const SpectrumQuery& q, std::uint64_t now_ms,
                             PhaseBytes* bytes = nullptr);
/// Also checks that the VDF work done before the grant is at least kappa squarings.
ServiceGrant service_request(Client& client, ServiceServer& server, const SpectrumGrant& grant, PolPath path,
                             ByteView m, std::uint64_t now_ms, PhaseBytes* bytes = nullptr);

}  // namespace slapx::protocol
