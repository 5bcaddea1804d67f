#include <bit>
#include <cmath>
#include <stdexcept>

#include "internal.hpp"

namespace slapx::protocol {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

void expect_ok(ByteView response) {
    const Reject r = response_status(response);
    if (r != Reject::Ok) throw ProtocolError(r, std::string(reject_name(r)));
}

class HonestProver final : public DbpProver {
public:
    HonestProver(const dbp::DbpKeyPair& eph, Bytes nonce, int n, double distance_m)
        : eph_(eph), nonce_(std::move(nonce)), n_(n), distance_m_(distance_m) {}

    void setup(const crypto::GroupElement& verifier_pk, ByteView verifier_nonce) override {
        const auto ss = dbp::dbp_aka(eph_, verifier_pk, detail::session_nonce(nonce_, verifier_nonce), n_);
        a_ = dbp::dbp_response_table(ss, detail::dbp_public_bits(nonce_, verifier_nonce, n_));
    }

    dbp::RoundTranscript round(int i, std::uint8_t c) override {
        const double rtt_ns = 2.0 * distance_m_ / dbp::kSpeedOfLight * 1e9;
        return {c, dbp::dbp_respond(a_, i, c), static_cast<std::int64_t>(std::ceil(rtt_ns))};
    }

private:
    dbp::DbpKeyPair eph_;
    Bytes nonce_;
    int n_;
    double distance_m_;
    dbp::BitString a_;
};

}  // namespace

Client::Client(const Directory& dir, dac::UserKey key, dac::Credential cred, std::uint64_t seed)
    : dir_(dir), key_(std::move(key)), cred_(std::move(cred)), rng_(seed) {
    new_run();
}

void Client::new_run() {
    nym_ = dac::dac_nymgen(dir_.registry.params(), key_, rng_);
    pending_claim_.reset();
    phi_.reset();
    nd_.reset();
    delegated_.reset();
}

const dac::Credential& Client::delegated_credential() const {
    if (!delegated_) throw std::logic_error("client: no delegated credential");
    return delegated_->cred;
}

const dac::UserKey& Client::key_for(PolPath path) const {
    if (path == PolPath::AccessPoint) return key_;
    if (!delegated_) throw std::logic_error("client: no delegated credential");
    return delegated_->key;
}

const dac::Credential& Client::cred_for(PolPath path) const {
    return path == PolPath::AccessPoint ? cred_ : delegated_credential();
}

const dac::Pseudonym& Client::nym_for(PolPath path) const {
    if (path == PolPath::AccessPoint) return *nym_;
    if (!delegated_) throw std::logic_error("client: no delegated credential");
    return delegated_->nym;
}

dac::AttributeSet Client::disclose_for(PolPath path) const {
    dac::AttributeSet out;
    const auto want = [&](dac::AttrKind a, dac::AttrKind b) {
        for (const auto& x : cred_for(path).attrs) {
            if (x.kind == a || x.kind == b) out.push_back(x);
        }
    };
    if (path == PolPath::AccessPoint) {
        want(dac::AttrKind::TxPower, dac::AttrKind::DeviceType);
    } else {
        // Only the delegated A_l; the delegator's own attributes stay hidden.
        out.assign(cred_for(path).attrs.end() - 2, cred_for(path).attrs.end());
    }
    return out;
}

// AP path

Bytes Client::pol_request(const Beacon& beacon, double lx, double ly, std::uint64_t ts) {
    LocationClaim claim{beacon, lx, ly, ts};
    const Bytes claim_bytes = claim.encode();
    const auto p = dac::dac_cred_prove(dir_.registry, key_, *nym_, cred_, {},
                                       presentation_context("ap", ts, "pol-ap", claim_bytes), rng_,
                                       dir_.cfg.anonymity);
    pending_claim_ = std::move(claim);
    ByteWriter w;
    w.raw(claim_bytes).var(dac::encode_presentation(p));
    return pad_to_budget(MessageType::PolRequest, w.take());
}

LocationProof Client::accept_pol_response(ByteView response) {
    expect_ok(response);
    ByteReader r(response.subspan(1));
    auto phi = LocationProof::decode(dir_.rlrs, r);
    if (!phi || !pending_claim_) throw ProtocolError(Reject::Malformed, "pol response");
    if (phi->claim.encode() != pending_claim_->encode() || !(phi->nym == nym_->nym) || !phi->verify(dir_.rlrs)) {
        throw ProtocolError(Reject::PolInvalid, "pol response does not verify");
    }
    phi_ = *phi;
    return std::move(*phi);
}

// ND path

Bytes Client::nd_request(double lx, double ly, std::uint64_t ts) {
    const auto& pp = dir_.registry.params();
    // The delegated credential gets a key of its own, so the ND cannot link it to this client.
    auto dkey = dac::dac_keygen(pp, rng_);
    auto pending = dac::dac_cred_request(pp, dkey, false, rng_);
    auto eph = dbp::dbp_keygen(pp.group, rng_);
    Bytes nonce = rng_.bytes(kNonceBytes);

    ByteWriter w;
    w.u64(std::bit_cast<std::uint64_t>(lx == 0.0 ? 0.0 : lx)).u64(std::bit_cast<std::uint64_t>(ly == 0.0 ? 0.0 : ly));
    w.u64(ts).raw(eph.pk.to_bytes()).raw(nonce);
    detail::write_cred_request(w, pending.request);
    const auto p = dac::dac_cred_prove(dir_.registry, key_, *nym_, cred_, {},
                                       presentation_context("nd", ts, "pol-nd", w.bytes()), rng_, dir_.cfg.anonymity);
    w.var(dac::encode_presentation(p));
    nd_ = NdPending{std::move(eph), std::move(nonce), std::move(dkey), std::move(pending),
                    {dac::attr_location(lx, ly), dac::attr_timestamp(ts)}};
    return pad_to_budget(MessageType::NdRequest, w.take());
}

std::unique_ptr<DbpProver> Client::honest_prover(double distance_m) {
    if (!nd_) throw std::logic_error("client: no pending ND request");
    return std::make_unique<HonestProver>(nd_->eph, nd_->nonce, dir_.cfg.dbp.n, distance_m);
}

dac::Credential Client::accept_nd_response(ByteView response) {
    expect_ok(response);
    if (!nd_) throw std::logic_error("client: no pending ND request");
    const auto& g = dir_.registry.params().group;
    ByteReader r(response.subspan(1));
    Bytes enc;
    if (!r.raw(dac::kCredentialBytes, enc)) throw ProtocolError(Reject::Malformed, "nd response");
    // level, max_level, parent u32, index u32, C, dk_pk, sig (c, z), rho.
    ByteReader cr(enc);
    std::uint8_t level = 0, max_level = 0;
    std::uint32_t parent = 0, index = 0;
    Bytes skip, rho;
    cr.u8(level);
    cr.u8(max_level);
    cr.u32(parent);
    cr.u32(index);
    cr.raw(2 * g.element_size() + 2 * g.scalar_size(), skip);
    cr.raw(g.scalar_size(), rho);
    auto delegator_attrs = detail::read_attributes(r);
    if (!cr.ok() || !delegator_attrs) throw ProtocolError(Reject::Malformed, "nd response");
    try {
        auto cred = dac::dac_receive_cred(dir_.registry, nd_->key, *delegator_attrs, nd_->a_l, nd_->pending,
                                          dac::IssuedCred{index, g.scalar_from_bytes(rho)});
        if (cred.dk.has_value() || cred.max_level != cred.level) {
            throw ProtocolError(Reject::DelegationFailed, "delegated credential is not terminal");
        }
        auto nym = dac::dac_nymgen(dir_.registry.params(), nd_->key, rng_);
        delegated_ = Delegated{nd_->key, cred, std::move(nym)};
        nd_.reset();
        return cred;
    } catch (const std::invalid_argument& e) {
        throw ProtocolError(Reject::DelegationFailed, e.what());
    }
}

// Spectrum query and service request (Alg. 3)

Bytes Client::spectrum_request(const SpectrumQuery& q, PolPath path) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(path)).raw(q.encode());
    if (path == PolPath::AccessPoint) {
        if (!phi_) throw std::logic_error("client: no proof of location");
        w.var(phi_->encode(dir_.rlrs));
    }
    const auto p = dac::dac_cred_prove(dir_.registry, key_for(path), nym_for(path), cred_for(path), disclose_for(path),
                                       presentation_context("psd", q.ts, "spectrum-query", w.bytes()), rng_,
                                       dir_.cfg.anonymity);
    w.var(dac::encode_presentation(p));
    return pad_to_budget(MessageType::SpectrumRequest, w.take());
}

SpectrumGrant Client::accept_spectrum_response(ByteView response) {
    expect_ok(response);
    ByteReader r(response.subspan(1));
    SpectrumGrant g;
    Bytes rec;
    if (!r.var(g.puzzle_bytes) || !r.var(g.puzzle_sig) || !r.raw(kRecordBytes, rec)) {
        throw ProtocolError(Reject::Malformed, "spectrum response");
    }
    auto puzzle = Puzzle::decode(g.puzzle_bytes);
    auto record = decode_record(rec);
    if (!puzzle || !record) throw ProtocolError(Reject::Malformed, "spectrum response");
    g.puzzle = std::move(*puzzle);
    g.record = std::move(*record);
    return g;
}

Bytes Client::service_request(ByteView m, const SpectrumGrant& grant, PolPath path, std::uint64_t* squarings) {
    if (m.size() > kMaxServiceMessage) throw std::invalid_argument("service message longer than 64 bytes");
    const auto sol = vdf::vdf_eval(grant.puzzle.params, grant.puzzle.challenge_for(m), squarings);
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(path)).var(m).var(grant.puzzle_bytes).var(grant.puzzle_sig);
    w.var(vdf::encode_solution(grant.puzzle.params, sol));
    if (path == PolPath::AccessPoint) {
        if (!phi_) throw std::logic_error("client: no proof of location");
        w.var(phi_->encode(dir_.rlrs));
    }
    const auto p = dac::dac_cred_prove(dir_.registry, key_for(path), nym_for(path), cred_for(path), {},
                                       presentation_context("server", grant.puzzle.ts, "service", w.bytes()), rng_,
                                       dir_.cfg.anonymity);
    w.var(dac::encode_presentation(p));
    return pad_to_budget(MessageType::ServiceRequest, w.take());
}

ServiceGrant Client::accept_service_response(ByteView response) {
    expect_ok(response);
    ByteReader r(response.subspan(1));
    ServiceGrant g;
    if (!r.raw(16, g.grant_id) || !r.u64(g.valid_until_ms)) throw ProtocolError(Reject::Malformed, "service response");
    return g;
}

}  // namespace slapx::protocol
