#include <bit>
#include <cmath>

#include "internal.hpp"
#include "slapx/crypto/hash.hpp"

namespace slapx::protocol {

std::uint64_t window_of(const ProtocolConfig& cfg, std::uint64_t now_ms) { return now_ms / 1000 / cfg.window_s; }

namespace detail {

Bytes session_nonce(ByteView client_nonce, ByteView nd_nonce) {
    Bytes out(client_nonce.begin(), client_nonce.end());
    out.insert(out.end(), nd_nonce.begin(), nd_nonce.end());
    return out;
}

dbp::BitString dbp_public_bits(ByteView client_nonce, ByteView nd_nonce, int n) {
    const auto seed = crypto::sha256(session_nonce(client_nonce, nd_nonce));
    const auto len = static_cast<std::size_t>(2 * n);
    return dbp::unpack_bits(crypto::expand(seed, "slapx/dbp/m", (len + 7) / 8), len);
}

void write_cred_request(ByteWriter& w, const dac::CredRequest& req) {
    w.raw(req.pk.to_bytes()).raw(req.pok.c.to_bytes()).raw(req.pok.z.to_bytes());
}

std::optional<dac::CredRequest> read_cred_request(const crypto::Group& g, ByteReader& r) {
    Bytes pk, c, z;
    if (!r.raw(g.element_size(), pk) || !r.raw(g.scalar_size(), c) || !r.raw(g.scalar_size(), z)) return std::nullopt;
    try {
        return dac::CredRequest{g.element_from_bytes(pk), {g.scalar_from_bytes(c), g.scalar_from_bytes(z)}, {}};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void write_attributes(ByteWriter& w, const dac::AttributeSet& attrs) {
    w.u8(static_cast<std::uint8_t>(attrs.size()));
    for (const auto& a : attrs) w.u8(static_cast<std::uint8_t>(a.kind)).raw(a.value);
}

std::optional<dac::AttributeSet> read_attributes(ByteReader& r) {
    std::uint8_t n = 0;
    if (!r.u8(n)) return std::nullopt;
    dac::AttributeSet out;
    for (int i = 0; i < n; ++i) {
        std::uint8_t kind = 0;
        if (!r.u8(kind)) return std::nullopt;
        dac::Attribute a{static_cast<dac::AttrKind>(kind), {}};
        try {
            if (!r.raw(dac::attribute_width(a.kind), a.value)) return std::nullopt;
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::optional<dac::Presentation> read_presentation(const dac::DacParams& pp, ByteReader& r) {
    Bytes b;
    if (!r.var(b)) return std::nullopt;
    return dac::decode_presentation(pp, b);
}

}  // namespace detail

using detail::ByteReader;
using detail::ByteWriter;

Reject response_status(ByteView response) {
    if (response.empty() || response[0] >= kRejectCount) return Reject::Malformed;
    return static_cast<Reject>(response[0]);
}

// Authority

Authority::Authority(ProtocolConfig cfg, std::uint64_t seed)
    : rng_(seed),
      root_(dac::dac_setup(cfg.security_bits, cfg.dac_slots, 2, rng_)),
      issuer_(rlrs::RlrsIssuer::setup(cfg.security_bits, cfg.rlrs_t_max, rng_)),
      dir_(std::make_unique<Directory>(std::move(cfg), root_.pp, issuer_.params())) {}

dac::Credential Authority::enroll(const dac::UserKey& key, const dac::AttributeSet& attrs, int max_level) {
    const auto pending = dac::dac_cred_request(root_.pp, key, max_level > 1, rng_);
    const auto issued = dac::dac_create_cred(root_, dir_->registry, pending.request, attrs, max_level, rng_);
    return dac::dac_get_cred(dir_->registry, key, attrs, pending, issued);
}

rlrs::RlrsUserKey Authority::enroll_ap(const std::string& id) {
    auto key = issuer_.extract(id);
    dir_->rlrs = issuer_.params();
    return key;
}

std::optional<std::string> Authority::revoke(const LocationProof& a, const LocationProof& b) const {
    if (a.event().encode() != b.event().encode()) return std::nullopt;
    return issuer_.revoke(a.event(), a.signed_message(), b.signed_message());
}

// Access point (Alg. 1)

AccessPoint::AccessPoint(const Directory& dir, rlrs::RlrsUserKey key, rlrs::Ring ring, double x, double y,
                         std::uint64_t seed)
    : dir_(dir),
      key_(std::move(key)),
      ring_(std::move(ring)),
      x_(x),
      y_(y),
      beacon_key_(crypto::SeededRng(seed).fork("beacon").bytes(32)),
      rng_(crypto::SeededRng(seed).fork("ap")) {}

Beacon AccessPoint::beacon(std::uint64_t ts) const {
    const auto d = crypto::Transcript("slapx/beacon").absorb(beacon_key_).absorb(key_.id).absorb_u64(ts).finish();
    return {key_.id, ts, Bytes(d.begin(), d.begin() + kNonceBytes)};
}

Bytes AccessPoint::respond(ByteView request, const Measurement& meas, std::uint64_t now_ms) {
    const auto& cfg = dir_.cfg;
    const auto fail = [](Reject r) { return detail::reject_payload(MessageType::PolResponse, r); };
    const std::uint64_t ts = window_of(cfg, now_ms);

    ByteReader r(request);
    auto claim = LocationClaim::decode(r);
    if (!claim) return fail(Reject::Malformed);
    auto p = detail::read_presentation(dir_.registry.params(), r);
    if (!p) return fail(Reject::Malformed);

    if (claim->ts != ts || !(claim->beacon == beacon(ts))) return fail(Reject::StaleBeacon);
    const Bytes event = claim->event().encode();
    if (enforce_unique_) {
        // Repeat events are turned away before any verification work.
        std::lock_guard lk(mu_);
        const auto it = issued_.find(ts);
        if (it != issued_.end() && it->second.contains(event)) return fail(Reject::AlreadyIssued);
    }
    const Bytes claim_bytes = claim->encode();
    if (!dac::dac_cred_verify(dir_.registry, *p, presentation_context("ap", ts, "pol-ap", claim_bytes))) {
        return fail(Reject::CredentialInvalid);
    }
    const auto est = prox_verify(meas.rss_dbm, meas.rtt_s, cfg.radio, cfg.rtt_weight);
    const double claimed = std::hypot(claim->lx - x_, claim->ly - y_);
    if (!within_proximity(est, cfg.proximity_m) || claimed > cfg.proximity_m) return fail(Reject::OutsideProximity);

    {
        std::lock_guard lk(mu_);
        std::erase_if(issued_, [&](const auto& kv) { return kv.first + 1 < ts; });
        if (!issued_[ts].insert(event).second && enforce_unique_) return fail(Reject::AlreadyIssued);
    }

    LocationProof phi{std::move(*claim), p->nym, p->commitment, ring_, {dir_.rlrs.group.scalar(0), {}, p->nym}};
    phi.sig = rlrs::rlrs_sign(dir_.rlrs, key_, phi.message(), ring_, phi.event(), rng_);
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(Reject::Ok)).raw(phi.encode(dir_.rlrs));
    return pad_to_budget(MessageType::PolResponse, w.take());
}

// Neighbor device (Alg. 2)

NeighborDevice::NeighborDevice(Directory& dir, dac::UserKey key, dac::Credential cred, double x, double y,
                               std::uint64_t seed)
    : dir_(dir), key_(std::move(key)), cred_(std::move(cred)), x_(x), y_(y), rng_(seed) {}

Bytes NeighborDevice::respond(ByteView request, std::uint64_t now_ms, DbpProver& prover) {
    const auto& cfg = dir_.cfg;
    const auto& pp = dir_.registry.params();
    const auto& g = pp.group;
    const auto fail = [](Reject r) { return detail::reject_payload(MessageType::NdResponse, r); };
    transcript_.clear();

    ByteReader r(request);
    std::uint64_t bits_x = 0, bits_y = 0, ts = 0;
    Bytes eph_pk_b, nonce_c;
    if (!r.u64(bits_x) || !r.u64(bits_y) || !r.u64(ts) || !r.raw(g.element_size(), eph_pk_b) ||
        !r.raw(kNonceBytes, nonce_c)) {
        return fail(Reject::Malformed);
    }
    auto req = detail::read_cred_request(g, r);
    if (!req) return fail(Reject::Malformed);
    const std::size_t fields_end = r.position();
    auto p = detail::read_presentation(pp, r);
    if (!p) return fail(Reject::Malformed);
    const double lx = std::bit_cast<double>(bits_x);
    const double ly = std::bit_cast<double>(bits_y);
    if (!std::isfinite(lx) || !std::isfinite(ly)) return fail(Reject::Malformed);
    std::optional<crypto::GroupElement> eph_pk;
    try {
        eph_pk = g.element_from_bytes(eph_pk_b);
    } catch (const std::exception&) {
        return fail(Reject::Malformed);
    }

    if (ts != window_of(cfg, now_ms)) return fail(Reject::Expired);
    const auto ctx = presentation_context("nd", ts, "pol-nd", request.first(fields_end));
    if (!dac::dac_cred_verify(dir_.registry, *p, ctx)) return fail(Reject::CredentialInvalid);
    if (!dbp::within_threshold(x_, y_, lx, ly, cfg.dbp.th_m)) return fail(Reject::OutsideProximity);

    // AKA, then the timed exchange.
    const auto eph = dbp::dbp_keygen(g, rng_);
    const Bytes nonce_nd = rng_.bytes(kNonceBytes);
    prover.setup(eph.pk, nonce_nd);
    dbp::BitString ss;
    try {
        ss = dbp::dbp_aka(eph, *eph_pk, detail::session_nonce(nonce_c, nonce_nd), cfg.dbp.n);
    } catch (const std::invalid_argument&) {
        return fail(Reject::Malformed);
    }
    const auto a = dbp::dbp_response_table(ss, detail::dbp_public_bits(nonce_c, nonce_nd, cfg.dbp.n));
    for (int i = 1; i <= cfg.dbp.n; ++i) {
        const auto c = static_cast<std::uint8_t>(rng_.uniform(2));
        transcript_.push_back(prover.round(i, c));
    }
    if (!dbp::dbp_verify(cfg.dbp, a, transcript_)) return fail(Reject::DbpFailed);

    // Terminal delegation of A_l = ((lx, ly), TS).
    const dac::AttributeSet a_l{dac::attr_location(lx, ly), dac::attr_timestamp(ts)};
    dac::IssuedCred issued{0, g.scalar(0)};
    try {
        issued = dac::dac_issue_cred(dir_.registry, cred_, a_l, *req, cred_.level + 1, true, rng_);
    } catch (const std::invalid_argument&) {
        return fail(Reject::DelegationFailed);
    }
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(Reject::Ok));
    const auto entry = dir_.registry.get(issued.registry_index);
    const dac::Credential issued_cred{entry.level, entry.max_level, {}, entry.commitment, issued.rho, std::nullopt,
                                      issued.registry_index};
    w.raw(dac::encode_credential(dir_.registry, issued_cred));
    detail::write_attributes(w, cred_.attrs);
    return pad_to_budget(MessageType::NdResponse, w.take());
}

}  // namespace slapx::protocol
