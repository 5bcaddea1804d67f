#include <algorithm>
#include <stdexcept>

#include "internal.hpp"
#include "slapx/crypto/hash.hpp"

namespace slapx::protocol {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

std::optional<PolPath> read_path(ByteReader& r) {
    std::uint8_t p = 0;
    if (!r.u8(p) || (p != 1 && p != 2)) return std::nullopt;
    return static_cast<PolPath>(p);
}

bool same_point(double ax, double ay, double bx, double by) { return ax == bx && ay == by; }

}  // namespace

// PSD (Alg. 3 part 2)

Psd::Psd(const Directory& dir, SpectrumDb db, ModulusSource moduli, std::uint64_t seed)
    : dir_(dir),
      db_(std::move(db)),
      moduli_(std::move(moduli)),
      rng_(crypto::SeededRng(seed).fork("psd")),
      sgn_(crypto::sgn_keygen(dir.registry.params().group, rng_)) {}

vdf::DeviceClass Psd::classify(const dac::Presentation& p) const {
    const auto& cfg = dir_.cfg;
    if (const auto* t = p.find(dac::AttrKind::DeviceType)) {
        if (std::ranges::find(cfg.flagged_device_types, t->value[0]) != cfg.flagged_device_types.end()) {
            return vdf::DeviceClass::Flagged;
        }
    }
    if (const auto* tx = p.find(dac::AttrKind::TxPower); tx && dac::tx_power_of(*tx) > cfg.high_power_dbm) {
        return vdf::DeviceClass::HighPower;
    }
    return vdf::DeviceClass::Default;
}

std::size_t Psd::tracked_tags() const {
    std::lock_guard lk(mu_);
    std::size_t n = 0;
    for (const auto& [w, s] : tags_) n += s.size();
    return n;
}

Bytes Psd::respond(ByteView request, std::uint64_t now_ms) {
    Bytes out;
    const Reject r = check(request, now_ms, out);
    if (r != Reject::Ok) return detail::reject_payload(MessageType::SpectrumResponse, r);
    return pad_to_budget(MessageType::SpectrumResponse, std::move(out));
}

Reject Psd::check(ByteView request, std::uint64_t now_ms, Bytes& out) {
    const auto& cfg = dir_.cfg;
    const auto& pp = dir_.registry.params();

    ByteReader r(request);
    const auto path = read_path(r);
    const auto q = path ? SpectrumQuery::decode(r) : std::nullopt;
    if (!q) return Reject::Malformed;
    std::optional<LocationProof> phi;
    if (*path == PolPath::AccessPoint) {
        Bytes pb;
        if (!r.var(pb)) return Reject::Malformed;
        ByteReader pr(pb);
        phi = LocationProof::decode(dir_.rlrs, pr);
        if (!phi || !pr.done()) return Reject::Malformed;
    }
    const std::size_t fields_end = r.position();
    const auto p = detail::read_presentation(pp, r);
    if (!p) return Reject::Malformed;

    if (!dac::dac_cred_verify(dir_.registry, *p, presentation_context("psd", q->ts, "spectrum-query",
                                                                        request.first(fields_end)))) {
        return Reject::CredentialInvalid;
    }
    if (q->ts != window_of(cfg, now_ms)) return Reject::Expired;

    DeviceProfile device;
    Bytes tag;
    std::uint64_t proof_ts = 0;
    if (phi) {
        if (!phi->verify(dir_.rlrs)) return Reject::PolInvalid;
        proof_ts = phi->claim.ts;
        if (detail::expired(cfg, proof_ts, now_ms)) return Reject::Expired;
        tag = phi->sig.tau.to_bytes();
        {
            std::lock_guard lk(mu_);
            const auto it = tags_.find(proof_ts);
            if (it != tags_.end() && it->second.contains(tag)) return Reject::Linked;
        }
        if (!(phi->nym == p->nym) || !same_point(phi->claim.lx, phi->claim.ly, q->lx, q->ly)) {
            return Reject::BindingMismatch;
        }
        if (const auto* tx = p->find(dac::AttrKind::TxPower)) device.tx_power_dbm = dac::tx_power_of(*tx);
        if (const auto* t = p->find(dac::AttrKind::DeviceType)) device.device_type = t->value[0];
    } else {
        const auto* loc = p->find(dac::AttrKind::Location);
        const auto* ts = p->find(dac::AttrKind::Timestamp);
        if (p->level != 2 || !loc || !ts) return Reject::CredentialInvalid;
        proof_ts = dac::timestamp_of(*ts);
        if (detail::expired(cfg, proof_ts, now_ms)) return Reject::Expired;
        const auto [lx, ly] = dac::location_of(*loc);
        if (!same_point(lx, ly, q->lx, q->ly)) return Reject::BindingMismatch;
    }

    SpectrumRecord record;
    try {
        record = db_.lookup(q->lx, q->ly, device);
    } catch (const ProtocolError& e) {
        return e.code();
    }

    Puzzle puzzle{vdf::vdf_params(moduli_(), cfg.difficulty.kappa_for(classify(*p))), {}, now_ms,
                  window_of(cfg, now_ms), nym_binding(p->nym)};
    {
        std::lock_guard lk(mu_);
        puzzle.nonce = rng_.bytes(kNonceBytes);
        if (phi) {
            const std::uint64_t keep = (cfg.validity_s + cfg.window_s - 1) / cfg.window_s;
            std::erase_if(tags_, [&](const auto& kv) { return kv.first + keep < puzzle.ts; });
            if (!tags_[proof_ts].insert(tag).second) return Reject::Linked;
        }
    }
    const Bytes pbytes = puzzle.encode();
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(Reject::Ok));
    w.var(pbytes).var(crypto::sgn_sign(pp.group, sgn_, pbytes)).raw(encode_record(record));
    out = w.take();
    return Reject::Ok;
}

// Service server (Alg. 3 part 4)

ServiceServer::ServiceServer(const Directory& dir, crypto::GroupElement psd_pk) : dir_(dir), psd_pk_(std::move(psd_pk)) {}

std::vector<ServiceServer::GrantRecord> ServiceServer::grants() const {
    std::lock_guard lk(mu_);
    return grants_;
}

Bytes ServiceServer::respond(ByteView request, std::uint64_t now_ms) {
    GrantRecord rec;
    const Reject r = check(request, now_ms, rec);
    if (r != Reject::Ok) return detail::reject_payload(MessageType::ServiceResponse, r);
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(Reject::Ok)).raw(rec.grant_id).u64(now_ms + dir_.cfg.validity_s * 1000);
    return pad_to_budget(MessageType::ServiceResponse, w.take());
}

Reject ServiceServer::check(ByteView request, std::uint64_t now_ms, GrantRecord& rec) {
    const auto& cfg = dir_.cfg;
    const auto& pp = dir_.registry.params();

    ByteReader r(request);
    const auto path = read_path(r);
    Bytes m, pbytes, sig, solb;
    if (!path || !r.var(m) || !r.var(pbytes) || !r.var(sig) || !r.var(solb)) return Reject::Malformed;
    std::optional<LocationProof> phi;
    if (*path == PolPath::AccessPoint) {
        Bytes b;
        if (!r.var(b)) return Reject::Malformed;
        ByteReader pr(b);
        phi = LocationProof::decode(dir_.rlrs, pr);
        if (!phi || !pr.done()) return Reject::Malformed;
    }
    const std::size_t fields_end = r.position();
    const auto p = detail::read_presentation(pp, r);
    if (!p) return Reject::Malformed;

    // Cheapest checks first.
    if (!crypto::sgn_verify(pp.group, psd_pk_, pbytes, sig)) return Reject::PuzzleSignatureInvalid;
    const auto puzzle = Puzzle::decode(pbytes);
    if (!puzzle) return Reject::Malformed;
    if (now_ms < puzzle->issued_ms || now_ms - puzzle->issued_ms > cfg.validity_s * 1000) return Reject::PuzzleExpired;
    {
        std::lock_guard lk(mu_);
        if (spent_.contains(puzzle->nonce)) return Reject::PuzzleReused;
    }
    const auto sol = vdf::decode_solution(solb);
    if (!sol || !vdf::vdf_verify(puzzle->params, puzzle->challenge_for(m), *sol)) return Reject::VdfInvalid;
    if (!dac::dac_cred_verify(dir_.registry, *p,
                              presentation_context("server", puzzle->ts, "service", request.first(fields_end)))) {
        return Reject::CredentialInvalid;
    }
    if (nym_binding(p->nym) != puzzle->binding) return Reject::BindingMismatch;
    if (phi) {
        if (!phi->verify(dir_.rlrs)) return Reject::PolInvalid;
        if (!(phi->nym == p->nym)) return Reject::BindingMismatch;
        if (detail::expired(cfg, phi->claim.ts, now_ms)) return Reject::Expired;
    } else if (p->level != 2) {
        return Reject::CredentialInvalid;
    }

    const auto id = crypto::Transcript("slapx/grant").absorb(puzzle->nonce).absorb(m).finish();
    rec = GrantRecord{Bytes(id.begin(), id.begin() + 16), puzzle->params.kappa, puzzle->ts, *path};
    std::lock_guard lk(mu_);
    if (!spent_.insert(puzzle->nonce).second) return Reject::PuzzleReused;
    grants_.push_back(rec);
    return Reject::Ok;
}

}  // namespace slapx::protocol
