#include "slapx/protocol/messages.hpp"

#include <bit>
#include <cmath>

#include "slapx/crypto/hash.hpp"

namespace slapx::protocol {

namespace {

using crypto::ByteReader;
using crypto::ByteWriter;

constexpr std::size_t kIdBytes = 16;

void put_f64(ByteWriter& w, double v) {
    if (v == 0.0) v = 0.0;
    w.u64(std::bit_cast<std::uint64_t>(v));
}

bool get_f64(ByteReader& r, double& v) {
    std::uint64_t u = 0;
    if (!r.u64(u)) return false;
    v = std::bit_cast<double>(u);
    return std::isfinite(v);
}

std::optional<crypto::GroupElement> get_element(const crypto::Group& g, ByteReader& r) {
    Bytes b;
    if (!r.raw(g.element_size(), b)) return std::nullopt;
    try {
        return g.element_from_bytes(b);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

Bytes Beacon::encode() const {
    if (ap_id.size() > kIdBytes || nonce.size() != kNonceBytes) throw std::invalid_argument("beacon: bad field size");
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(ap_id.data()), ap_id.size())).zeros(kIdBytes - ap_id.size());
    w.u64(ts).raw(nonce);
    return w.take();
}

std::optional<Beacon> Beacon::decode(ByteReader& r) {
    Bytes id;
    Beacon b;
    if (!r.raw(kIdBytes, id) || !r.u64(b.ts) || !r.raw(kNonceBytes, b.nonce)) return std::nullopt;
    std::size_t n = id.size();
    while (n > 0 && id[n - 1] == 0) --n;
    b.ap_id.assign(id.begin(), id.begin() + static_cast<std::ptrdiff_t>(n));
    return b;
}

Bytes LocationClaim::encode() const {
    ByteWriter w;
    w.raw(beacon.encode());
    put_f64(w, lx);
    put_f64(w, ly);
    w.u64(ts);
    return w.take();
}

std::optional<LocationClaim> LocationClaim::decode(ByteReader& r) {
    auto b = Beacon::decode(r);
    if (!b) return std::nullopt;
    LocationClaim c;
    c.beacon = std::move(*b);
    if (!get_f64(r, c.lx) || !get_f64(r, c.ly) || !r.u64(c.ts)) return std::nullopt;
    return c;
}

Bytes LocationProof::message() const {
    ByteWriter w;
    w.raw(claim.encode()).raw(nym.to_bytes()).raw(cred_ref.to_bytes());
    return w.take();
}

bool LocationProof::verify(const rlrs::RlrsPublicParams& pp) const {
    return rlrs::rlrs_verify(pp, ring, message(), event(), sig);
}

Bytes LocationProof::encode(const rlrs::RlrsPublicParams& pp) const {
    ByteWriter w;
    w.raw(message());
    if (ring.empty() || ring.size() > 255) throw std::invalid_argument("location proof: bad ring size");
    w.u8(static_cast<std::uint8_t>(ring.size()));
    for (const auto& id : ring) {
        if (id.size() > 255) throw std::invalid_argument("location proof: ring id too long");
        w.u8(static_cast<std::uint8_t>(id.size()));
        w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(id.data()), id.size()));
    }
    w.raw(rlrs::encode_signature(pp, sig));
    return w.take();
}

std::optional<LocationProof> LocationProof::decode(const rlrs::RlrsPublicParams& pp, ByteReader& r) {
    auto claim = LocationClaim::decode(r);
    if (!claim) return std::nullopt;
    auto nym = get_element(pp.group, r);
    auto cref = get_element(pp.group, r);
    std::uint8_t n = 0;
    if (!nym || !cref || !r.u8(n) || n == 0) return std::nullopt;
    rlrs::Ring ring;
    for (int i = 0; i < n; ++i) {
        std::uint8_t len = 0;
        Bytes id;
        if (!r.u8(len) || !r.raw(len, id)) return std::nullopt;
        ring.emplace_back(id.begin(), id.end());
    }
    Bytes sigb;
    if (!r.raw(rlrs::kSignatureBytes, sigb)) return std::nullopt;
    auto sig = rlrs::decode_signature(pp, sigb);
    if (!sig) return std::nullopt;
    return LocationProof{std::move(*claim), std::move(*nym), std::move(*cref), std::move(ring), std::move(*sig)};
}

Bytes SpectrumQuery::encode() const {
    ByteWriter w;
    put_f64(w, lx);
    put_f64(w, ly);
    w.u16(channel).u32(validity_s).u64(ts);
    return w.take();
}

std::optional<SpectrumQuery> SpectrumQuery::decode(ByteReader& r) {
    SpectrumQuery q;
    if (!get_f64(r, q.lx) || !get_f64(r, q.ly) || !r.u16(q.channel) || !r.u32(q.validity_s) || !r.u64(q.ts)) {
        return std::nullopt;
    }
    return q;
}

Bytes Puzzle::encode() const {
    ByteWriter w;
    w.var(vdf::encode_puzzle_body(params, {nonce, params.kappa}));
    w.u64(issued_ms).u64(ts).raw(binding);
    return w.take();
}

std::optional<Puzzle> Puzzle::decode(ByteView in) {
    ByteReader r(in);
    Bytes body, bind;
    Puzzle p;
    if (!r.var(body) || !r.u64(p.issued_ms) || !r.u64(p.ts) || !r.raw(p.binding.size(), bind) || !r.done()) {
        return std::nullopt;
    }
    auto pc = vdf::decode_puzzle_body(body);
    if (!pc || pc->second.tau != pc->first.kappa || pc->second.m.size() != kNonceBytes) return std::nullopt;
    p.params = std::move(pc->first);
    p.nonce = std::move(pc->second.m);
    std::copy(bind.begin(), bind.end(), p.binding.begin());
    return p;
}

vdf::VdfChallenge Puzzle::challenge_for(ByteView m) const {
    const auto d = crypto::Transcript("slapx/service/challenge").absorb(nonce).absorb(m).finish();
    return {Bytes(d.begin(), d.end()), params.kappa};
}

crypto::Digest nym_binding(const crypto::GroupElement& nym) {
    return crypto::Transcript("slapx/puzzle/binding").absorb(nym.to_bytes()).finish();
}

Bytes presentation_context(std::string_view verifier, std::uint64_t ts, std::string_view request_type,
                           ByteView fields) {
    const auto d = crypto::Transcript("slapx/context")
                       .absorb(verifier)
                       .absorb_u64(ts)
                       .absorb(request_type)
                       .absorb(fields)
                       .finish();
    return Bytes(d.begin(), d.end());
}

}  // namespace slapx::protocol
