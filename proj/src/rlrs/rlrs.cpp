#include "slapx/rlrs/rlrs.hpp"

#include <bit>
#include <mutex>
#include <set>
#include <stdexcept>

#include "slapx/crypto/codec.hpp"

namespace slapx::rlrs {

using crypto::GroupElement;
using crypto::Scalar;

namespace {

void check_ring(const RlrsPublicParams& pp, const Ring& ring) {
    if (ring.empty()) throw std::invalid_argument("rlrs: empty ring");
    if (static_cast<int>(ring.size()) > pp.t_max) throw std::invalid_argument("rlrs: ring larger than t_max");
    std::set<std::string> seen;
    for (const auto& id : ring) {
        if (!seen.insert(id).second) throw std::invalid_argument("rlrs: duplicate ring member " + id);
        if (!pp.keys.contains(id)) throw std::invalid_argument("rlrs: unknown ring member " + id);
    }
}

// Shared prefix of every ring hash: ring keys, event, message and tag.
crypto::Transcript base_transcript(const RlrsPublicParams& pp, const Ring& ring, ByteView m, const Bytes& event,
                                   const GroupElement& tau) {
    crypto::Transcript t("slapx/rlrs/ring");
    t.absorb_u64(ring.size());
    for (const auto& id : ring) t.absorb(id).absorb(pp.keys.at(id).to_bytes());
    t.absorb(event).absorb(m).absorb(tau.to_bytes());
    return t;
}

Scalar ring_hash(const crypto::Group& group, const crypto::Transcript& base, const GroupElement& l,
                 const GroupElement& r) {
    crypto::Transcript t(base);
    t.absorb(l.to_bytes()).absorb(r.to_bytes());
    return group.hash_to_scalar(t);
}

}  // namespace

Bytes EventId::encode() const {
    crypto::ByteWriter w;
    // -0.0 and 0.0 name the same location.
    w.u64(std::bit_cast<std::uint64_t>(lx == 0.0 ? 0.0 : lx));
    w.u64(std::bit_cast<std::uint64_t>(ly == 0.0 ? 0.0 : ly));
    w.u64(ts);
    w.raw(crypto::sha256(beacon));
    return w.take();
}

int max_ring_size(const crypto::Group& group) {
    const std::size_t fixed = group.element_size() + 1 + group.scalar_size();
    return static_cast<int>((kSignatureBytes - fixed) / group.scalar_size());
}

RlrsIssuer RlrsIssuer::setup(int security_bits, int t_max, crypto::SeededRng& rng) {
    crypto::Group group = crypto::Group::setup(security_bits);
    if (t_max < 1) throw std::invalid_argument("rlrs_setup: t_max must be >= 1");
    if (t_max > max_ring_size(group)) {
        throw std::invalid_argument("rlrs_setup: t_max " + std::to_string(t_max) + " exceeds the " +
                                    std::to_string(kSignatureBytes) + "-byte signature budget (max " +
                                    std::to_string(max_ring_size(group)) + ")");
    }
    return RlrsIssuer(rng.bytes(32), RlrsPublicParams{std::move(group), t_max, {}});
}

RlrsIssuer::RlrsIssuer(const RlrsIssuer& other) : msk_(other.msk_), params_(other.params_) {
    std::shared_lock lock(other.mu_);
    registry_ = other.registry_;
}

RlrsIssuer::RlrsIssuer(RlrsIssuer&& other) noexcept
    : msk_(std::move(other.msk_)), params_(std::move(other.params_)), registry_(std::move(other.registry_)) {}

Scalar RlrsIssuer::secret_for(const std::string& id) const {
    crypto::Transcript t("slapx/rlrs/extract");
    t.absorb(msk_).absorb(id);
    Scalar s = params_.group.hash_to_scalar(t);
    if (s.is_zero()) throw std::runtime_error("rlrs_extract: degenerate key");
    return s;
}

RlrsUserKey RlrsIssuer::extract(const std::string& id) {
    if (id.empty()) throw std::invalid_argument("rlrs_extract: empty identity");
    Scalar s = secret_for(id);
    params_.keys.insert_or_assign(id, params_.group.generator() * s);
    return RlrsUserKey{id, std::move(s)};
}

std::optional<std::string> RlrsIssuer::revoke(const EventId& event, const SignedMessage& a,
                                              const SignedMessage& b) const {
    bool linked = false;
    try {
        linked = rlrs_link(params_, event, a, b);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    if (!linked) return std::nullopt;
    const Bytes ev = event.encode();
    const GroupElement base = event_base(params_.group, event);
    const std::set<std::string> other(b.ring.begin(), b.ring.end());
    for (const auto& id : a.ring) {
        if (!other.contains(id)) continue;
        const auto key = std::make_pair(ev, id);
        std::optional<GroupElement> tag;
        {
            std::shared_lock lock(mu_);
            if (auto it = registry_.find(key); it != registry_.end()) tag = it->second;
        }
        if (!tag) {
            tag = base * secret_for(id);
            std::unique_lock lock(mu_);
            registry_.emplace(key, *tag);
        }
        if (*tag == a.sig.tau) return id;
    }
    return std::nullopt;
}

GroupElement event_base(const crypto::Group& group, const EventId& event) {
    return group.hash_to_element("slapx/rlrs/event", event.encode());
}

RlrsSignature rlrs_sign(const RlrsPublicParams& pp, const RlrsUserKey& key, ByteView m, const Ring& ring,
                        const EventId& event, crypto::SeededRng& rng) {
    check_ring(pp, ring);
    std::size_t pi = ring.size();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (ring[i] == key.id) pi = i;
    }
    if (pi == ring.size()) throw std::invalid_argument("rlrs_sign: signer not in ring");
    if (!(pp.keys.at(key.id) == pp.group.generator() * key.s)) {
        throw std::invalid_argument("rlrs_sign: key does not match directory");
    }

    const auto& g = pp.group;
    const std::size_t n = ring.size();
    const Bytes ev = event.encode();
    const GroupElement h = event_base(g, event);
    GroupElement tau = h * key.s;
    const crypto::Transcript base = base_transcript(pp, ring, m, ev, tau);

    std::vector<std::optional<Scalar>> c(n);
    std::vector<std::optional<Scalar>> s(n);
    const Scalar alpha = g.random_scalar(rng);
    c[(pi + 1) % n] = ring_hash(g, base, g.generator() * alpha, h * alpha);
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t i = (pi + k) % n;
        s[i] = g.random_scalar(rng);
        const GroupElement l = g.mul_gen_add(*s[i], pp.keys.at(ring[i]), *c[i]);
        const GroupElement r = h * *s[i] + tau * *c[i];
        c[(i + 1) % n] = ring_hash(g, base, l, r);
    }
    s[pi] = alpha - *c[pi] * key.s;

    std::vector<Scalar> responses;
    responses.reserve(n);
    for (auto& v : s) responses.push_back(std::move(*v));
    return RlrsSignature{std::move(*c[0]), std::move(responses), std::move(tau)};
}

bool rlrs_verify(const RlrsPublicParams& pp, const Ring& ring, ByteView m, const EventId& event,
                 const RlrsSignature& sig) {
    try {
        check_ring(pp, ring);
    } catch (const std::invalid_argument&) {
        return false;
    }
    if (sig.responses.size() != ring.size() || sig.tau.is_identity()) return false;
    const auto& g = pp.group;
    const GroupElement h = event_base(g, event);
    const crypto::Transcript base = base_transcript(pp, ring, m, event.encode(), sig.tau);
    Scalar c = sig.c0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const GroupElement l = g.mul_gen_add(sig.responses[i], pp.keys.at(ring[i]), c);
        const GroupElement r = h * sig.responses[i] + sig.tau * c;
        c = ring_hash(g, base, l, r);
    }
    return c == sig.c0;
}

bool rlrs_link(const RlrsPublicParams& pp, const EventId& event, const SignedMessage& a, const SignedMessage& b) {
    if (!rlrs_verify(pp, a.ring, a.m, event, a.sig) || !rlrs_verify(pp, b.ring, b.m, event, b.sig)) {
        throw std::invalid_argument("rlrs_link: unverified signature");
    }
    return a.sig.tau == b.sig.tau;
}

Bytes encode_signature(const RlrsPublicParams& pp, const RlrsSignature& sig) {
    if (static_cast<int>(sig.responses.size()) > max_ring_size(pp.group)) {
        throw std::invalid_argument("rlrs: signature too large to encode");
    }
    crypto::ByteWriter w;
    w.raw(sig.tau.to_bytes()).u8(static_cast<std::uint8_t>(sig.responses.size())).raw(sig.c0.to_bytes());
    for (const auto& s : sig.responses) w.raw(s.to_bytes());
    w.zeros(kSignatureBytes - w.size());
    return w.take();
}

std::optional<RlrsSignature> decode_signature(const RlrsPublicParams& pp, ByteView in) {
    if (in.size() != kSignatureBytes) return std::nullopt;
    const auto& g = pp.group;
    crypto::ByteReader r(in);
    Bytes tau_b, c0_b;
    std::uint8_t n = 0;
    if (!r.raw(g.element_size(), tau_b) || !r.u8(n) || !r.raw(g.scalar_size(), c0_b)) return std::nullopt;
    if (n == 0 || n > max_ring_size(g)) return std::nullopt;
    try {
        GroupElement tau = g.element_from_bytes(tau_b);
        Scalar c0 = g.scalar_from_bytes(c0_b);
        std::vector<Scalar> responses;
        for (int i = 0; i < n; ++i) {
            Bytes s;
            if (!r.raw(g.scalar_size(), s)) return std::nullopt;
            responses.push_back(g.scalar_from_bytes(s));
        }
        Bytes pad;
        r.raw(r.remaining(), pad);
        for (auto b : pad) {
            if (b != 0) return std::nullopt;
        }
        return RlrsSignature{std::move(c0), std::move(responses), std::move(tau)};
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace slapx::rlrs
