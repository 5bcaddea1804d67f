#include "slapx/dac/dac.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

#include "slapx/crypto/codec.hpp"

namespace slapx::dac {

using crypto::ByteReader;
using crypto::ByteWriter;

namespace {

Scalar attribute_scalar(const crypto::Group& g, const Attribute& a) {
    crypto::Transcript t("slapx/dac/attr");
    t.absorb_u64(static_cast<std::uint64_t>(a.kind)).absorb(a.value);
    return g.hash_to_scalar(t);
}

void check_attribute(const Attribute& a) {
    if (a.value.size() != attribute_width(a.kind)) throw std::invalid_argument("dac: attribute has wrong width");
}

GroupElement commit(const DacParams& pp, const GroupElement& pk, const AttributeSet& attrs, const Scalar& rho) {
    GroupElement c = pk + pp.h0 * rho;
    for (std::size_t j = 0; j < attrs.size(); ++j) c = c + pp.h[j] * attribute_scalar(pp.group, attrs[j]);
    return c;
}

Bytes pok_message(const GroupElement& pk, const std::optional<GroupElement>& dk_pk) {
    ByteWriter w;
    w.raw(pk.to_bytes()).u8(dk_pk ? 1 : 0);
    if (dk_pk) w.raw(dk_pk->to_bytes());
    return w.take();
}

void check_request(const DacParams& pp, const CredRequest& req) {
    if (req.pk.is_identity()) throw std::invalid_argument("dac: identity user key");
    Bytes msg = pok_message(req.pk, req.dk_pk);
    if (!schnorr_verify(pp.group, req.pk, msg, req.pok)) throw std::invalid_argument("dac: bad key possession proof");
}

Credential finish_receive(const DacRegistry& registry, const UserKey& key, AttributeSet attrs,
                          const PendingCred& pending, const IssuedCred& issued) {
    const DacParams& pp = registry.params();
    const RegistryEntry e = registry.get(issued.registry_index);
    if (!(e.commitment == commit(pp, key.pk, attrs, issued.rho))) {
        throw std::invalid_argument("dac: issued commitment does not open to the requested attributes");
    }
    if (e.dk_pk.has_value() != pending.dk.has_value() || (e.dk_pk && !(*e.dk_pk == pending.dk->pk))) {
        throw std::invalid_argument("dac: registry entry has a different delegation key");
    }
    return Credential{e.level, e.max_level, std::move(attrs), e.commitment, issued.rho, pending.dk,
                      issued.registry_index};
}

// Fiat-Shamir challenge over the full presentation statement.
Scalar presentation_challenge(const DacRegistry& registry, const Presentation& p, ByteView context,
                              const std::vector<GroupElement>& ring_commitments, const GroupElement& t1,
                              const GroupElement& t2, const std::vector<GroupElement>& or_a) {
    const DacParams& pp = registry.params();
    crypto::Transcript t("slapx/dac/present");
    t.absorb(context).absorb(pp.root_pk.to_bytes());
    t.absorb_u64(p.level).absorb_u64(p.slot_count);
    t.absorb(p.nym.to_bytes()).absorb(p.commitment.to_bytes());
    t.absorb_u64(p.ring.size());
    for (std::size_t i = 0; i < p.ring.size(); ++i) t.absorb_u64(p.ring[i]).absorb(ring_commitments[i].to_bytes());
    t.absorb_u64(p.disclosed.size());
    for (const auto& d : p.disclosed) {
        t.absorb_u64(d.slot).absorb_u64(static_cast<std::uint64_t>(d.attr.kind)).absorb(d.attr.value);
    }
    t.absorb(t1.to_bytes()).absorb(t2.to_bytes());
    for (const auto& a : or_a) t.absorb(a.to_bytes());
    return pp.group.hash_to_scalar(t);
}

}  // namespace

std::size_t attribute_width(AttrKind kind) {
    switch (kind) {
        case AttrKind::DeviceId: return 16;
        case AttrKind::TxPower: return 2;
        case AttrKind::DeviceType: return 1;
        case AttrKind::Validity: return 16;
        case AttrKind::Location: return 16;
        case AttrKind::Timestamp: return 8;
        case AttrKind::ProofOfLocation: return 32;
        case AttrKind::Beacon: return 16;
    }
    throw std::invalid_argument("dac: unknown attribute kind");
}

Attribute attr_device_id(std::string_view id) {
    if (id.size() > 16) throw std::invalid_argument("dac: device id longer than 16 bytes");
    Bytes v(16, 0);
    std::copy(id.begin(), id.end(), v.begin());
    return {AttrKind::DeviceId, std::move(v)};
}

Attribute attr_tx_power(double dbm) {
    const auto deci = static_cast<std::int16_t>(std::lround(dbm * 10.0));
    return {AttrKind::TxPower, ByteWriter().u16(static_cast<std::uint16_t>(deci)).take()};
}

Attribute attr_device_type(std::uint8_t type) {
    return {AttrKind::DeviceType, Bytes{type}};
}

Attribute attr_validity(std::uint64_t not_before, std::uint64_t not_after) {
    return {AttrKind::Validity, ByteWriter().u64(not_before).u64(not_after).take()};
}

Attribute attr_location(double lx, double ly) {
    ByteWriter w;
    w.u64(std::bit_cast<std::uint64_t>(lx == 0.0 ? 0.0 : lx)).u64(std::bit_cast<std::uint64_t>(ly == 0.0 ? 0.0 : ly));
    return {AttrKind::Location, w.take()};
}

Attribute attr_timestamp(std::uint64_t ts) {
    return {AttrKind::Timestamp, ByteWriter().u64(ts).take()};
}

Attribute attr_proof_of_location(ByteView digest) {
    if (digest.size() != 32) throw std::invalid_argument("dac: proof-of-location digest must be 32 bytes");
    return {AttrKind::ProofOfLocation, Bytes(digest.begin(), digest.end())};
}

Attribute attr_beacon(ByteView nonce) {
    if (nonce.size() != 16) throw std::invalid_argument("dac: beacon nonce must be 16 bytes");
    return {AttrKind::Beacon, Bytes(nonce.begin(), nonce.end())};
}

double tx_power_of(const Attribute& a) {
    check_attribute(a);
    return static_cast<std::int16_t>((a.value[0] << 8) | a.value[1]) / 10.0;
}

std::pair<double, double> location_of(const Attribute& a) {
    check_attribute(a);
    ByteReader r(a.value);
    std::uint64_t x = 0, y = 0;
    r.u64(x);
    r.u64(y);
    return {std::bit_cast<double>(x), std::bit_cast<double>(y)};
}

std::uint64_t timestamp_of(const Attribute& a) {
    check_attribute(a);
    ByteReader r(a.value);
    std::uint64_t ts = 0;
    r.u64(ts);
    return ts;
}

SchnorrSig schnorr_sign(const crypto::Group& g, const Scalar& sk, ByteView msg, crypto::SeededRng& rng) {
    const Scalar r = g.random_scalar(rng);
    const GroupElement pk = g.generator() * sk;
    crypto::Transcript t("slapx/dac/schnorr");
    t.absorb(pk.to_bytes()).absorb(msg).absorb((g.generator() * r).to_bytes());
    Scalar c = g.hash_to_scalar(t);
    Scalar z = r + c * sk;
    return SchnorrSig{std::move(c), std::move(z)};
}

bool schnorr_verify(const crypto::Group& g, const GroupElement& pk, ByteView msg, const SchnorrSig& sig) {
    if (pk.is_identity()) return false;
    const GroupElement r = g.mul_gen_add(sig.z, pk, -sig.c);
    crypto::Transcript t("slapx/dac/schnorr");
    t.absorb(pk.to_bytes()).absorb(msg).absorb(r.to_bytes());
    return g.hash_to_scalar(t) == sig.c;
}

DacRoot dac_setup(int security_bits, int t, int eta, crypto::SeededRng& rng) {
    if (eta < 2) throw std::invalid_argument("dac_setup: delegation depth must exceed 1");
    if (t < 1) throw std::invalid_argument("dac_setup: attribute bound must be >= 1");
    if (eta > 255 || t > 255) throw std::invalid_argument("dac_setup: parameters exceed one byte");
    crypto::Group g = crypto::Group::setup(security_bits);
    std::vector<GroupElement> h;
    for (int j = 0; j < t; ++j) {
        h.push_back(g.hash_to_element("slapx/dac/h", ByteWriter().u32(static_cast<std::uint32_t>(j)).take()));
    }
    GroupElement h0 = g.hash_to_element("slapx/dac/h0", Bytes{});
    Scalar sk = g.random_scalar(rng);
    while (sk.is_zero()) sk = g.random_scalar(rng);
    GroupElement pk = g.generator() * sk;
    return DacRoot{DacParams{std::move(g), t, eta, std::move(h0), std::move(h), std::move(pk)}, std::move(sk)};
}

UserKey dac_keygen(const DacParams& pp, crypto::SeededRng& rng) {
    Scalar sk = pp.group.random_scalar(rng);
    while (sk.is_zero()) sk = pp.group.random_scalar(rng);
    GroupElement pk = pp.group.generator() * sk;
    return UserKey{std::move(sk), std::move(pk)};
}

Pseudonym dac_nymgen(const DacParams& pp, const UserKey& key, crypto::SeededRng& rng) {
    Scalar aux = pp.group.random_scalar(rng);
    GroupElement nym = pp.group.mul_gen_add(key.sk, pp.h0, aux);
    return Pseudonym{std::move(nym), std::move(aux)};
}

Bytes RegistryEntry::signed_bytes() const {
    ByteWriter w;
    w.u8(level).u8(max_level).u32(parent).raw(commitment.to_bytes()).u8(dk_pk ? 1 : 0);
    if (dk_pk) w.raw(dk_pk->to_bytes());
    return w.take();
}

std::uint32_t DacRegistry::add(RegistryEntry entry) {
    if (entry.level < 1 || entry.max_level < entry.level || entry.max_level > pp_.eta) {
        throw std::invalid_argument("dac registry: level out of range");
    }
    if (entry.dk_pk.has_value() != (entry.max_level > entry.level)) {
        throw std::invalid_argument("dac registry: delegation key must be present iff delegation is allowed");
    }
    std::unique_lock lock(mu_);
    GroupElement issuer_pk = pp_.root_pk;
    if (entry.level == 1) {
        if (entry.parent != RegistryEntry::kNoParent) throw std::invalid_argument("dac registry: root entry has parent");
    } else {
        if (entry.parent >= entries_.size()) throw std::invalid_argument("dac registry: unknown parent");
        const RegistryEntry& parent = entries_[entry.parent];
        if (!parent.dk_pk) throw std::invalid_argument("dac registry: parent holds a terminal credential");
        if (parent.level + 1 != entry.level || entry.max_level > parent.max_level) {
            throw std::invalid_argument("dac registry: delegation beyond the parent's depth");
        }
        issuer_pk = *parent.dk_pk;
    }
    if (!schnorr_verify(pp_.group, issuer_pk, entry.signed_bytes(), entry.sig)) {
        throw std::invalid_argument("dac registry: issuer signature invalid");
    }
    entries_.push_back(std::move(entry));
    return static_cast<std::uint32_t>(entries_.size() - 1);
}

RegistryEntry DacRegistry::get(std::uint32_t index) const {
    std::shared_lock lock(mu_);
    if (index >= entries_.size()) throw std::out_of_range("dac registry: index");
    return entries_[index];
}

std::size_t DacRegistry::size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
}

std::vector<std::uint32_t> DacRegistry::indices_at_level(std::uint8_t level) const {
    std::shared_lock lock(mu_);
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].level == level) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

PendingCred dac_cred_request(const DacParams& pp, const UserKey& key, bool want_delegation, crypto::SeededRng& rng) {
    std::optional<DelegationKey> dk;
    if (want_delegation) {
        Scalar x = pp.group.random_scalar(rng);
        while (x.is_zero()) x = pp.group.random_scalar(rng);
        GroupElement pk = pp.group.generator() * x;
        dk = DelegationKey{std::move(x), std::move(pk)};
    }
    std::optional<GroupElement> dk_pk;
    if (dk) dk_pk = dk->pk;
    SchnorrSig pok = schnorr_sign(pp.group, key.sk, pok_message(key.pk, dk_pk), rng);
    return PendingCred{CredRequest{key.pk, std::move(pok), std::move(dk_pk)}, std::move(dk)};
}

IssuedCred dac_create_cred(const DacRoot& root, DacRegistry& registry, const CredRequest& req,
                           const AttributeSet& attrs, int max_level, crypto::SeededRng& rng) {
    const DacParams& pp = root.pp;
    if (static_cast<int>(attrs.size()) > pp.t) throw std::invalid_argument("dac_create_cred: attribute set exceeds t");
    if (max_level < 1 || max_level > pp.eta) throw std::invalid_argument("dac_create_cred: max level out of range");
    for (const auto& a : attrs) check_attribute(a);
    check_request(pp, req);
    if (req.dk_pk.has_value() != (max_level > 1)) {
        throw std::invalid_argument("dac_create_cred: delegation key must accompany a delegation right");
    }
    Scalar rho = pp.group.random_scalar(rng);
    RegistryEntry e{1, static_cast<std::uint8_t>(max_level), RegistryEntry::kNoParent, commit(pp, req.pk, attrs, rho),
                    req.dk_pk, SchnorrSig{pp.group.scalar(0), pp.group.scalar(0)}};
    e.sig = schnorr_sign(pp.group, root.root_sk, e.signed_bytes(), rng);
    const std::uint32_t index = registry.add(std::move(e));
    return IssuedCred{index, std::move(rho)};
}

Credential dac_get_cred(const DacRegistry& registry, const UserKey& key, const AttributeSet& attrs,
                        const PendingCred& pending, const IssuedCred& issued) {
    return finish_receive(registry, key, attrs, pending, issued);
}

IssuedCred dac_issue_cred(DacRegistry& registry, const Credential& delegator, const AttributeSet& a_l,
                          const CredRequest& req, int max_level, bool terminal, crypto::SeededRng& rng) {
    const DacParams& pp = registry.params();
    if (!delegator.dk) throw std::invalid_argument("dac_issue_cred: delegator holds a terminal credential");
    const int level = delegator.level + 1;
    if (level > delegator.max_level || max_level > delegator.max_level) {
        throw std::invalid_argument("dac_issue_cred: delegation beyond the permitted depth");
    }
    if (terminal) max_level = level;
    if (max_level < level) throw std::invalid_argument("dac_issue_cred: max level below the new level");
    AttributeSet attrs = delegator.attrs;
    attrs.insert(attrs.end(), a_l.begin(), a_l.end());
    if (static_cast<int>(attrs.size()) > pp.t) throw std::invalid_argument("dac_issue_cred: attribute set exceeds t");
    for (const auto& a : a_l) check_attribute(a);
    check_request(pp, req);
    if (req.dk_pk.has_value() != (max_level > level)) {
        throw std::invalid_argument("dac_issue_cred: delegation key must accompany a delegation right");
    }
    Scalar rho = pp.group.random_scalar(rng);
    RegistryEntry e{static_cast<std::uint8_t>(level), static_cast<std::uint8_t>(max_level), delegator.registry_index,
                    commit(pp, req.pk, attrs, rho), req.dk_pk, SchnorrSig{pp.group.scalar(0), pp.group.scalar(0)}};
    e.sig = schnorr_sign(pp.group, delegator.dk->x, e.signed_bytes(), rng);
    const std::uint32_t index = registry.add(std::move(e));
    return IssuedCred{index, std::move(rho)};
}

Credential dac_receive_cred(const DacRegistry& registry, const UserKey& key, const Credential& delegator,
                            const AttributeSet& a_l, const PendingCred& pending, const IssuedCred& issued) {
    return dac_receive_cred(registry, key, delegator.attrs, a_l, pending, issued);
}

Credential dac_receive_cred(const DacRegistry& registry, const UserKey& key, const AttributeSet& delegator_attrs,
                            const AttributeSet& a_l, const PendingCred& pending, const IssuedCred& issued) {
    AttributeSet attrs = delegator_attrs;
    attrs.insert(attrs.end(), a_l.begin(), a_l.end());
    return finish_receive(registry, key, std::move(attrs), pending, issued);
}

const Attribute* Presentation::find(AttrKind kind) const {
    for (const auto& d : disclosed) {
        if (d.attr.kind == kind) return &d.attr;
    }
    return nullptr;
}

Presentation dac_cred_prove(const DacRegistry& registry, const UserKey& key, const Pseudonym& nym,
                            const Credential& cred, const AttributeSet& disclose, ByteView context,
                            crypto::SeededRng& rng, int anonymity) {
    const DacParams& pp = registry.params();
    const auto& g = pp.group;
    if (anonymity < 1) throw std::invalid_argument("dac_cred_prove: anonymity set must be >= 1");

    // Locate disclosed attributes.
    std::vector<DisclosedAttribute> disclosed;
    std::set<std::size_t> disclosed_slots;
    for (const auto& a : disclose) {
        std::size_t slot = cred.attrs.size();
        for (std::size_t j = 0; j < cred.attrs.size(); ++j) {
            if (cred.attrs[j] == a && !disclosed_slots.contains(j)) {
                slot = j;
                break;
            }
        }
        if (slot == cred.attrs.size()) throw std::invalid_argument("dac_cred_prove: attribute not in credential");
        disclosed_slots.insert(slot);
        disclosed.push_back({static_cast<std::uint8_t>(slot), a});
    }
    std::sort(disclosed.begin(), disclosed.end(), [](const auto& x, const auto& y) { return x.slot < y.slot; });

    // Anonymity ring: the real entry plus decoys at the same level, in ascending index order.
    std::vector<std::uint32_t> candidates = registry.indices_at_level(cred.level);
    std::erase(candidates, cred.registry_index);
    std::vector<std::uint32_t> ring{cred.registry_index};
    while (static_cast<int>(ring.size()) < anonymity && !candidates.empty()) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform(candidates.size()));
        ring.push_back(candidates[pick]);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(ring.begin(), ring.end());
    const std::size_t real = static_cast<std::size_t>(std::find(ring.begin(), ring.end(), cred.registry_index) -
                                                      ring.begin());
    std::vector<GroupElement> ring_commitments;
    for (auto idx : ring) ring_commitments.push_back(registry.get(idx).commitment);

    const Scalar delta = g.random_scalar(rng);
    const GroupElement c_rand = cred.commitment + pp.h0 * delta;

    Presentation p{cred.level,
                   static_cast<std::uint8_t>(cred.attrs.size()),
                   nym.nym,
                   c_rand,
                   ring,
                   {},
                   {},
                   g.scalar(0),
                   g.scalar(0),
                   g.scalar(0),
                   {},
                   disclosed};

    // Representation commitments.
    const Scalar r_sk = g.random_scalar(rng);
    const Scalar r_aux = g.random_scalar(rng);
    const Scalar r_rho = g.random_scalar(rng);
    std::vector<std::optional<Scalar>> r_attr(cred.attrs.size());
    GroupElement t1 = g.mul_gen_add(r_sk, pp.h0, r_rho);
    for (std::size_t j = 0; j < cred.attrs.size(); ++j) {
        if (disclosed_slots.contains(j)) continue;
        r_attr[j] = g.random_scalar(rng);
        t1 = t1 + pp.h[j] * *r_attr[j];
    }
    const GroupElement t2 = g.mul_gen_add(r_sk, pp.h0, r_aux);

    // OR branches: simulate all but the real one.
    const std::size_t k = ring.size();
    std::vector<std::optional<Scalar>> or_c(k), or_z(k);
    std::vector<GroupElement> or_a;
    const Scalar r_delta = g.random_scalar(rng);
    for (std::size_t i = 0; i < k; ++i) {
        if (i == real) {
            or_a.push_back(pp.h0 * r_delta);
            continue;
        }
        or_c[i] = g.random_scalar(rng);
        or_z[i] = g.random_scalar(rng);
        or_a.push_back(pp.h0 * *or_z[i] - (c_rand - ring_commitments[i]) * *or_c[i]);
    }

    const Scalar c = presentation_challenge(registry, p, context, ring_commitments, t1, t2, or_a);
    Scalar c_real = c;
    for (std::size_t i = 0; i < k; ++i) {
        if (i != real) c_real = c_real - *or_c[i];
    }
    or_c[real] = c_real;
    or_z[real] = r_delta + c_real * delta;
    for (std::size_t i = 0; i < k; ++i) {
        p.or_c.push_back(*or_c[i]);
        p.or_z.push_back(*or_z[i]);
    }

    p.z_sk = r_sk + c * key.sk;
    p.z_aux = r_aux + c * nym.aux;
    p.z_rho = r_rho + c * (cred.rho + delta);
    for (std::size_t j = 0; j < cred.attrs.size(); ++j) {
        if (disclosed_slots.contains(j)) continue;
        p.z_attr.push_back(*r_attr[j] + c * attribute_scalar(g, cred.attrs[j]));
    }
    return p;
}

bool dac_cred_verify(const DacRegistry& registry, const Presentation& p, ByteView context) {
    const DacParams& pp = registry.params();
    const auto& g = pp.group;
    const std::size_t k = p.ring.size();
    if (k == 0 || p.or_c.size() != k || p.or_z.size() != k) return false;
    if (p.slot_count > pp.t || p.nym.is_identity() || p.commitment.is_identity()) return false;
    if (p.disclosed.size() > p.slot_count || p.z_attr.size() != p.slot_count - p.disclosed.size()) return false;
    for (std::size_t i = 0; i < p.disclosed.size(); ++i) {
        if (p.disclosed[i].slot >= p.slot_count) return false;
        if (i > 0 && p.disclosed[i].slot <= p.disclosed[i - 1].slot) return false;
        if (p.disclosed[i].attr.value.size() != attribute_width(p.disclosed[i].attr.kind)) return false;
    }
    for (std::size_t i = 1; i < k; ++i) {
        if (p.ring[i] <= p.ring[i - 1]) return false;
    }
    if (p.ring.back() >= registry.size()) return false;

    std::vector<GroupElement> ring_commitments;
    for (auto idx : p.ring) {
        const RegistryEntry e = registry.get(idx);
        if (e.level != p.level) return false;
        ring_commitments.push_back(e.commitment);
    }

    Scalar c = g.scalar(0);
    for (const auto& ci : p.or_c) c = c + ci;

    // X = C' minus the disclosed attributes.
    GroupElement x = p.commitment;
    GroupElement t1 = g.mul_gen_add(p.z_sk, pp.h0, p.z_rho);
    std::size_t next = 0, z = 0;
    for (std::size_t j = 0; j < p.slot_count; ++j) {
        if (next < p.disclosed.size() && p.disclosed[next].slot == j) {
            x = x - pp.h[j] * attribute_scalar(g, p.disclosed[next].attr);
            ++next;
        } else {
            t1 = t1 + pp.h[j] * p.z_attr[z++];
        }
    }
    t1 = t1 - x * c;
    const GroupElement t2 = g.mul_gen_add(p.z_sk, pp.h0, p.z_aux) - p.nym * c;

    std::vector<GroupElement> or_a;
    for (std::size_t i = 0; i < k; ++i) {
        or_a.push_back(pp.h0 * p.or_z[i] - (p.commitment - ring_commitments[i]) * p.or_c[i]);
    }
    return presentation_challenge(registry, p, context, ring_commitments, t1, t2, or_a) == c;
}

Bytes encode_credential(const DacRegistry& registry, const Credential& cred) {
    const RegistryEntry e = registry.get(cred.registry_index);
    ByteWriter w;
    w.u8(e.level).u8(e.max_level).u32(e.parent).u32(cred.registry_index);
    w.raw(e.commitment.to_bytes());
    w.raw(e.dk_pk ? e.dk_pk->to_bytes() : registry.params().group.identity().to_bytes());
    w.raw(e.sig.c.to_bytes()).raw(e.sig.z.to_bytes()).raw(cred.rho.to_bytes());
    if (w.size() > kCredentialBytes) throw std::logic_error("dac: credential encoding exceeds budget");
    w.zeros(kCredentialBytes - w.size());
    return w.take();
}

Bytes encode_presentation(const Presentation& p) {
    ByteWriter w;
    w.u8(p.level).u8(p.slot_count).u8(static_cast<std::uint8_t>(p.ring.size()))
        .u8(static_cast<std::uint8_t>(p.disclosed.size()));
    w.raw(p.nym.to_bytes()).raw(p.commitment.to_bytes());
    for (auto idx : p.ring) w.u32(idx);
    for (const auto& s : p.or_c) w.raw(s.to_bytes());
    for (const auto& s : p.or_z) w.raw(s.to_bytes());
    w.raw(p.z_sk.to_bytes()).raw(p.z_aux.to_bytes()).raw(p.z_rho.to_bytes());
    for (const auto& s : p.z_attr) w.raw(s.to_bytes());
    for (const auto& d : p.disclosed) w.u8(d.slot).u8(static_cast<std::uint8_t>(d.attr.kind)).raw(d.attr.value);
    return w.take();
}

std::optional<Presentation> decode_presentation(const DacParams& pp, ByteView in) {
    const auto& g = pp.group;
    ByteReader r(in);
    std::uint8_t level = 0, slots = 0, k = 0, nd = 0;
    if (!r.u8(level) || !r.u8(slots) || !r.u8(k) || !r.u8(nd)) return std::nullopt;
    if (nd > slots || k == 0) return std::nullopt;
    try {
        auto element = [&]() -> std::optional<GroupElement> {
            Bytes b;
            if (!r.raw(g.element_size(), b)) return std::nullopt;
            return g.element_from_bytes(b);
        };
        auto scalar = [&]() -> std::optional<Scalar> {
            Bytes b;
            if (!r.raw(g.scalar_size(), b)) return std::nullopt;
            return g.scalar_from_bytes(b);
        };
        auto nym = element();
        auto com = element();
        if (!nym || !com) return std::nullopt;
        std::vector<std::uint32_t> ring(k);
        for (auto& idx : ring) {
            if (!r.u32(idx)) return std::nullopt;
        }
        std::vector<Scalar> or_c, or_z, z_attr;
        for (int i = 0; i < 2 * k; ++i) {
            auto s = scalar();
            if (!s) return std::nullopt;
            (i < k ? or_c : or_z).push_back(std::move(*s));
        }
        auto z_sk = scalar();
        auto z_aux = scalar();
        auto z_rho = scalar();
        if (!z_sk || !z_aux || !z_rho) return std::nullopt;
        for (int i = 0; i < slots - nd; ++i) {
            auto s = scalar();
            if (!s) return std::nullopt;
            z_attr.push_back(std::move(*s));
        }
        std::vector<DisclosedAttribute> disclosed;
        for (int i = 0; i < nd; ++i) {
            std::uint8_t slot = 0, kind = 0;
            if (!r.u8(slot) || !r.u8(kind)) return std::nullopt;
            const auto ak = static_cast<AttrKind>(kind);
            Bytes value;
            if (!r.raw(attribute_width(ak), value)) return std::nullopt;
            disclosed.push_back({slot, {ak, std::move(value)}});
        }
        if (!r.done()) return std::nullopt;
        return Presentation{level,        slots,         std::move(*nym),   std::move(*com),  std::move(ring),
                            std::move(or_c), std::move(or_z), std::move(*z_sk), std::move(*z_aux),
                            std::move(*z_rho), std::move(z_attr), std::move(disclosed)};
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace slapx::dac
