#pragma once

// Collects every secret-dependent byte string of one run's messages, parsed
// field by field from the wire. Disclosed attributes, claims and padding are skipped.

#include <set>

#include "slapx/crypto/codec.hpp"
#include "slapx/protocol/roles.hpp"
#include "slapx/vdf/vdf.hpp"

namespace slapx::oracle {

struct SecretCollector {
    const protocol::Directory& dir;
    std::set<crypto::Bytes> items;
    bool ok = true;  // false once a message failed to parse

    bool need(bool cond) {
        if (!cond) ok = false;
        return cond;
    }

    void presentation(crypto::ByteReader& r) {
        crypto::Bytes b;
        if (!need(r.var(b))) return;
        const auto p = dac::decode_presentation(dir.registry.params(), b);
        if (!need(p.has_value())) return;
        items.insert(p->nym.to_bytes());
        items.insert(p->commitment.to_bytes());
        for (const auto& s : p->or_c) items.insert(s.to_bytes());
        for (const auto& s : p->or_z) items.insert(s.to_bytes());
        for (const auto& s : p->z_attr) items.insert(s.to_bytes());
        items.insert(p->z_sk.to_bytes());
        items.insert(p->z_aux.to_bytes());
        items.insert(p->z_rho.to_bytes());
    }

    void proof(crypto::ByteReader& r) {
        const auto phi = protocol::LocationProof::decode(dir.rlrs, r);
        if (!need(phi.has_value())) return;
        items.insert(phi->nym.to_bytes());
        items.insert(phi->cred_ref.to_bytes());
        items.insert(phi->sig.tau.to_bytes());
        items.insert(phi->sig.c0.to_bytes());
        for (const auto& s : phi->sig.responses) items.insert(s.to_bytes());
    }

    void pol(const crypto::Bytes& req, const crypto::Bytes& resp) {
        crypto::ByteReader r(req);
        if (!need(r.skip(64))) return;
        presentation(r);
        crypto::ByteReader s(crypto::ByteView(resp).subspan(1));
        proof(s);
    }

    void spectrum(const crypto::Bytes& req, const crypto::Bytes& resp) {
        crypto::ByteReader r(req);
        crypto::Bytes phi;
        if (!need(r.skip(1 + 30) && r.var(phi))) return;
        presentation(r);
        crypto::ByteReader s(crypto::ByteView(resp).subspan(1));
        crypto::Bytes puzzle, sig;
        if (!need(s.var(puzzle) && s.var(sig))) return;
        const auto pz = protocol::Puzzle::decode(puzzle);
        if (!need(pz.has_value())) return;
        items.insert(pz->nonce);
        items.insert(crypto::Bytes(pz->binding.begin(), pz->binding.end()));
        items.insert(sig);
    }

    void service(const crypto::Bytes& req, const crypto::Bytes& resp) {
        crypto::ByteReader r(req);
        crypto::Bytes m, puzzle, sig, sol, phi;
        if (!need(r.skip(1) && r.var(m) && r.var(puzzle) && r.var(sig) && r.var(sol) && r.var(phi))) return;
        const auto s = vdf::decode_solution(sol);
        if (!need(s.has_value())) return;
        items.insert(s->ell.to_bytes());
        items.insert(s->pi.to_bytes());
        items.insert(s->y.to_bytes());
        presentation(r);
        if (!need(resp.size() >= 17)) return;
        items.insert(crypto::Bytes(resp.begin() + 1, resp.begin() + 17));
    }
};

}  // namespace slapx::oracle
