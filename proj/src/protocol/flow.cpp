#include <stdexcept>

#include "internal.hpp"

namespace slapx::protocol {

namespace {

void record(PhaseBytes* bytes, const Bytes& req, const Bytes& resp) {
    if (bytes) *bytes = {req.size(), resp.size()};
}

}  // namespace

LocationProof pol_ap(Client& client, AccessPoint& ap, std::uint64_t now_ms, double lx, double ly,
                     const Measurement& meas, PhaseBytes* bytes) {
    const std::uint64_t ts = window_of(client.config(), now_ms);
    const Bytes req = client.pol_request(ap.beacon(ts), lx, ly, ts);
    const Bytes resp = ap.respond(req, meas, now_ms);
    record(bytes, req, resp);
    return client.accept_pol_response(resp);
}

dac::Credential pol_nd(Client& client, NeighborDevice& nd, std::uint64_t now_ms, double lx, double ly,
                       double distance_m, PhaseBytes* bytes) {
    const Bytes req = client.nd_request(lx, ly, window_of(client.config(), now_ms));
    auto prover = client.honest_prover(distance_m);
    const Bytes resp = nd.respond(req, now_ms, *prover);
    record(bytes, req, resp);
    return client.accept_nd_response(resp);
}

SpectrumGrant spectrum_query(Client& client, Psd& psd, PolPath path, const SpectrumQuery& q, std::uint64_t now_ms,
                             PhaseBytes* bytes) {
    const Bytes req = client.spectrum_request(q, path);
    const Bytes resp = psd.respond(req, now_ms);
    record(bytes, req, resp);
    return client.accept_spectrum_response(resp);
}

ServiceGrant service_request(Client& client, ServiceServer& server, const SpectrumGrant& grant, PolPath path,
                             ByteView m, std::uint64_t now_ms, PhaseBytes* bytes) {
    const std::uint64_t before = vdf::total_squarings();
    std::uint64_t done = 0;
    const Bytes req = client.service_request(m, grant, path, &done);
    const std::uint64_t counted = vdf::total_squarings() - before;
    const Bytes resp = server.respond(req, now_ms);
    record(bytes, req, resp);
    auto g = client.accept_service_response(resp);
    // A grant must rest on at least kappa sequential squarings.
    if (done < grant.puzzle.params.kappa || counted < grant.puzzle.params.kappa) {
        throw std::logic_error("service_request: granted with fewer than kappa squarings");
    }
    return g;
}

}  // namespace slapx::protocol
