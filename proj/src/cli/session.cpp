#include "slapx/cli/session.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "slapx/crypto/codec.hpp"
#include "slapx/vdf/vdf.hpp"

namespace slapx::cli {

using protocol::Bytes;
using protocol::MessageType;
using protocol::Reject;

int exit_code(Reject r) { return r == Reject::Ok ? 0 : 10 + static_cast<int>(r); }

std::optional<Reject> reject_for_exit(int code) {
    if (code == 0) return Reject::Ok;
    if (code > 10 && code < 10 + protocol::kRejectCount) return static_cast<Reject>(code - 10);
    return std::nullopt;
}

std::uint64_t wall_clock_ms() {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

namespace {

using Clock = std::chrono::steady_clock;

// How the client reaches each role.
struct Links {
    std::function<Bytes(const std::string& ap_id, const Bytes&, double distance_m, std::uint64_t now)> ap;
    std::function<Bytes(const Bytes&, std::uint64_t now)> psd;
    std::function<Bytes(const Bytes&, std::uint64_t now)> server;
};

std::string hex(protocol::ByteView b) {
    static const char* d = "0123456789abcdef";
    std::string s;
    for (auto c : b) {
        s += d[c >> 4];
        s += d[c & 15];
    }
    return s;
}

RunResult run(World& w, const RunOptions& o, const Links& links, bool allow_nd) {
    RunResult res;
    const auto& cfg = w.directory().cfg;
    const std::uint64_t now = o.now_ms ? o.now_ms : wall_clock_ms();
    const bool nd_path = o.path == protocol::PolPath::NeighborDevice;
    if (nd_path && !allow_nd) throw std::invalid_argument("the ND path runs in-process only");

    double vx = 0, vy = 0;
    protocol::AccessPoint* ap = nullptr;
    if (nd_path) {
        vx = w.nd().x();
        vy = w.nd().y();
    } else if (!o.ap.empty()) {
        ap = &w.ap(o.ap);
    }
    if (!nd_path && !ap) {
        // Nearest AP to the claim; without a claim, the first AP.
        const auto& first = w.deployment().aps.front();
        ap = &w.nearest_ap(o.lx.value_or(first.x), o.ly.value_or(first.y));
    }
    if (ap) {
        vx = ap->x();
        vy = ap->y();
    }
    const double lx = o.lx.value_or(vx + o.distance_m);
    const double ly = o.ly.value_or(vy);

    auto client = w.client(o.device, o.run_seed);
    auto timed = [&](const std::string& phase, auto&& body) {
        PhaseReport p{phase, 0, 0, 0.0};
        const auto t0 = Clock::now();
        try {
            body(p);
        } catch (...) {
            p.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            res.phases.push_back(p);
            throw;
        }
        p.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        res.phases.push_back(p);
    };

    try {
        if (nd_path) {
            timed("pol_nd", [&](PhaseReport& p) {
                protocol::PhaseBytes pb;
                protocol::pol_nd(client, w.nd(), now, lx, ly, o.distance_m, &pb);
                p.request_bytes = pb.request;
                p.response_bytes = pb.response;
            });
        } else {
            timed("pol_ap", [&](PhaseReport& p) {
                const std::uint64_t ts = protocol::window_of(cfg, now);
                const Bytes req = client.pol_request(ap->beacon(ts), lx, ly, ts);
                const Bytes resp = links.ap(ap->id(), req, o.distance_m, now);
                p.request_bytes = req.size();
                p.response_bytes = resp.size();
                client.accept_pol_response(resp);
            });
        }
        if (o.stop == Stage::Pol) return res;

        const std::uint64_t t_q = now + static_cast<std::uint64_t>(o.delay_s * 1000.0);
        const protocol::SpectrumQuery q{lx, ly, o.channel, 600, protocol::window_of(cfg, t_q)};
        protocol::SpectrumGrant grant;
        timed("spectrum_query", [&](PhaseReport& p) {
            const Bytes req = client.spectrum_request(q, o.path);
            const Bytes resp = links.psd(req, t_q);
            p.request_bytes = req.size();
            p.response_bytes = resp.size();
            grant = client.accept_spectrum_response(resp);
        });
        res.kappa = grant.puzzle.params.kappa;

        if (!o.replay_as.empty()) {
            auto other = w.client(o.replay_as, o.run_seed + 1);
            other.adopt_proof(*client.proof());
            timed("replay_query", [&](PhaseReport& p) {
                const Bytes req = other.spectrum_request(q, o.path);
                const Bytes resp = links.psd(req, t_q + 1);
                p.request_bytes = req.size();
                p.response_bytes = resp.size();
                other.accept_spectrum_response(resp);
            });
            return res;
        }
        if (o.stop == Stage::Query) return res;

        timed("service_request", [&](PhaseReport& p) {
            const Bytes m(o.message.begin(), o.message.end());
            const std::uint64_t before = vdf::total_squarings();
            const Bytes req = client.service_request(m, grant, o.path);
            const std::uint64_t done = vdf::total_squarings() - before;
            const Bytes resp = links.server(req, t_q + 1000);
            p.request_bytes = req.size();
            p.response_bytes = resp.size();
            const auto g = client.accept_service_response(resp);
            if (done < grant.puzzle.params.kappa) throw std::logic_error("granted with fewer than kappa squarings");
            res.grant_id = hex(g.grant_id);
        });
    } catch (const protocol::ProtocolError& e) {
        res.outcome = e.code();
        res.detail = e.what();
    }
    return res;
}

Bytes encode_distance(double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    Bytes out(8);
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    return out;
}

double decode_distance(const std::uint8_t* b) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = (bits << 8) | b[i];
    return std::bit_cast<double>(bits);
}

Bytes exchange(const Endpoints& ep, std::uint16_t port, MessageType req_type, MessageType resp_type, const Bytes& req,
               const Bytes& preamble = {}) {
    auto s = Socket::connect(ep.host, port);
    if (!preamble.empty()) write_all(s.fd(), preamble);
    send_frame(s.fd(), {req_type, req});
    auto m = recv_frame(s.fd());
    if (m.type != resp_type) throw std::runtime_error("unexpected response type " + std::string(protocol::message_name(m.type)));
    return std::move(m.payload);
}

// Serves request frames of one type until the peer closes.
void serve_frames(int fd, MessageType req_type, MessageType resp_type, const std::function<Bytes(const Bytes&)>& handle) {
    protocol::WireMessage m;
    while (try_recv_frame(fd, m)) {
        if (m.type != req_type) return;
        send_frame(fd, {resp_type, handle(m.payload)});
    }
}

}  // namespace

RunResult run_inproc(World& w, const RunOptions& o) {
    Links links;
    links.ap = [&](const std::string& id, const Bytes& req, double d, std::uint64_t now) {
        return w.ap(id).respond(req, protocol::measure(w.directory().cfg.radio, d), now);
    };
    links.psd = [&](const Bytes& req, std::uint64_t now) { return w.psd().respond(req, now); };
    links.server = [&](const Bytes& req, std::uint64_t now) { return w.server().respond(req, now); };
    return run(w, o, links, true);
}

RunResult run_socket(World& local, const RunOptions& o, const Endpoints& ep) {
    if (o.delay_s != 0.0) throw std::invalid_argument("socket runs use the servers' clocks; delay is in-process only");
    Links links;
    links.ap = [&](const std::string&, const Bytes& req, double d, std::uint64_t) {
        return exchange(ep, ep.ap_port, MessageType::PolRequest, MessageType::PolResponse, req, encode_distance(d));
    };
    links.psd = [&](const Bytes& req, std::uint64_t) {
        return exchange(ep, ep.psd_port, MessageType::SpectrumRequest, MessageType::SpectrumResponse, req);
    };
    links.server = [&](const Bytes& req, std::uint64_t) {
        return exchange(ep, ep.server_port, MessageType::ServiceRequest, MessageType::ServiceResponse, req);
    };
    return run(local, o, links, false);
}

std::unique_ptr<FrameServer> serve_ap(World& w, const std::string& ap_id, const std::string& host, std::uint16_t port) {
    auto& ap = w.ap(ap_id);
    const auto radio = w.directory().cfg.radio;
    auto mu = std::make_shared<std::mutex>();  // sessions share one role object
    return std::make_unique<FrameServer>(host, port, [&ap, radio, mu](int fd) {
        std::uint8_t pre[8];
        read_exact(fd, pre, sizeof pre);
        const double d = decode_distance(pre);
        if (!(d >= 0.0)) throw std::runtime_error("ap session: bad distance");
        serve_frames(fd, MessageType::PolRequest, MessageType::PolResponse,
                     [&](const Bytes& req) {
                         std::lock_guard lock(*mu);
                         return ap.respond(req, protocol::measure(radio, d), wall_clock_ms());
                     });
    });
}

std::unique_ptr<FrameServer> serve_psd(World& w, const std::string& host, std::uint16_t port) {
    auto& psd = w.psd();
    auto mu = std::make_shared<std::mutex>();
    return std::make_unique<FrameServer>(host, port, [&psd, mu](int fd) {
        serve_frames(fd, MessageType::SpectrumRequest, MessageType::SpectrumResponse,
                     [&](const Bytes& req) {
                         std::lock_guard lock(*mu);
                         return psd.respond(req, wall_clock_ms());
                     });
    });
}

std::unique_ptr<FrameServer> serve_server(World& w, const std::string& host, std::uint16_t port) {
    auto& server = w.server();
    auto mu = std::make_shared<std::mutex>();
    return std::make_unique<FrameServer>(host, port, [&server, mu](int fd) {
        serve_frames(fd, MessageType::ServiceRequest, MessageType::ServiceResponse,
                     [&](const Bytes& req) {
                         std::lock_guard lock(*mu);
                         return server.respond(req, wall_clock_ms());
                     });
    });
}

std::string run_csv_header() { return "phase,request_bytes,response_bytes,total_bytes,ms"; }

void print_run(std::ostream& os, const RunResult& r) {
    char buf[200];
    os << run_csv_header() << '\n';
    std::size_t total = 0;
    double ms = 0;
    for (const auto& p : r.phases) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.3f\n", p.phase.c_str(), p.request_bytes, p.response_bytes,
                      p.request_bytes + p.response_bytes, p.ms);
        os << buf;
        total += p.request_bytes + p.response_bytes;
        ms += p.ms;
    }
    std::snprintf(buf, sizeof buf, "total,,,%zu,%.3f\n", total, ms);
    os << buf;
    os << protocol::reject_name(r.outcome);
    if (r.outcome == Reject::Ok && !r.grant_id.empty()) os << " grant=" << r.grant_id << " kappa=" << r.kappa;
    if (!r.detail.empty() && r.detail != protocol::reject_name(r.outcome)) os << " (" << r.detail << ")";
    os << '\n';
}

}  // namespace slapx::cli
