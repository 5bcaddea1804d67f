#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slapx/cli/deployment.hpp"
#include "slapx/cli/transport.hpp"

namespace slapx::cli {

/// 0 when granted, 10 + reason otherwise.
int exit_code(protocol::Reject r);
/// Inverse of exit_code; nullopt for any other status.
std::optional<protocol::Reject> reject_for_exit(int code);
inline constexpr int kExitFailure = 1;

enum class Stage { Pol, Query, Service };

struct RunOptions {
    std::string device;
    Stage stop = Stage::Service;
    protocol::PolPath path = protocol::PolPath::AccessPoint;
    std::string ap;  // empty: nearest to the claim
    double distance_m = 20.0;  // physical distance to the AP or ND
    std::optional<double> lx;  // claimed location; default is the verifier offset by distance_m along x
    std::optional<double> ly;
    std::uint64_t now_ms = 0;  // 0: wall clock
    double delay_s = 0.0;      // between PoL and the spectrum query
    std::string replay_as;     // after the query, this device presents the same proof of location
    std::string message = "hello";
    std::uint16_t channel = 21;
    std::uint64_t run_seed = 0;
};

struct PhaseReport {
    std::string phase;
    std::size_t request_bytes = 0;
    std::size_t response_bytes = 0;
    double ms = 0.0;
};

struct RunResult {
    protocol::Reject outcome = protocol::Reject::Ok;
    std::string detail;
    std::vector<PhaseReport> phases;
    std::uint64_t kappa = 0;
    std::string grant_id;  // hex
};

RunResult run_inproc(World& w, const RunOptions& o);

struct Endpoints {
    std::string host = "127.0.0.1";
    std::uint16_t ap_port = 0;
    std::uint16_t psd_port = 0;
    std::uint16_t server_port = 0;
};

/// The same run against role listeners. AP path only, and delay_s must be 0.
/// `local` supplies keys, the registry and beacons; it must come from the same deployment.
RunResult run_socket(World& local, const RunOptions& o, const Endpoints& ep);

// Role listeners. An AP session opens with the simulated channel distance as an
// 8-byte big-endian IEEE double, then carries PolRequest frames.
std::unique_ptr<FrameServer> serve_ap(World& w, const std::string& ap_id, const std::string& host, std::uint16_t port);
std::unique_ptr<FrameServer> serve_psd(World& w, const std::string& host, std::uint16_t port);
std::unique_ptr<FrameServer> serve_server(World& w, const std::string& host, std::uint16_t port);

std::uint64_t wall_clock_ms();

std::string run_csv_header();
/// Phase rows, a totals row, then the decision line (GRANTED or the reject name).
void print_run(std::ostream& os, const RunResult& r);

}  // namespace slapx::cli
