#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "slapx/simnet/simnet.hpp"

namespace slapx::bench {

struct OpStats {
    std::string name;
    std::string side;  // client, server or setup
    int iterations = 0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double mean_ms = 0.0;
    std::uint64_t kappa = 0;  // VDF ops only
};

/// Client and server cost of one protocol phase, each the sum of its op medians.
struct PhaseTotal {
    std::string phase;
    std::vector<std::string> client_ops;
    std::vector<std::string> server_ops;
    double client_ms = 0.0;
    double server_ms = 0.0;
};

struct BenchOptions {
    int iterations = 30;
    /// Iterations for VDF eval and setup, which dominate the run time. 0 means `iterations`.
    int vdf_iterations = 0;
    std::vector<std::uint64_t> kappas{1000, 5000, 10000, 80000, 300000};
    /// Difficulty used for the service phase total.
    std::uint64_t service_kappa = 1000;
    int modulus_bits = 2048;
    std::uint64_t seed = 1;
    /// Progress lines go here when set.
    std::function<void(const std::string&)> progress;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares. Throws std::invalid_argument on fewer than two points.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

struct BenchReport {
    std::string host;
    int iterations = 0;
    std::vector<OpStats> ops;
    std::vector<PhaseTotal> phases;
    LinearFit eval_fit;  // eval ms against kappa

    /// Throws std::out_of_range.
    const OpStats& op(const std::string& name, std::uint64_t kappa = 0) const;
    const PhaseTotal& phase(const std::string& name) const;
    /// Squarings per second from the eval fit.
    double eval_rate() const;
};

/// Times every primitive on the calling thread. Throws std::invalid_argument if iterations < 30.
BenchReport bench_all(const BenchOptions& opts);

/// Median and 95th percentile (nearest rank) of the samples.
std::pair<double, double> median_p95(std::vector<double> samples);

std::string host_descriptor();

/// Simulator costs from the measurements. baseline_ms and ap_reject_ms keep
/// their reference values when no op stands in for them.
simnet::CostModel calibrate(const BenchReport& r, const simnet::CostModel& reference = {});

std::string ops_csv_header();
std::string op_csv_row(const OpStats& s);
std::string phases_csv_header();
std::string phase_csv_row(const PhaseTotal& p);
void write_csv(std::ostream& os, const BenchReport& r);
void write_table(std::ostream& os, const BenchReport& r);

}  // namespace slapx::bench
