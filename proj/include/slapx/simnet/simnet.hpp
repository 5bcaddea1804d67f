#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slapx/protocol/prox.hpp"
#include "slapx/simnet/server.hpp"

namespace slapx::simnet {

using RadioModel = protocol::RadioEnv;

enum class Scenario { Baseline, FullProtocol, Bypass, Precompute, Hijack, Fraud };

std::string_view scenario_name(Scenario s);
/// Accepts the names above plus "full_protocol". Throws std::invalid_argument.
Scenario parse_scenario(std::string_view name);

/// Per-operation costs in milliseconds. Defaults are the Table 1 reference figures;
/// `bench --calibrate` writes a file with host measurements in the same keys.
struct CostModel {
    double client_pol_ms = 32.2;
    double ap_ms = 75.79;
    double ap_reject_ms = 0.12;  // repeat event, turned away before verification
    double client_query_ms = 17.23;
    double psd_ms = 74.34;
    double client_service_ms = 17.23;  // plus the VDF evaluation
    double server_ms = 77.68;
    double reject_ms = 3.8;     // puzzle signature check fails
    double baseline_ms = 20.0;  // unprotected request handling
    double vdf_eval_rate = 3e5 / 3.17;  // squarings per second

    double eval_s(std::uint64_t kappa) const { return static_cast<double>(kappa) / vdf_eval_rate; }
    void validate() const;
};

struct NetworkModel {
    double radio_latency_ms = 1.0;
    double radio_rate_mbps = 100.0;
    double backhaul_ms = 2.0;
    double backhaul_gbps = 1.0;
    std::size_t mtu = 1500;
    std::size_t header_bytes = 40;
    double cell_radius_m = 50.0;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::FullProtocol;
    int n_ue = 100;
    double r_mal = 0.2;
    double duration_s = 10.0;
    double attack_start_s = 2.0;
    double attack_end_s = 8.0;
    std::uint64_t seed = 1;

    int workers = 4;
    std::size_t capacity = 100;
    int ap_workers = 3;  // one per cell
    int psd_workers = 4;
    std::size_t psd_capacity = 100;

    double baseline_interval_ms = 50.0;
    double bypass_interval_ms = 100.0;
    std::uint64_t kappa = 1000;
    double window_s = 60.0;
    double validity_s = 60.0;
    /// Full-protocol attackers claim a new location on every run.
    bool fresh_events = false;
    /// Precompute attackers start banking this long before the attack (clamped to t = 0).
    double precompute_lead_s = 2.0;

    CostModel costs;
    NetworkModel net;
    RadioModel radio;

    // hijack
    int hijack_trials = 100;
    double threshold_m = 50.0;
    bool noiseless = false;
    double relay_delay_ns = 0.0;

    // fraud
    int rounds = 20;
    double tolerance = 0.0;
    double guess = 0.5;
    std::uint64_t fraud_trials = 100000;

    int n_malicious() const;
    /// Throws std::invalid_argument.
    void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys throw std::invalid_argument.
void apply_config(ScenarioConfig& cfg, std::istream& in);
void apply_config_file(ScenarioConfig& cfg, const std::string& path);
/// Sets one key; throws std::invalid_argument on an unknown key or bad value.
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
void load_calibration(CostModel& costs, const std::string& path);
void save_calibration(const CostModel& costs, std::ostream& out);

struct SimMetrics {
    Scenario scenario = Scenario::Baseline;
    int n_ue = 0;
    double r_mal = 0.0;
    std::uint64_t seed = 0;
    int n_malicious = 0;
    int n_benign = 0;

    std::uint64_t requests = 0;  // arrivals at the server
    std::uint64_t n_q = 0;
    std::uint64_t n_d = 0;  // benign drops at the server
    std::uint64_t n_d_malicious = 0;
    std::uint64_t immediate = 0;
    std::uint64_t rejected_at_arrival = 0;
    double t_q_ms = 0.0;
    std::size_t max_queue_len = 0;
    double utilization = 0.0;

    int benign_completed = 0;
    int benign_failed = 0;
    double benign_latency_ms = 0.0;  // mean over completed runs
    std::uint64_t psd_drops_benign = 0;
    std::size_t ap_max_queue = 0;
    std::uint64_t malicious_grants = 0;
    std::size_t max_bank = 0;
    std::uint64_t bank_limit = 0;
    double attack_success_rate = 0.0;  // share of benign runs that did not complete

    std::vector<std::uint32_t> drops_by_ue;
};

SimMetrics run_dos(const ScenarioConfig& cfg);
/// One run per (n_ue, r_mal) pair, in order.
std::vector<SimMetrics> run_dos_grid(const ScenarioConfig& base, const std::vector<int>& n_ue,
                                     const std::vector<double>& r_mal);

/// floor(validity_s / t_eval(kappa)) with t_eval = kappa / eval_rate.
std::uint64_t precompute_limit(std::uint64_t kappa, double validity_s, double eval_rate);

struct HijackCell {
    double honest_d = 0.0;
    double mal_d = 0.0;
    double w = 0.0;
    int trials = 0;
    int successes = 0;
    double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct HijackGrid {
    std::vector<double> honest_d{0, 10, 20, 30, 40, 50};
    std::vector<double> mal_d{50, 60, 70, 80, 90, 100};
    std::vector<int> w_tenths{1, 2, 3, 4, 5, 6, 7, 8, 9};
};

/// Relay through an honest UE: RSS from honest_d, RTT from the malicious UE's own path.
std::vector<HijackCell> run_hijack(const ScenarioConfig& cfg, const HijackGrid& grid = {});

struct FraudResult {
    int rounds = 0;
    double tolerance = 0.0;
    double guess = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t accepted = 0;
    double rate() const { return trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0; }
    double std_error() const;
};

/// Distance fraud against the rapid bit exchange: the prover sits beyond th and
/// answers every round before the challenge reaches it.
FraudResult run_fraud(const ScenarioConfig& cfg);

// Output. Column order is part of the interface (docs/metrics.md).
std::string dos_csv_header();
std::string dos_csv_row(const SimMetrics& m);
std::string hijack_csv_header();
std::string hijack_csv_row(const HijackCell& c);
std::string fraud_csv_header();
std::string fraud_csv_row(const FraudResult& r);
std::string dos_json(const std::vector<SimMetrics>& runs);

}  // namespace slapx::simnet
