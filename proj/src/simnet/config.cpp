#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "slapx/simnet/simnet.hpp"

namespace slapx::simnet {

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Baseline: return "baseline";
        case Scenario::FullProtocol: return "full";
        case Scenario::Bypass: return "bypass";
        case Scenario::Precompute: return "precompute";
        case Scenario::Hijack: return "hijack";
        case Scenario::Fraud: return "fraud";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    if (name == "baseline") return Scenario::Baseline;
    if (name == "full" || name == "full_protocol") return Scenario::FullProtocol;
    if (name == "bypass") return Scenario::Bypass;
    if (name == "precompute") return Scenario::Precompute;
    if (name == "hijack") return Scenario::Hijack;
    if (name == "fraud") return Scenario::Fraud;
    throw std::invalid_argument("unknown scenario: " + std::string(name));
}

void CostModel::validate() const {
    for (double v : {client_pol_ms, ap_ms, ap_reject_ms, client_query_ms, psd_ms, client_service_ms, server_ms,
                     reject_ms, baseline_ms}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("costs: negative or non-finite cost");
    }
    if (!(vdf_eval_rate > 0.0)) throw std::invalid_argument("costs: vdf_eval_rate must be positive");
}

int ScenarioConfig::n_malicious() const { return static_cast<int>(std::lround(n_ue * r_mal)); }

void ScenarioConfig::validate() const {
    const auto bad = [](const char* what) { throw std::invalid_argument(std::string("config: ") + what); };
    if (n_ue < 0) bad("n_ue must be non-negative");
    if (!(r_mal >= 0.0 && r_mal <= 1.0)) bad("r_mal must be in [0, 1]");
    if (!(duration_s > 0.0)) bad("duration_s must be positive");
    if (!(attack_start_s >= 0.0 && attack_start_s <= attack_end_s && attack_end_s <= duration_s)) {
        bad("attack window must lie within [0, duration]");
    }
    if (workers < 1 || ap_workers < 1 || psd_workers < 1) bad("worker counts must be positive");
    if (!(baseline_interval_ms > 0.0 && bypass_interval_ms > 0.0)) bad("flood intervals must be positive");
    if (kappa == 0) bad("kappa must be positive");
    if (!(window_s > 0.0 && validity_s >= 0.0)) bad("window_s must be positive and validity_s non-negative");
    if (!(precompute_lead_s >= 0.0)) bad("precompute_lead_s must be non-negative");
    if (net.mtu <= net.header_bytes) bad("mtu must exceed header_bytes");
    if (!(net.radio_rate_mbps > 0.0 && net.backhaul_gbps > 0.0 && net.cell_radius_m > 0.0)) bad("bad network model");
    if (hijack_trials < 1 || rounds < 1 || fraud_trials < 1) bad("trial and round counts must be positive");
    if (!(tolerance >= 0.0 && tolerance < 1.0)) bad("tolerance must be in [0, 1)");
    if (!(guess >= 0.0 && guess <= 1.0)) bad("guess must be in [0, 1]");
    if (!(threshold_m > 0.0)) bad("threshold_m must be positive");
    if (!(relay_delay_ns >= 0.0)) bad("relay_delay_ns must be non-negative");
    costs.validate();
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) throw std::invalid_argument("config: bad value for " + key + ": " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::invalid_argument("config: bad value for " + key + ": " + v);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

template <class T, class F>
Setter number(F field) {
    return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { field(c) = parse_number<T>(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"scenario", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.scenario = parse_scenario(v); }},
        {"n_ue", number<int>([](ScenarioConfig& c) -> int& { return c.n_ue; })},
        {"r_mal", number<double>([](ScenarioConfig& c) -> double& { return c.r_mal; })},
        {"duration_s", number<double>([](ScenarioConfig& c) -> double& { return c.duration_s; })},
        {"attack_start_s", number<double>([](ScenarioConfig& c) -> double& { return c.attack_start_s; })},
        {"attack_end_s", number<double>([](ScenarioConfig& c) -> double& { return c.attack_end_s; })},
        {"seed", number<std::uint64_t>([](ScenarioConfig& c) -> std::uint64_t& { return c.seed; })},
        {"workers", number<int>([](ScenarioConfig& c) -> int& { return c.workers; })},
        {"capacity", number<std::size_t>([](ScenarioConfig& c) -> std::size_t& { return c.capacity; })},
        {"ap_workers", number<int>([](ScenarioConfig& c) -> int& { return c.ap_workers; })},
        {"psd_workers", number<int>([](ScenarioConfig& c) -> int& { return c.psd_workers; })},
        {"psd_capacity", number<std::size_t>([](ScenarioConfig& c) -> std::size_t& { return c.psd_capacity; })},
        {"baseline_interval_ms", number<double>([](ScenarioConfig& c) -> double& { return c.baseline_interval_ms; })},
        {"bypass_interval_ms", number<double>([](ScenarioConfig& c) -> double& { return c.bypass_interval_ms; })},
        {"kappa", number<std::uint64_t>([](ScenarioConfig& c) -> std::uint64_t& { return c.kappa; })},
        {"window_s", number<double>([](ScenarioConfig& c) -> double& { return c.window_s; })},
        {"validity_s", number<double>([](ScenarioConfig& c) -> double& { return c.validity_s; })},
        {"fresh_events",
         [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.fresh_events = parse_bool(k, v); }},
        {"precompute_lead_s", number<double>([](ScenarioConfig& c) -> double& { return c.precompute_lead_s; })},
        {"client_pol_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.client_pol_ms; })},
        {"ap_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.ap_ms; })},
        {"ap_reject_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.ap_reject_ms; })},
        {"client_query_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.client_query_ms; })},
        {"psd_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.psd_ms; })},
        {"client_service_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.client_service_ms; })},
        {"server_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.server_ms; })},
        {"reject_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.reject_ms; })},
        {"baseline_ms", number<double>([](ScenarioConfig& c) -> double& { return c.costs.baseline_ms; })},
        {"vdf_eval_rate", number<double>([](ScenarioConfig& c) -> double& { return c.costs.vdf_eval_rate; })},
        {"radio_latency_ms", number<double>([](ScenarioConfig& c) -> double& { return c.net.radio_latency_ms; })},
        {"radio_rate_mbps", number<double>([](ScenarioConfig& c) -> double& { return c.net.radio_rate_mbps; })},
        {"backhaul_ms", number<double>([](ScenarioConfig& c) -> double& { return c.net.backhaul_ms; })},
        {"backhaul_gbps", number<double>([](ScenarioConfig& c) -> double& { return c.net.backhaul_gbps; })},
        {"mtu", number<std::size_t>([](ScenarioConfig& c) -> std::size_t& { return c.net.mtu; })},
        {"header_bytes", number<std::size_t>([](ScenarioConfig& c) -> std::size_t& { return c.net.header_bytes; })},
        {"cell_radius_m", number<double>([](ScenarioConfig& c) -> double& { return c.net.cell_radius_m; })},
        {"tx_power_dbm", number<double>([](ScenarioConfig& c) -> double& { return c.radio.tx_power_dbm; })},
        {"ref_loss_db", number<double>([](ScenarioConfig& c) -> double& { return c.radio.ref_loss_db; })},
        {"path_loss_exponent",
         number<double>([](ScenarioConfig& c) -> double& { return c.radio.path_loss_exponent; })},
        {"shadowing_sigma_db",
         number<double>([](ScenarioConfig& c) -> double& { return c.radio.shadowing_sigma_db; })},
        {"hijack_trials", number<int>([](ScenarioConfig& c) -> int& { return c.hijack_trials; })},
        {"threshold_m", number<double>([](ScenarioConfig& c) -> double& { return c.threshold_m; })},
        {"noiseless",
         [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.noiseless = parse_bool(k, v); }},
        {"relay_delay_ns", number<double>([](ScenarioConfig& c) -> double& { return c.relay_delay_ns; })},
        {"rounds", number<int>([](ScenarioConfig& c) -> int& { return c.rounds; })},
        {"tolerance", number<double>([](ScenarioConfig& c) -> double& { return c.tolerance; })},
        {"guess", number<double>([](ScenarioConfig& c) -> double& { return c.guess; })},
        {"fraud_trials", number<std::uint64_t>([](ScenarioConfig& c) -> std::uint64_t& { return c.fraud_trials; })},
        {"calibration",
         [](ScenarioConfig& c, const std::string&, const std::string& v) { load_calibration(c.costs, v); }},
    };
    return table;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class F>
void for_each_pair(std::istream& in, F f) {
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(n) + ": expected key = value");
        f(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

constexpr const char* kCostKeys[] = {"client_pol_ms", "ap_ms", "ap_reject_ms", "client_query_ms", "psd_ms",
                                     "client_service_ms", "server_ms", "reject_ms", "baseline_ms", "vdf_eval_rate"};

}  // namespace

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("config: unknown key " + key);
    it->second(cfg, key, value);
}

void apply_config(ScenarioConfig& cfg, std::istream& in) {
    for_each_pair(in, [&](const std::string& k, const std::string& v) { set_config_value(cfg, k, v); });
}

void apply_config_file(ScenarioConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    apply_config(cfg, in);
}

void load_calibration(CostModel& costs, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("calibration: cannot open " + path);
    ScenarioConfig tmp;
    tmp.costs = costs;
    for_each_pair(in, [&](const std::string& k, const std::string& v) {
        if (std::ranges::find(kCostKeys, k) == std::end(kCostKeys)) return;  // host notes etc.
        set_config_value(tmp, k, v);
    });
    tmp.costs.validate();
    costs = tmp.costs;
}

void save_calibration(const CostModel& c, std::ostream& out) {
    std::ostringstream s;
    s.precision(17);
    s << "client_pol_ms = " << c.client_pol_ms << '\n'
      << "ap_ms = " << c.ap_ms << '\n'
      << "ap_reject_ms = " << c.ap_reject_ms << '\n'
      << "client_query_ms = " << c.client_query_ms << '\n'
      << "psd_ms = " << c.psd_ms << '\n'
      << "client_service_ms = " << c.client_service_ms << '\n'
      << "server_ms = " << c.server_ms << '\n'
      << "reject_ms = " << c.reject_ms << '\n'
      << "baseline_ms = " << c.baseline_ms << '\n'
      << "vdf_eval_rate = " << c.vdf_eval_rate << '\n';
    out << s.str();
}

}  // namespace slapx::simnet
