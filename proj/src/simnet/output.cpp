#include <cstdio>
#include <string>

#include <json.hpp>

#include "slapx/simnet/simnet.hpp"

namespace slapx::simnet {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

template <class... T>
std::string join(const T&... parts) {
    std::string out;
    ((out += parts, out += ','), ...);
    out.pop_back();
    return out;
}

using std::to_string;

}  // namespace

std::string dos_csv_header() {
    return "scenario,n_ue,r_mal,seed,n_malicious,n_benign,requests,n_q,n_d,n_d_malicious,t_q_ms,max_queue_len,"
           "immediate,rejected_at_arrival,utilization,benign_completed,benign_failed,benign_latency_ms,"
           "psd_drops_benign,ap_max_queue,malicious_grants,max_bank,bank_limit,attack_success_rate";
}

std::string dos_csv_row(const SimMetrics& m) {
    return join(std::string(scenario_name(m.scenario)), to_string(m.n_ue), fixed(m.r_mal, 2), to_string(m.seed),
                to_string(m.n_malicious), to_string(m.n_benign), to_string(m.requests), to_string(m.n_q),
                to_string(m.n_d), to_string(m.n_d_malicious), fixed(m.t_q_ms, 3), to_string(m.max_queue_len),
                to_string(m.immediate), to_string(m.rejected_at_arrival), fixed(m.utilization, 4),
                to_string(m.benign_completed), to_string(m.benign_failed), fixed(m.benign_latency_ms, 3),
                to_string(m.psd_drops_benign), to_string(m.ap_max_queue), to_string(m.malicious_grants),
                to_string(m.max_bank), to_string(m.bank_limit), fixed(m.attack_success_rate, 4));
}

std::string hijack_csv_header() { return "honest_d,mal_d,w,trials,successes,rate"; }

std::string hijack_csv_row(const HijackCell& c) {
    return join(fixed(c.honest_d, 1), fixed(c.mal_d, 1), fixed(c.w, 1), to_string(c.trials), to_string(c.successes),
                fixed(c.rate(), 4));
}

std::string fraud_csv_header() { return "rounds,tolerance,guess,trials,accepted,rate,std_error"; }

std::string fraud_csv_row(const FraudResult& r) {
    char rate[32], se[32];
    std::snprintf(rate, sizeof rate, "%.6e", r.rate());
    std::snprintf(se, sizeof se, "%.6e", r.std_error());
    return join(to_string(r.rounds), fixed(r.tolerance, 3), fixed(r.guess, 3), to_string(r.trials),
                to_string(r.accepted), std::string(rate), std::string(se));
}

std::string dos_json(const std::vector<SimMetrics>& runs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : runs) {
        arr.push_back({{"scenario", scenario_name(m.scenario)},
                       {"n_ue", m.n_ue},
                       {"r_mal", m.r_mal},
                       {"seed", m.seed},
                       {"n_malicious", m.n_malicious},
                       {"n_benign", m.n_benign},
                       {"requests", m.requests},
                       {"n_q", m.n_q},
                       {"n_d", m.n_d},
                       {"n_d_malicious", m.n_d_malicious},
                       {"t_q_ms", m.t_q_ms},
                       {"max_queue_len", m.max_queue_len},
                       {"immediate", m.immediate},
                       {"rejected_at_arrival", m.rejected_at_arrival},
                       {"utilization", m.utilization},
                       {"benign_completed", m.benign_completed},
                       {"benign_failed", m.benign_failed},
                       {"benign_latency_ms", m.benign_latency_ms},
                       {"psd_drops_benign", m.psd_drops_benign},
                       {"ap_max_queue", m.ap_max_queue},
                       {"malicious_grants", m.malicious_grants},
                       {"max_bank", m.max_bank},
                       {"bank_limit", m.bank_limit},
                       {"attack_success_rate", m.attack_success_rate}});
    }
    nlohmann::ordered_json doc;
    doc["runs"] = std::move(arr);
    return doc.dump(2);
}

}  // namespace slapx::simnet
