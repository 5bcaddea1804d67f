#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

#include "slapx/crypto/rng.hpp"
#include "slapx/protocol/messages.hpp"
#include "slapx/protocol/spectrum_db.hpp"
#include "slapx/simnet/simnet.hpp"

namespace slapx::simnet {

using protocol::MessageType;

std::uint64_t precompute_limit(std::uint64_t kappa, double validity_s, double eval_rate) {
    if (kappa == 0) throw std::invalid_argument("precompute_limit: kappa must be positive");
    if (!(eval_rate > 0.0)) throw std::invalid_argument("precompute_limit: eval_rate must be positive");
    if (!(validity_s >= 0.0)) throw std::invalid_argument("precompute_limit: negative validity");
    // validity / (kappa / rate), with a small allowance so exact quotients are not floored down.
    return static_cast<std::uint64_t>(std::floor(validity_s * eval_rate / static_cast<double>(kappa) + 1e-9));
}

namespace {

struct BankItem {
    SimTime issued;       // puzzle issue time at the PSD
    std::int64_t window;  // TS window of the proof of location
};

struct Ue {
    double distance_m = 0.0;
    bool malicious = false;
    SimTime started = 0;
    std::int64_t event_window = -1;  // window of the last proof issued to this UE
    std::int64_t pending_window = -1;
    std::deque<BankItem> bank;
    bool producing = false;
};

class DosRun {
public:
    explicit DosRun(const ScenarioConfig& cfg)
        : cfg_(cfg),
          rng_(crypto::SeededRng(cfg.seed).fork("simnet/dos").next_u64()),
          ap_(clock_, "ap", cfg.ap_workers, 0),
          psd_(clock_, "psd", cfg.psd_workers, cfg.psd_capacity),
          server_(clock_, "server", cfg.workers, cfg.capacity),
          limit_(precompute_limit(cfg.kappa, cfg.validity_s, cfg.costs.vdf_eval_rate)),
          plain_request_bytes_(protocol::SpectrumQuery{}.encode().size()) {}

    SimMetrics run();

private:
    SimTime radio(const Ue& u, std::size_t payload) const {
        const double bits = 8.0 * static_cast<double>(wire_bytes(payload));
        return from_ms(cfg_.net.radio_latency_ms) + from_s(u.distance_m / cfg_.radio.propagation_speed) +
               from_s(bits / (cfg_.net.radio_rate_mbps * 1e6));
    }
    SimTime core(const Ue& u, std::size_t payload) const {
        const double bits = 8.0 * static_cast<double>(wire_bytes(payload));
        return radio(u, payload) + from_ms(cfg_.net.backhaul_ms) + from_s(bits / (cfg_.net.backhaul_gbps * 1e9));
    }
    std::size_t wire_bytes(std::size_t payload) const {
        const std::size_t framed = payload + protocol::kFrameHeaderBytes;
        const std::size_t per = cfg_.net.mtu - cfg_.net.header_bytes;
        return framed + (framed + per - 1) / per * cfg_.net.header_bytes;
    }
    static std::size_t budget(MessageType t) { return protocol::payload_budget(t); }

    std::int64_t window_at(SimTime t) const { return static_cast<std::int64_t>(std::floor(to_s(t) / cfg_.window_s)); }
    bool expired(const BankItem& b, SimTime now) const {
        return to_s(now - b.issued) > cfg_.validity_s ||
               to_s(now) - static_cast<double>(b.window) * cfg_.window_s > cfg_.validity_s;
    }
    bool attacking() const { return to_s(clock_.now()) < cfg_.attack_end_s; }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    // A protocol run: PoL at the AP, spectrum query at the PSD, VDF, service request.
    void start_run(std::uint32_t id);
    void at_ap(std::uint32_t id);
    void query(std::uint32_t id);
    void solved(std::uint32_t id, BankItem item);
    void send_service(std::uint32_t id, BankItem item);
    void run_ok(std::uint32_t id);
    void run_failed(std::uint32_t id);
    /// The service request itself failed; for a precompute attacker production goes on regardless.
    void service_failed(std::uint32_t id);

    void flood(std::uint32_t id, SimTime interval, std::size_t bytes, double cost_ms);
    void plain_request(std::uint32_t id);

    void bank(std::uint32_t id, BankItem item);
    void prune(Ue& u);
    void resume(std::uint32_t id);
    void flush(std::uint32_t id);

    const ScenarioConfig& cfg_;
    SimClock clock_;
    std::mt19937_64 rng_;
    ServerModel ap_;
    ServerModel psd_;
    ServerModel server_;
    std::uint64_t limit_;
    std::size_t plain_request_bytes_;
    std::vector<Ue> ues_;
    std::vector<std::uint32_t> drops_;

    int benign_completed_ = 0;
    int benign_failed_ = 0;
    SimTime benign_latency_ = 0;
    std::uint64_t malicious_grants_ = 0;
    std::size_t max_bank_ = 0;
};

void DosRun::start_run(std::uint32_t id) {
    auto& u = ues_[id];
    if (!u.malicious) u.started = clock_.now();
    clock_.after(from_ms(cfg_.costs.client_pol_ms) + radio(u, budget(MessageType::PolRequest)),
                 [this, id] { at_ap(id); });
}

void DosRun::at_ap(std::uint32_t id) {
    auto& u = ues_[id];
    const std::int64_t w = window_at(clock_.now());
    const bool repeat = u.malicious && u.event_window == w &&
                        !(cfg_.fresh_events || cfg_.scenario == Scenario::Precompute);
    if (repeat) {
        // Same event as before: the AP answers ALREADY_ISSUED.
        ap_.submit({from_ms(cfg_.costs.ap_reject_ms), true, id, [this, id] {
                        clock_.after(radio(ues_[id], budget(MessageType::PolResponse)), [this, id] { run_failed(id); });
                    }});
        return;
    }
    ap_.submit({from_ms(cfg_.costs.ap_ms), u.malicious, id, [this, id, w] {
                    ues_[id].event_window = w;
                    ues_[id].pending_window = w;
                    clock_.after(radio(ues_[id], budget(MessageType::PolResponse)), [this, id] { query(id); });
                }});
}

void DosRun::query(std::uint32_t id) {
    auto& u = ues_[id];
    clock_.after(from_ms(cfg_.costs.client_query_ms) + core(u, budget(MessageType::SpectrumRequest)), [this, id] {
        const auto admit = psd_.submit({from_ms(cfg_.costs.psd_ms), ues_[id].malicious, id, [this, id] {
                                            const BankItem item{clock_.now(), ues_[id].pending_window};
                                            clock_.after(core(ues_[id], budget(MessageType::SpectrumResponse)),
                                                         [this, id, item] { solved(id, item); });
                                        }});
        if (admit == ServerModel::Admit::Dropped) run_failed(id);
    });
}

void DosRun::solved(std::uint32_t id, BankItem item) {
    const SimTime work = from_s(cfg_.costs.eval_s(cfg_.kappa)) + from_ms(cfg_.costs.client_service_ms);
    if (cfg_.scenario == Scenario::Precompute && ues_[id].malicious) {
        clock_.after(work, [this, id, item] { bank(id, item); });
        return;
    }
    clock_.after(work, [this, id, item] { send_service(id, item); });
}

void DosRun::send_service(std::uint32_t id, BankItem item) {
    clock_.after(core(ues_[id], budget(MessageType::ServiceRequest)), [this, id, item] {
        const Job job{from_ms(cfg_.costs.server_ms), ues_[id].malicious, id, [this, id] {
                          clock_.after(core(ues_[id], budget(MessageType::ServiceResponse)), [this, id] { run_ok(id); });
                      }};
        if (expired(item, clock_.now())) {
            // Puzzle age and proof window are read from the request before any verification.
            server_.reject_at_arrival(job);
            service_failed(id);
            return;
        }
        if (server_.submit(job) == ServerModel::Admit::Dropped) {
            ++drops_[id];
            service_failed(id);
        }
    });
}

void DosRun::run_ok(std::uint32_t id) {
    auto& u = ues_[id];
    if (!u.malicious) {
        ++benign_completed_;
        benign_latency_ += clock_.now() - u.started;
        return;
    }
    ++malicious_grants_;
    if (cfg_.scenario == Scenario::FullProtocol && attacking()) start_run(id);
}

void DosRun::run_failed(std::uint32_t id) {
    if (!ues_[id].malicious) {
        ++benign_failed_;
        return;
    }
    if (cfg_.scenario == Scenario::FullProtocol && attacking()) start_run(id);
    if (cfg_.scenario == Scenario::Precompute) {
        ues_[id].producing = false;
        resume(id);
    }
}

void DosRun::service_failed(std::uint32_t id) {
    if (cfg_.scenario == Scenario::Precompute && ues_[id].malicious) return;
    run_failed(id);
}

void DosRun::flood(std::uint32_t id, SimTime interval, std::size_t bytes, double cost_ms) {
    if (!attacking()) return;
    clock_.after(core(ues_[id], bytes), [this, id, cost_ms] {
        if (server_.submit({from_ms(cost_ms), true, id, {}}) == ServerModel::Admit::Dropped) ++drops_[id];
    });
    clock_.after(interval, [this, id, interval, bytes, cost_ms] { flood(id, interval, bytes, cost_ms); });
}

void DosRun::plain_request(std::uint32_t id) {
    ues_[id].started = clock_.now();
    clock_.after(core(ues_[id], plain_request_bytes_), [this, id] {
        const Job job{from_ms(cfg_.costs.baseline_ms), false, id, [this, id] {
                          clock_.after(core(ues_[id], protocol::kRecordBytes), [this, id] { run_ok(id); });
                      }};
        if (server_.submit(job) == ServerModel::Admit::Dropped) {
            ++drops_[id];
            run_failed(id);
        }
    });
}

void DosRun::prune(Ue& u) {
    std::erase_if(u.bank, [&](const BankItem& b) { return expired(b, clock_.now()); });
}

void DosRun::bank(std::uint32_t id, BankItem item) {
    auto& u = ues_[id];
    u.producing = false;
    if (to_s(clock_.now()) >= cfg_.attack_start_s) {
        if (attacking()) send_service(id, item);
        resume(id);
        return;
    }
    prune(u);
    u.bank.push_back(item);
    if (u.bank.size() > limit_) throw std::logic_error("precompute: bank exceeds the validity bound");
    max_bank_ = std::max(max_bank_, u.bank.size());
    resume(id);
}

void DosRun::resume(std::uint32_t id) {
    auto& u = ues_[id];
    if (u.producing || !attacking()) return;
    prune(u);
    if (u.bank.size() >= limit_) {
        // Full: wait until the oldest item lapses or the attack opens.
        SimTime wake = from_s(cfg_.attack_start_s);
        if (!u.bank.empty()) wake = std::min(wake, u.bank.front().issued + from_s(cfg_.validity_s) + 1);
        wake = std::max(wake, clock_.now() + 1);
        clock_.at(wake, [this, id] { resume(id); });
        return;
    }
    u.producing = true;
    start_run(id);
}

void DosRun::flush(std::uint32_t id) {
    auto& u = ues_[id];
    prune(u);
    const SimTime gap = from_s(8.0 * static_cast<double>(wire_bytes(budget(MessageType::ServiceRequest))) /
                               (cfg_.net.radio_rate_mbps * 1e6));
    SimTime offset = 0;
    for (const auto& item : u.bank) {
        clock_.after(offset, [this, id, item] { send_service(id, item); });
        offset += gap;
    }
    u.bank.clear();
    resume(id);
}

SimMetrics DosRun::run() {
    cfg_.validate();
    if (cfg_.scenario == Scenario::Hijack || cfg_.scenario == Scenario::Fraud) {
        throw std::invalid_argument("run_dos: not a DoS scenario");
    }
    const int n_mal = cfg_.n_malicious();
    ues_.resize(static_cast<std::size_t>(cfg_.n_ue));
    drops_.assign(ues_.size(), 0);
    // Malicious UEs take the first n_mal slots.
    for (std::size_t i = 0; i < ues_.size(); ++i) {
        ues_[i].malicious = static_cast<int>(i) < n_mal;
        ues_[i].distance_m = uniform(1.0, cfg_.net.cell_radius_m);
    }

    const SimTime attack_start = from_s(cfg_.attack_start_s);
    for (std::uint32_t id = 0; id < ues_.size(); ++id) {
        const auto& u = ues_[id];
        if (!u.malicious) {
            const SimTime t = from_s(uniform(0.0, cfg_.duration_s));
            if (cfg_.scenario == Scenario::Baseline) {
                clock_.at(t, [this, id] { plain_request(id); });
            } else {
                clock_.at(t, [this, id] { start_run(id); });
            }
            continue;
        }
        switch (cfg_.scenario) {
            case Scenario::Baseline: {
                const SimTime iv = from_ms(cfg_.baseline_interval_ms);
                const SimTime t = attack_start + from_ms(uniform(0.0, cfg_.baseline_interval_ms));
                clock_.at(t, [this, id, iv] { flood(id, iv, plain_request_bytes_, cfg_.costs.baseline_ms); });
                break;
            }
            case Scenario::Bypass: {
                const SimTime iv = from_ms(cfg_.bypass_interval_ms);
                const SimTime t = attack_start + from_ms(uniform(0.0, cfg_.bypass_interval_ms));
                clock_.at(t, [this, id, iv] {
                    flood(id, iv, budget(MessageType::ServiceRequest), cfg_.costs.reject_ms);
                });
                break;
            }
            case Scenario::FullProtocol:
                clock_.at(attack_start + from_ms(uniform(0.0, 10.0)), [this, id] { start_run(id); });
                break;
            case Scenario::Precompute: {
                const double lead = std::min(cfg_.precompute_lead_s, cfg_.attack_start_s);
                clock_.at(from_s(cfg_.attack_start_s - lead) + from_ms(uniform(0.0, 10.0)),
                          [this, id] { resume(id); });
                clock_.at(attack_start, [this, id] { flush(id); });
                break;
            }
            default: break;
        }
    }
    clock_.run();

    const auto& s = server_.stats();
    if (!s.conserved()) throw std::logic_error("run_dos: request conservation violated");
    SimMetrics m;
    m.scenario = cfg_.scenario;
    m.n_ue = cfg_.n_ue;
    m.r_mal = cfg_.r_mal;
    m.seed = cfg_.seed;
    m.n_malicious = n_mal;
    m.n_benign = cfg_.n_ue - n_mal;
    m.requests = s.generated;
    m.n_q = s.enqueued;
    m.n_d = s.dropped_benign;
    m.n_d_malicious = s.dropped_malicious;
    m.immediate = s.immediate;
    m.rejected_at_arrival = s.rejected_at_arrival;
    m.t_q_ms = s.mean_wait_ms();
    m.max_queue_len = s.max_queue;
    const SimTime span = std::max<SimTime>(clock_.now(), from_s(cfg_.duration_s));
    m.utilization = static_cast<double>(s.busy_time) / (static_cast<double>(span) * cfg_.workers);
    m.benign_completed = benign_completed_;
    m.benign_failed = benign_failed_;
    m.benign_latency_ms = benign_completed_ ? to_ms(benign_latency_) / benign_completed_ : 0.0;
    m.psd_drops_benign = psd_.stats().dropped_benign;
    m.ap_max_queue = ap_.stats().max_queue;
    m.malicious_grants = malicious_grants_;
    m.max_bank = max_bank_;
    m.bank_limit = limit_;
    m.attack_success_rate = m.n_benign ? static_cast<double>(benign_failed_) / m.n_benign : 0.0;
    m.drops_by_ue = drops_;
    return m;
}

}  // namespace

SimMetrics run_dos(const ScenarioConfig& cfg) { return DosRun(cfg).run(); }

std::vector<SimMetrics> run_dos_grid(const ScenarioConfig& base, const std::vector<int>& n_ue,
                                     const std::vector<double>& r_mal) {
    std::vector<SimMetrics> out;
    for (int n : n_ue) {
        for (double r : r_mal) {
            ScenarioConfig c = base;
            c.n_ue = n;
            c.r_mal = r;
            out.push_back(run_dos(c));
        }
    }
    return out;
}

}  // namespace slapx::simnet
