#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "slapx/bench/bench.hpp"
#include "slapx/cli/fragmentation.hpp"
#include "slapx/cli/session.hpp"
#include "slapx/simnet/simnet.hpp"

using namespace slapx;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

// --seed beats SLAPX_SEED, which beats the config file and the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SLAPX_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("SLAPX_SEED is not an unsigned integer: ") + env);
    }
    return fallback;
}

// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& operator*() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct SimFlags {
    std::string scenario;
    std::optional<int> n_ue;
    std::optional<double> r_mal;
    std::optional<std::uint64_t> kappa;
    std::string calibration;
    std::vector<std::string> sets;
    bool sweep = false;
    std::vector<int> n_ue_list;
    std::vector<double> r_mal_list;
    std::string format = "csv";
    std::string out;
    bool no_header = false;

    // spoof
    std::string attack;
    std::optional<int> rounds;
    std::optional<double> tolerance;
    std::optional<double> guess;
    std::optional<std::uint64_t> trials;
    bool noiseless = false;
    std::optional<double> relay_delay_ns;
};

simnet::ScenarioConfig build_config(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                                    const SimFlags& f) {
    simnet::ScenarioConfig cfg;
    if (!config_path.empty()) simnet::apply_config_file(cfg, config_path);
    if (!f.calibration.empty()) simnet::load_calibration(cfg.costs, f.calibration);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
        simnet::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!f.scenario.empty()) cfg.scenario = simnet::parse_scenario(f.scenario);
    if (f.n_ue) cfg.n_ue = *f.n_ue;
    if (f.r_mal) cfg.r_mal = *f.r_mal;
    if (f.kappa) cfg.kappa = *f.kappa;
    if (f.rounds) cfg.rounds = *f.rounds;
    if (f.tolerance) cfg.tolerance = *f.tolerance;
    if (f.guess) cfg.guess = *f.guess;
    if (f.relay_delay_ns) cfg.relay_delay_ns = *f.relay_delay_ns;
    if (f.noiseless) cfg.noiseless = true;
    cfg.seed = resolve_seed(seed, cfg.seed);
    cfg.validate();
    return cfg;
}

int simulate_dos(simnet::ScenarioConfig cfg, const SimFlags& f) {
    using simnet::Scenario;
    if (cfg.scenario == Scenario::Hijack || cfg.scenario == Scenario::Fraud) {
        throw std::invalid_argument("simulate dos takes baseline, full, bypass or precompute");
    }
    std::vector<simnet::SimMetrics> runs;
    if (f.sweep || !f.n_ue_list.empty() || !f.r_mal_list.empty()) {
        const auto n = f.n_ue_list.empty() ? std::vector<int>{50, 100, 150, 200, 250} : f.n_ue_list;
        const auto r = f.r_mal_list.empty() ? std::vector<double>{0.2, 0.3, 0.4} : f.r_mal_list;
        runs = simnet::run_dos_grid(cfg, n, r);
    } else {
        runs.push_back(simnet::run_dos(cfg));
    }
    Output out(f.out);
    if (f.format == "json") {
        *out << simnet::dos_json(runs);
    } else {
        if (!f.no_header) *out << simnet::dos_csv_header() << '\n';
        for (const auto& m : runs) *out << simnet::dos_csv_row(m) << '\n';
    }
    return 0;
}

int simulate_spoof(simnet::ScenarioConfig cfg, const SimFlags& f) {
    Output out(f.out);
    if (f.attack == "hijack") {
        if (f.trials) cfg.hijack_trials = static_cast<int>(*f.trials);
        cfg.validate();
        if (!f.no_header) *out << simnet::hijack_csv_header() << '\n';
        for (const auto& c : simnet::run_hijack(cfg)) *out << simnet::hijack_csv_row(c) << '\n';
        return 0;
    }
    if (f.trials) cfg.fraud_trials = *f.trials;
    if (!f.no_header) *out << simnet::fraud_csv_header() << '\n';
    if (!f.sweep) {
        *out << simnet::fraud_csv_row(simnet::run_fraud(cfg)) << '\n';
        return 0;
    }
    for (int n : {20, 50, 100}) {
        for (double tol : {0.0, 0.1, 0.2}) {
            for (double g : {0.5, 0.7, 0.9}) {
                cfg.rounds = n;
                cfg.tolerance = tol;
                cfg.guess = g;
                *out << simnet::fraud_csv_row(simnet::run_fraud(cfg)) << '\n';
            }
        }
    }
    return 0;
}

struct RunFlags {
    std::string state = "slapx-deployment.json";
    std::string device;
    std::string path = "ap";
    std::string ap;
    double distance = 20.0;
    std::optional<double> lx, ly;
    std::uint64_t now_ms = 0;
    double delay_s = 0.0;
    std::string replay_as;
    std::string message = "hello";
    std::uint16_t channel = 21;
    std::uint64_t run_seed = 0;
    std::string transport = "inproc";
    cli::Endpoints ep{"127.0.0.1", 7401, 7402, 7403};
};

void add_run_options(CLI::App* c, RunFlags& f) {
    c->add_option("--state", f.state, "Deployment file")->capture_default_str();
    c->add_option("--device", f.device, "Enrolled device id")->required();
    c->add_option("--path", f.path, "Proof of location via ap or nd")->check(CLI::IsMember({"ap", "nd"}))->capture_default_str();
    c->add_option("--ap", f.ap, "AP id (default: nearest to the claim)");
    c->add_option("--distance", f.distance, "Physical distance to the AP or ND in meters")->capture_default_str();
    c->add_option("--lx", f.lx, "Claimed x coordinate");
    c->add_option("--ly", f.ly, "Claimed y coordinate");
    c->add_option("--now-ms", f.now_ms, "Protocol time in unix ms (0: wall clock)")->capture_default_str();
    c->add_option("--delay-s", f.delay_s, "Wait between proof of location and spectrum query")->capture_default_str();
    c->add_option("--replay-as", f.replay_as, "Device that replays the proof of location after the query");
    c->add_option("--message", f.message, "Service message")->capture_default_str();
    c->add_option("--channel", f.channel, "Requested channel")->capture_default_str();
    c->add_option("--run-seed", f.run_seed, "Per-run randomness")->capture_default_str();
    c->add_option("--transport", f.transport, "inproc or socket")->check(CLI::IsMember({"inproc", "socket"}))->capture_default_str();
    c->add_option("--host", f.ep.host, "Role listener host")->capture_default_str();
    c->add_option("--ap-port", f.ep.ap_port, "AP listener port")->capture_default_str();
    c->add_option("--psd-port", f.ep.psd_port, "PSD listener port")->capture_default_str();
    c->add_option("--server-port", f.ep.server_port, "Service server listener port")->capture_default_str();
}

int run_client(const RunFlags& f, cli::Stage stage) {
    cli::RunOptions o;
    o.device = f.device;
    o.stop = stage;
    o.path = f.path == "nd" ? protocol::PolPath::NeighborDevice : protocol::PolPath::AccessPoint;
    o.ap = f.ap;
    o.distance_m = f.distance;
    o.lx = f.lx;
    o.ly = f.ly;
    o.now_ms = f.now_ms;
    o.delay_s = f.delay_s;
    o.replay_as = f.replay_as;
    o.message = f.message;
    o.channel = f.channel;
    o.run_seed = f.run_seed;
    if (f.transport == "socket" && o.ap.empty()) o.ap = "ap-1";

    cli::World world(cli::Deployment::load(f.state));
    const auto res = f.transport == "socket" ? cli::run_socket(world, o, f.ep) : cli::run_inproc(world, o);
    cli::print_run(std::cout, res);
    return cli::exit_code(res.outcome);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slapx: location-verified spectrum access with anonymous credentials and client puzzles"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed and --config are accepted after the subcommand
    std::string config_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Scenario file (key = value) for simulate");
    app.add_option("--seed", seed, "RNG seed; overrides SLAPX_SEED");

    // keygen / enroll
    std::string state = "slapx-deployment.json";
    int modulus_bits = 2048;
    bool force = false;
    auto* keygen = app.add_subcommand("keygen", "Create a deployment: authority, AP ring, ND and PSD keys");
    keygen->add_option("--state", state, "Deployment file")->capture_default_str();
    keygen->add_option("--modulus-bits", modulus_bits, "VDF modulus size")->capture_default_str();
    keygen->add_flag("--force", force, "Overwrite an existing file");

    cli::DeviceSpec dev;
    int device_type = dev.device_type;
    auto* enroll = app.add_subcommand("enroll", "Issue a root credential to a device");
    enroll->add_option("--state", state, "Deployment file")->capture_default_str();
    enroll->add_option("--id", dev.id, "Device id (at most 16 bytes)")->required();
    enroll->add_option("--tx-power", dev.tx_power_dbm, "Tx power in dBm")->capture_default_str();
    enroll->add_option("--device-type", device_type, "Device type")->check(CLI::Range(0, 255))->capture_default_str();
    enroll->add_option("--max-level", dev.max_level, "2 grants delegation rights")->check(CLI::Range(1, 2))->capture_default_str();

    // protocol runs
    RunFlags pol_f, query_f, service_f, demo_f;
    auto* pol = app.add_subcommand("pol", "Obtain a proof of location");
    add_run_options(pol, pol_f);
    auto* query = app.add_subcommand("query", "Proof of location, then a spectrum query");
    add_run_options(query, query_f);
    auto* service = app.add_subcommand("service", "Full run: proof of location, spectrum query and service request");
    add_run_options(service, service_f);

    auto* demo = app.add_subcommand("demo", "Full run on a fresh deployment with one device");
    demo->add_option("--transport", demo_f.transport, "inproc or socket")->check(CLI::IsMember({"inproc", "socket"}))->capture_default_str();
    demo->add_option("--modulus-bits", modulus_bits, "VDF modulus size")->capture_default_str();
    demo->add_option("--path", demo_f.path, "ap or nd")->check(CLI::IsMember({"ap", "nd"}))->capture_default_str();

    // serve
    std::string role = "all";
    std::string serve_ap_id = "ap-1";
    cli::Endpoints serve_ep{"127.0.0.1", 7401, 7402, 7403};
    double serve_for = 0.0;
    auto* serve = app.add_subcommand("serve", "Run role listeners over TCP");
    serve->add_option("--state", state, "Deployment file")->capture_default_str();
    serve->add_option("--role", role, "all, ap, psd or server")->check(CLI::IsMember({"all", "ap", "psd", "server"}))->capture_default_str();
    serve->add_option("--ap", serve_ap_id, "AP to serve")->capture_default_str();
    serve->add_option("--host", serve_ep.host, "Listen address")->capture_default_str();
    serve->add_option("--ap-port", serve_ep.ap_port, "AP port")->capture_default_str();
    serve->add_option("--psd-port", serve_ep.psd_port, "PSD port")->capture_default_str();
    serve->add_option("--server-port", serve_ep.server_port, "Service server port")->capture_default_str();
    serve->add_option("--for-s", serve_for, "Stop after this many seconds (0: until interrupted)")->capture_default_str();

    // simulate
    SimFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Discrete-event attack simulations");
    simulate->require_subcommand(1);
    auto* dos = simulate->add_subcommand("dos", "Denial-of-service scenarios");
    dos->add_option("--scenario", sim.scenario, "baseline, full, bypass or precompute")
        ->check(CLI::IsMember({"baseline", "full", "full_protocol", "bypass", "precompute"}));
    dos->add_option("--n-ue", sim.n_ue, "Number of UEs");
    dos->add_option("--r-mal", sim.r_mal, "Malicious fraction");
    dos->add_option("--kappa", sim.kappa, "Puzzle difficulty for attackers");
    dos->add_flag("--sweep", sim.sweep, "Run the N_U x r_mal grid");
    dos->add_option("--n-ue-list", sim.n_ue_list, "Sweep values for N_U")->delimiter(',');
    dos->add_option("--r-mal-list", sim.r_mal_list, "Sweep values for r_mal")->delimiter(',');
    dos->add_option("--format", sim.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    for (auto* c : {dos}) {
        c->add_option("--calibration", sim.calibration, "Cost file written by bench --calibrate");
        c->add_option("--set", sim.sets, "Override one config key (key=value)");
        c->add_option("--out", sim.out, "Write to a file instead of stdout");
        c->add_flag("--no-header", sim.no_header, "Omit the CSV header");
    }
    auto* spoof = simulate->add_subcommand("spoof", "Location spoofing attacks");
    spoof->add_option("--attack", sim.attack, "fraud or hijack")->required()->check(CLI::IsMember({"fraud", "hijack"}));
    spoof->add_option("--rounds", sim.rounds, "Bit-exchange rounds");
    spoof->add_option("--tolerance", sim.tolerance, "Fraction of rounds allowed to fail");
    spoof->add_option("--guess", sim.guess, "Probability the early reply uses the right challenge");
    spoof->add_option("--trials", sim.trials, "Monte Carlo trials (per cell for hijack)");
    spoof->add_flag("--sweep", sim.sweep, "Fraud: n x tolerance x guess grid");
    spoof->add_flag("--noiseless", sim.noiseless, "Hijack: no shadowing");
    spoof->add_option("--relay-delay-ns", sim.relay_delay_ns, "Hijack: relay processing delay");
    spoof->add_option("--set", sim.sets, "Override one config key (key=value)");
    spoof->add_option("--out", sim.out, "Write to a file instead of stdout");
    spoof->add_flag("--no-header", sim.no_header, "Omit the CSV header");

    // bench
    bench::BenchOptions bo;
    std::string bench_format = "both";
    std::string calibrate_path;
    auto* bench_cmd = app.add_subcommand("bench", "Time the primitives and protocol phases");
    bench_cmd->add_option("--iterations", bo.iterations, "Samples per op (>= 30)")->capture_default_str();
    bench_cmd->add_option("--vdf-iterations", bo.vdf_iterations, "Samples for VDF setup and eval (0: --iterations)")->capture_default_str();
    bench_cmd->add_option("--kappas", bo.kappas, "VDF difficulty grid")->delimiter(',');
    bench_cmd->add_option("--modulus-bits", bo.modulus_bits, "VDF modulus size")->capture_default_str();
    bench_cmd->add_option("--format", bench_format, "csv, table or both")->check(CLI::IsMember({"csv", "table", "both"}))->capture_default_str();
    bench_cmd->add_option("--calibrate", calibrate_path, "Write simulator costs to this file");

    // fragmentation
    cli::FragSweep fs;
    fs.step = 100;
    std::vector<std::size_t> mtus;
    std::string frag_out;
    auto* frag = app.add_subcommand("fragmentation", "Packets per message across an MTU sweep");
    frag->add_option("--mtu-min", fs.mtu_min, "Smallest MTU")->capture_default_str();
    frag->add_option("--mtu-max", fs.mtu_max, "Largest MTU")->capture_default_str();
    frag->add_option("--step", fs.step, "MTU step (1500 is always included)")->capture_default_str();
    frag->add_option("--header", fs.header_bytes, "Header bytes per packet")->capture_default_str();
    frag->add_option("--mtu", mtus, "Only these MTUs")->delimiter(',');
    frag->add_option("--out", frag_out, "Write to a file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen) {
            if (!force && std::ifstream(state)) throw std::runtime_error(state + " exists; pass --force to replace it");
            auto d = cli::Deployment::defaults(resolve_seed(seed, 1));
            d.modulus_bits = modulus_bits;
            d.validate();
            d.save(state);
            std::cout << "wrote " << state << " (seed " << d.seed << ", " << d.aps.size() << " APs, ring of "
                      << d.ring.size() << ", " << d.nds.size() << " ND)\n";
            return 0;
        }
        if (*enroll) {
            auto d = cli::Deployment::load(state);
            dev.device_type = static_cast<std::uint8_t>(device_type);
            d.enroll(dev);
            // Building the world checks that the credential can be issued.
            cli::World w(d, [] () -> crypto::RsaModulus { throw std::logic_error("no moduli needed"); });
            d.save(state);
            std::cout << "enrolled " << dev.id << " (" << d.devices.size() << " devices)\n";
            return 0;
        }
        if (*pol) return run_client(pol_f, cli::Stage::Pol);
        if (*query) return run_client(query_f, cli::Stage::Query);
        if (*service) return run_client(service_f, cli::Stage::Service);
        if (*demo) {
            auto d = cli::Deployment::defaults(resolve_seed(seed, 1));
            d.modulus_bits = modulus_bits;
            d.enroll({"demo-ue", 23.0, 1, 1});
            cli::RunOptions o;
            o.device = "demo-ue";
            o.path = demo_f.path == "nd" ? protocol::PolPath::NeighborDevice : protocol::PolPath::AccessPoint;
            o.distance_m = 20.0;
            cli::RunResult res;
            if (demo_f.transport == "socket") {
                if (o.path == protocol::PolPath::NeighborDevice) throw std::invalid_argument("the ND path runs in-process only");
                // Roles and client each rebuild the deployment, as separate processes would.
                cli::World roles(d);
                auto ap = cli::serve_ap(roles, "ap-1", "127.0.0.1", 0);
                auto psd = cli::serve_psd(roles, "127.0.0.1", 0);
                auto srv = cli::serve_server(roles, "127.0.0.1", 0);
                cli::World local(d, [] () -> crypto::RsaModulus { throw std::logic_error("client never sets up a VDF"); });
                o.ap = "ap-1";
                res = cli::run_socket(local, o, {"127.0.0.1", ap->port(), psd->port(), srv->port()});
            } else {
                cli::World w(d);
                res = cli::run_inproc(w, o);
            }
            cli::print_run(std::cout, res);
            return cli::exit_code(res.outcome);
        }
        if (*serve) {
            cli::World w(cli::Deployment::load(state));
            std::unique_ptr<cli::FrameServer> ap, psd, srv;
            if (role == "all" || role == "ap") ap = cli::serve_ap(w, serve_ap_id, serve_ep.host, serve_ep.ap_port);
            if (role == "all" || role == "psd") psd = cli::serve_psd(w, serve_ep.host, serve_ep.psd_port);
            if (role == "all" || role == "server") srv = cli::serve_server(w, serve_ep.host, serve_ep.server_port);
            std::cout << "listening";
            if (ap) std::cout << " ap=" << ap->port();
            if (psd) std::cout << " psd=" << psd->port();
            if (srv) std::cout << " server=" << srv->port();
            std::cout << std::endl;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(serve_for);
            while (!g_stop && (serve_for <= 0 || std::chrono::steady_clock::now() < until)) {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            return 0;
        }
        if (*dos) return simulate_dos(build_config(config_path, seed, sim), sim);
        if (*spoof) return simulate_spoof(build_config(config_path, seed, sim), sim);
        if (*bench_cmd) {
            bo.seed = resolve_seed(seed, bo.seed);
            bo.progress = [](const std::string& s) { std::cerr << "bench: " << s << '\n'; };
            const auto r = bench::bench_all(bo);
            if (bench_format != "table") bench::write_csv(std::cout, r);
            if (bench_format == "both") std::cout << '\n';
            if (bench_format != "csv") bench::write_table(std::cout, r);
            if (!calibrate_path.empty()) {
                std::ofstream out(calibrate_path);
                if (!out) throw std::runtime_error("cannot write " + calibrate_path);
                out << "# host: " << r.host << '\n';
                simnet::save_calibration(bench::calibrate(r), out);
                std::cerr << "bench: wrote " << calibrate_path << '\n';
            }
            return 0;
        }
        if (*frag) {
            std::vector<cli::FragRow> rows;
            if (!mtus.empty()) {
                for (auto m : mtus) {
                    for (auto t : protocol::kAllMessageTypes) rows.push_back(cli::frag_row(t, m, fs.header_bytes));
                }
            } else {
                rows = cli::fragmentation(fs);
            }
            Output out(frag_out);
            *out << cli::frag_csv_header() << '\n';
            for (const auto& r : rows) *out << cli::frag_csv_row(r) << '\n';
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitFailure;
    }
    return 0;
}
