#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "slapx/cli/fragmentation.hpp"
#include "slapx/cli/session.hpp"

using namespace slapx;
using namespace slapx::cli;
using protocol::MessageType;
using protocol::Reject;

namespace {

const crypto::RsaModulus& test_modulus() {
    static const crypto::RsaModulus m = [] {
        crypto::SeededRng rng(505);
        return crypto::rsa_setup(2048, rng);
    }();
    return m;
}

protocol::ModulusSource fixed_moduli() {
    return [] { return test_modulus(); };
}

Deployment two_devices() {
    auto d = Deployment::defaults(42);
    d.enroll({"ue-1", 23.0, 1, 1});
    d.enroll({"ue-2", 20.0, 2, 1});
    return d;
}

constexpr std::uint64_t kNow = (500 * 60 + 3) * 1000ull;

RunOptions opts(const std::string& device, std::uint64_t run_seed = 0) {
    RunOptions o;
    o.device = device;
    o.now_ms = kNow;
    o.run_seed = run_seed;
    return o;
}

std::size_t total_bytes(const RunResult& r, const std::string& phase) {
    for (const auto& p : r.phases) {
        if (p.phase == phase) return p.request_bytes + p.response_bytes;
    }
    FAIL("missing phase " << phase);
    return 0;
}

const std::map<MessageType, std::size_t> kBudget{
    {MessageType::PolRequest, 1040},      {MessageType::PolResponse, 1416},      {MessageType::NdRequest, 968},
    {MessageType::NdResponse, 976},       {MessageType::SpectrumRequest, 1556},  {MessageType::SpectrumResponse, 1460},
    {MessageType::ServiceRequest, 2452},  {MessageType::ServiceResponse, 260},
};

}  // namespace

TEST_CASE("exit codes map one to one onto reject codes") {
    std::set<int> seen;
    for (int v = 0; v < protocol::kRejectCount; ++v) {
        const auto r = static_cast<Reject>(v);
        const int code = exit_code(r);
        CHECK(code != kExitFailure);
        CHECK(code < 100);  // argument errors use 100 and above
        CHECK(seen.insert(code).second);
        CHECK(reject_for_exit(code) == r);
    }
    CHECK(exit_code(Reject::Ok) == 0);
    CHECK(exit_code(Reject::Linked) == 19);
    CHECK(exit_code(Reject::Expired) == 20);
    CHECK_FALSE(reject_for_exit(kExitFailure).has_value());
    CHECK_FALSE(reject_for_exit(10).has_value());
    CHECK_FALSE(reject_for_exit(10 + protocol::kRejectCount).has_value());
}

TEST_CASE("packet counts match a filling oracle across the MTU range") {
    for (std::size_t mtu = 576; mtu <= 9000; ++mtu) {
        for (const auto& [t, payload] : kBudget) {
            REQUIRE(packet_count(payload, mtu, 40) == oracle::packets_by_filling(payload, mtu, 40));
        }
    }
    CHECK(packet_count(2920, 1500, 40) == 2);
    CHECK(packet_count(2921, 1500, 40) == 3);
    CHECK(packet_count(0, 1500, 40) == 0);
    CHECK_THROWS_AS(packet_count(100, 40, 40), std::invalid_argument);
}

TEST_CASE("fragmentation at the common MTUs") {
    for (auto t : protocol::kAllMessageTypes) {
        INFO(protocol::message_name(t));
        const auto r = frag_row(t, 1500, 40);
        CHECK(r.payload == kBudget.at(t));
        const bool split = t == MessageType::SpectrumRequest || t == MessageType::ServiceRequest;
        CHECK(r.packets == (split ? 2u : 1u));
        CHECK(r.overhead == doctest::Approx(40.0 * r.packets / (40.0 * r.packets + r.payload)));
        CHECK(frag_row(t, 9000, 40).packets == 1);
    }
    CHECK(frag_row(MessageType::PolRequest, 1500, 40).overhead == doctest::Approx(40.0 / 1080.0));

    FragSweep s;
    const auto rows = fragmentation(s);
    CHECK(rows.size() == (9000 - 576 + 1) * 8);
    s.step = 1000;
    std::set<std::size_t> mtus;
    for (const auto& r : fragmentation(s)) mtus.insert(r.mtu);
    CHECK(mtus == std::set<std::size_t>{576, 1500, 1576, 2576, 3576, 4576, 5576, 6576, 7576, 8576, 9000});
}

TEST_CASE("fragmentation csv layout") {
    CHECK(frag_csv_header() == "mtu,message,payload_bytes,header_bytes,packets,overhead_ratio");
    CHECK(frag_csv_row(frag_row(MessageType::ServiceRequest, 1500, 40)) ==
          "1500,service_request,2452,40,2,0.031596");
}

TEST_CASE("deployment json round trip") {
    const auto d = two_devices();
    const auto back = Deployment::from_json(d.to_json());
    CHECK(back.to_json() == d.to_json());
    CHECK(back.seed == 42);
    REQUIRE(back.devices.size() == 2);
    CHECK(back.devices[1].device_type == 2);
    CHECK(back.devices[1].tx_power_dbm == 20.0);

    auto dup = d;
    CHECK_THROWS_AS(dup.enroll({"ue-1"}), std::invalid_argument);
    CHECK(dup.devices.size() == 2);
    CHECK_THROWS_AS(dup.enroll({"ap-4"}), std::invalid_argument);
    CHECK_THROWS_AS(Deployment::from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS(Deployment::from_json(R"({"seed":1,"aps":[{"id":"x","x":0,"y":0}],"ring":["ap-1"]})"),
                    std::invalid_argument);

    const auto path = std::filesystem::temp_directory_path() / "slapx-test-deployment.json";
    d.save(path);
    CHECK(Deployment::load(path).to_json() == d.to_json());
    std::filesystem::remove(path);
}

TEST_CASE("in-process run is granted with the wire budgets") {
    World w(two_devices(), fixed_moduli());
    const auto r = run_inproc(w, opts("ue-1"));
    CHECK(r.outcome == Reject::Ok);
    CHECK(r.detail.empty());
    REQUIRE(r.phases.size() == 3);
    CHECK(total_bytes(r, "pol_ap") == 2456);
    CHECK(total_bytes(r, "spectrum_query") == 3016);
    CHECK(total_bytes(r, "service_request") == 2712);
    CHECK(r.kappa >= 1000);
    CHECK(r.grant_id.size() == 32);

    auto o = opts("ue-2", 1);
    o.path = protocol::PolPath::NeighborDevice;
    const auto nd = run_inproc(w, o);
    CHECK(nd.outcome == Reject::Ok);
    CHECK(total_bytes(nd, "pol_nd") == 1944);
}

TEST_CASE("stages stop early") {
    World w(two_devices(), fixed_moduli());
    auto o = opts("ue-1");
    o.stop = Stage::Pol;
    CHECK(run_inproc(w, o).phases.size() == 1);
    o.stop = Stage::Query;
    o.run_seed = 1;
    // One proof of location per device and window.
    CHECK(run_inproc(w, o).outcome == Reject::AlreadyIssued);
    o.now_ms += 60000;
    const auto q = run_inproc(w, o);
    CHECK(q.outcome == Reject::Ok);
    CHECK(q.phases.size() == 2);
}

TEST_CASE("in-process rejections") {
    World w(two_devices(), fixed_moduli());

    SUBCASE("replayed proof of location is linked") {
        auto o = opts("ue-1");
        o.replay_as = "ue-2";
        const auto r = run_inproc(w, o);
        CHECK(r.outcome == Reject::Linked);
        CHECK(exit_code(r.outcome) == 19);
        CHECK(r.phases.back().phase == "replay_query");
    }
    SUBCASE("a query after the validity window expires") {
        auto o = opts("ue-1");
        o.delay_s = 61;
        const auto r = run_inproc(w, o);
        CHECK(r.outcome == Reject::Expired);
        CHECK(exit_code(r.outcome) == 20);
    }
    SUBCASE("far device fails distance bounding") {
        auto o = opts("ue-1");
        o.distance_m = 80;
        CHECK(run_inproc(w, o).outcome == Reject::OutsideProximity);
    }
    SUBCASE("unknown device") {
        CHECK_THROWS_AS(run_inproc(w, opts("ue-9")), std::invalid_argument);
    }
}

TEST_CASE("socket run against roles rebuilt from the deployment") {
    const auto d = two_devices();
    World roles(d, fixed_moduli());
    auto ap = serve_ap(roles, "ap-1", "127.0.0.1", 0);
    auto psd = serve_psd(roles, "127.0.0.1", 0);
    auto srv = serve_server(roles, "127.0.0.1", 0);
    World local(d, [] () -> crypto::RsaModulus { throw std::logic_error("client side never sets up a VDF"); });
    const Endpoints ep{"127.0.0.1", ap->port(), psd->port(), srv->port()};

    auto o = opts("ue-1");
    o.now_ms = 0;  // servers use the wall clock
    o.ap = "ap-1";
    const auto r = run_socket(local, o, ep);
    CHECK(r.outcome == Reject::Ok);
    CHECK(total_bytes(r, "pol_ap") == 2456);
    CHECK(total_bytes(r, "spectrum_query") == 3016);
    CHECK(total_bytes(r, "service_request") == 2712);

    o.device = "ue-2";
    o.distance_m = 70;
    CHECK(run_socket(local, o, ep).outcome == Reject::OutsideProximity);

    o.path = protocol::PolPath::NeighborDevice;
    CHECK_THROWS_AS(run_socket(local, o, ep), std::invalid_argument);
    o.path = protocol::PolPath::AccessPoint;
    o.delay_s = 1;
    CHECK_THROWS_AS(run_socket(local, o, ep), std::invalid_argument);
    CHECK(ap->sessions() >= 2);
}

TEST_CASE("run report layout") {
    CHECK(run_csv_header() == "phase,request_bytes,response_bytes,total_bytes,ms");
    RunResult r;
    r.phases = {{"pol_ap", 1040, 1416, 1.5}};
    r.outcome = Reject::OutsideProximity;
    std::ostringstream os;
    print_run(os, r);
    CHECK(os.str() ==
          "phase,request_bytes,response_bytes,total_bytes,ms\n"
          "pol_ap,1040,1416,2456,1.500\n"
          "total,,,2456,1.500\n"
          "OUTSIDE_PROXIMITY\n");
    r.outcome = Reject::Ok;
    r.grant_id = "ab";
    r.kappa = 1000;
    std::ostringstream ok;
    print_run(ok, r);
    CHECK(ok.str().find("GRANTED grant=ab kappa=1000\n") != std::string::npos);
}
