#include "slapx/cli/deployment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slapx::cli {

using nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t seed, const std::string& label) {
    return crypto::SeededRng(seed).fork(label).next_u64();
}

namespace {

dac::AttributeSet device_attrs(const DeviceSpec& d) {
    return {dac::attr_device_id(d.id), dac::attr_tx_power(d.tx_power_dbm), dac::attr_device_type(d.device_type),
            dac::attr_validity(0, 4000000000ull)};
}

Enrolled enroll_one(protocol::Authority& auth, std::uint64_t seed, const DeviceSpec& d) {
    crypto::SeededRng rng(derive_seed(seed, "device/" + d.id));
    auto key = dac::dac_keygen(auth.directory().registry.params(), rng);
    auto cred = auth.enroll(key, device_attrs(d), d.max_level);
    return {std::move(key), std::move(cred)};
}

ordered_json spec_json(const ApSpec& a) { return {{"id", a.id}, {"x", a.x}, {"y", a.y}}; }

ApSpec spec_from(const ordered_json& j) { return {j.at("id").get<std::string>(), j.at("x").get<double>(), j.at("y").get<double>()}; }

}  // namespace

Deployment Deployment::defaults(std::uint64_t seed) {
    Deployment d;
    d.seed = seed;
    d.aps = {{"ap-1", 1000, 1000}, {"ap-2", 1100, 1000}, {"ap-3", 1000, 1100}};
    d.ring = {"ap-1", "ap-2", "ap-3", "ap-4"};
    d.nds = {{"nd-1", 2000, 2000}};
    return d;
}

void Deployment::validate() const {
    std::set<std::string> ids;
    auto unique = [&](const std::string& id) {
        if (id.empty() || !ids.insert(id).second) throw std::invalid_argument("deployment: duplicate or empty id '" + id + "'");
    };
    std::set<std::string> in_ring(ring.begin(), ring.end());
    if (in_ring.size() != ring.size()) throw std::invalid_argument("deployment: duplicate ring member");
    for (const auto& a : aps) {
        unique(a.id);
        if (!in_ring.count(a.id)) throw std::invalid_argument("deployment: AP " + a.id + " is not in the ring");
    }
    for (const auto& r : ring) {
        if (!ids.count(r)) unique(r);
    }
    for (const auto& n : nds) unique(n.id);
    for (const auto& d : devices) {
        unique(d.id);
        if (d.max_level < 1 || d.max_level > 2) throw std::invalid_argument("deployment: max_level must be 1 or 2");
    }
    if (aps.empty()) throw std::invalid_argument("deployment: no APs");
    if (fillers < 0) throw std::invalid_argument("deployment: negative filler count");
    if (modulus_bits < crypto::kMinModulusBits) throw std::invalid_argument("deployment: modulus too small");
}

void Deployment::enroll(DeviceSpec d) {
    devices.push_back(std::move(d));
    try {
        validate();
    } catch (...) {
        devices.pop_back();
        throw;
    }
}

std::string Deployment::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["modulus_bits"] = modulus_bits;
    j["fillers"] = fillers;
    j["aps"] = ordered_json::array();
    for (const auto& a : aps) j["aps"].push_back(spec_json(a));
    j["ring"] = ring;
    j["nds"] = ordered_json::array();
    for (const auto& n : nds) j["nds"].push_back(spec_json(n));
    j["devices"] = ordered_json::array();
    for (const auto& d : devices) {
        j["devices"].push_back({{"id", d.id},
                                {"tx_power_dbm", d.tx_power_dbm},
                                {"device_type", d.device_type},
                                {"max_level", d.max_level}});
    }
    return j.dump(2) + "\n";
}

Deployment Deployment::from_json(const std::string& text) {
    Deployment d;
    try {
        const auto j = ordered_json::parse(text);
        d.seed = j.at("seed").get<std::uint64_t>();
        d.modulus_bits = j.value("modulus_bits", 2048);
        d.fillers = j.value("fillers", 6);
        for (const auto& a : j.at("aps")) d.aps.push_back(spec_from(a));
        d.ring = j.at("ring").get<std::vector<std::string>>();
        for (const auto& n : j.value("nds", ordered_json::array())) d.nds.push_back(spec_from(n));
        for (const auto& x : j.value("devices", ordered_json::array())) {
            d.devices.push_back({x.at("id").get<std::string>(), x.value("tx_power_dbm", 23.0),
                                 x.value<std::uint8_t>("device_type", 1), x.value("max_level", 1)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("deployment: ") + e.what());
    }
    d.validate();
    return d;
}

void Deployment::save(const std::filesystem::path& p) const {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("deployment: cannot write " + p.string());
    out << to_json();
}

Deployment Deployment::load(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("deployment: cannot read " + p.string());
    std::stringstream s;
    s << in.rdbuf();
    return from_json(s.str());
}

World::World(Deployment d, protocol::ModulusSource moduli)
    : dep_((d.validate(), std::move(d))), auth_(protocol::ProtocolConfig{}, dep_.seed) {
    const std::uint64_t seed = dep_.seed;
    for (const auto& id : dep_.ring) auth_.enroll_ap(id);
    for (int i = 0; i < dep_.fillers; ++i) {
        enroll_one(auth_, seed, {"filler-" + std::to_string(i), 23.0, 1, 1});
    }
    for (const auto& dev : dep_.devices) devices_.emplace(dev.id, enroll_one(auth_, seed, dev));
    for (const auto& a : dep_.aps) {
        aps_.emplace(a.id, std::make_unique<protocol::AccessPoint>(directory(), auth_.enroll_ap(a.id), dep_.ring, a.x,
                                                                   a.y, derive_seed(seed, "ap/" + a.id)));
    }
    for (const auto& n : dep_.nds) {
        auto e = enroll_one(auth_, seed, {n.id, 23.0, 1, 2});
        nds_.push_back(std::make_unique<protocol::NeighborDevice>(directory(), std::move(e.key), std::move(e.cred), n.x,
                                                                  n.y, derive_seed(seed, "nd/" + n.id)));
    }
    if (!moduli) {
        pool_ = std::make_unique<vdf::ModulusPool>(dep_.modulus_bits, 2, derive_seed(seed, "moduli"));
        moduli = [pool = pool_.get()] { return pool->take(); };
    }
    psd_ = std::make_unique<protocol::Psd>(directory(), protocol::SpectrumDb::synthetic(protocol::GridSpec{}, seed),
                                           std::move(moduli), derive_seed(seed, "psd"));
    server_ = std::make_unique<protocol::ServiceServer>(directory(), psd_->public_key());
}

World::~World() = default;

protocol::AccessPoint& World::ap(const std::string& id) {
    const auto it = aps_.find(id);
    if (it == aps_.end()) throw std::invalid_argument("unknown AP " + id);
    return *it->second;
}

protocol::AccessPoint& World::nearest_ap(double x, double y) {
    protocol::AccessPoint* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& a : dep_.aps) {
        const double d = std::hypot(a.x - x, a.y - y);
        if (d < best_d) {
            best_d = d;
            best = aps_.at(a.id).get();
        }
    }
    return *best;
}

protocol::NeighborDevice& World::nd(std::size_t i) {
    if (i >= nds_.size()) throw std::invalid_argument("no neighbor device " + std::to_string(i));
    return *nds_[i];
}

protocol::Client World::client(const std::string& device, std::uint64_t run_seed) const {
    const auto it = devices_.find(device);
    if (it == devices_.end()) throw std::invalid_argument("device " + device + " is not enrolled");
    return protocol::Client(auth_.directory(), it->second.key, it->second.cred,
                            derive_seed(dep_.seed, "run/" + device + "/" + std::to_string(run_seed)));
}

}  // namespace slapx::cli
