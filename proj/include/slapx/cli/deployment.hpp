#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "slapx/protocol/roles.hpp"
#include "slapx/vdf/pool.hpp"

namespace slapx::cli {

struct ApSpec {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

struct DeviceSpec {
    std::string id;
    double tx_power_dbm = 23.0;
    std::uint8_t device_type = 1;
    int max_level = 1;
};

/// Everything the roles derive their keys from. Rebuilding a World from the same
/// deployment in another process yields the same keys, registry and beacons.
struct Deployment {
    std::uint64_t seed = 1;
    int modulus_bits = 2048;
    std::vector<ApSpec> aps;
    /// AP ring; ids not in `aps` are enrolled but not deployed.
    std::vector<std::string> ring;
    /// Neighbor devices, enrolled with delegation rights.
    std::vector<ApSpec> nds;
    std::vector<DeviceSpec> devices;
    int fillers = 6;

    /// Three APs 100 m apart, a four-member ring, one ND and no devices.
    static Deployment defaults(std::uint64_t seed);
    /// Throws std::invalid_argument on duplicate ids or an unknown AP.
    void validate() const;
    /// Appends a device; throws std::invalid_argument if the id is taken.
    void enroll(DeviceSpec d);

    std::string to_json() const;
    static Deployment from_json(const std::string& text);
    void save(const std::filesystem::path& p) const;
    static Deployment load(const std::filesystem::path& p);
};

struct Enrolled {
    dac::UserKey key;
    dac::Credential cred;
};

/// All roles of one deployment in one process.
class World {
public:
    /// Moduli come from `moduli`; pass nullptr to draw them from a pool seeded from the deployment.
    explicit World(Deployment d, protocol::ModulusSource moduli = nullptr);
    ~World();
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    const Deployment& deployment() const { return dep_; }
    protocol::Authority& authority() { return auth_; }
    protocol::Directory& directory() { return auth_.directory(); }
    protocol::AccessPoint& ap(const std::string& id);
    /// AP closest to (x, y).
    protocol::AccessPoint& nearest_ap(double x, double y);
    protocol::NeighborDevice& nd(std::size_t i = 0);
    protocol::Psd& psd() { return *psd_; }
    protocol::ServiceServer& server() { return *server_; }

    /// Client for an enrolled device. Each run seed gives independent randomness.
    protocol::Client client(const std::string& device, std::uint64_t run_seed) const;

private:
    Deployment dep_;
    protocol::Authority auth_;
    std::unique_ptr<vdf::ModulusPool> pool_;
    std::map<std::string, Enrolled> devices_;
    std::map<std::string, std::unique_ptr<protocol::AccessPoint>> aps_;
    std::vector<std::unique_ptr<protocol::NeighborDevice>> nds_;
    std::unique_ptr<protocol::Psd> psd_;
    std::unique_ptr<protocol::ServiceServer> server_;
};

std::uint64_t derive_seed(std::uint64_t seed, const std::string& label);

}  // namespace slapx::cli
