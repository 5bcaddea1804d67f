#pragma once

#include <cstdint>

namespace slapx::vdf {

enum class DeviceClass : std::uint8_t { Default = 0, HighPower = 1, Flagged = 2 };

/// Maps disclosed device attributes to a squaring count. Placeholder values, configurable.
struct DifficultyTable {
    std::uint64_t default_kappa = 1000;
    std::uint64_t high_power_kappa = 10000;
    std::uint64_t flagged_kappa = 80000;

    std::uint64_t kappa_for(DeviceClass c) const {
        switch (c) {
            case DeviceClass::HighPower: return high_power_kappa;
            case DeviceClass::Flagged: return flagged_kappa;
            case DeviceClass::Default: break;
        }
        return default_kappa;
    }
};

}  // namespace slapx::vdf
