#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "slapx/crypto/bignum.hpp"

namespace slapx::protocol {

using crypto::Bytes;
using crypto::ByteView;

struct Channel {
    std::uint32_t freq_khz = 0;
    double max_eirp_dbm = 0.0;  // stored in deci-dBm

    friend bool operator==(const Channel&, const Channel&) = default;
};

/// Availability for one grid cell. Encodes to exactly kRecordBytes.
struct SpectrumRecord {
    std::int32_t cell_x = 0;
    std::int32_t cell_y = 0;
    std::uint64_t valid_from = 0;
    std::uint64_t valid_to = 0;
    double max_tx_dbm = 0.0;
    std::uint8_t device_type_mask = 0xff;  // bit t set: device type t may operate
    std::vector<Channel> channels;

    friend bool operator==(const SpectrumRecord&, const SpectrumRecord&) = default;
};

inline constexpr std::size_t kRecordBytes = 560;
inline constexpr std::size_t kMaxChannels = 88;

/// cell(8) validity(16) max_tx(2) mask(1) count(1) channels(6 each, zero-filled to 88) checksum(4).
Bytes encode_record(const SpectrumRecord& r);
std::optional<SpectrumRecord> decode_record(ByteView in);

struct GridSpec {
    std::int32_t origin_x = 0;
    std::int32_t origin_y = 0;
    std::int32_t resolution_m = 50;
    std::int32_t width_m = 10000;
    std::int32_t height_m = 10000;

    std::int64_t columns() const { return width_m / resolution_m; }
    std::int64_t rows() const { return height_m / resolution_m; }
    void validate() const;
};

struct DeviceProfile {
    double tx_power_dbm = 30.0;
    std::uint8_t device_type = 0;
};

/// Geolocation database over a bounded grid. Records are synthesized per cell
/// from the seed unless loaded from a file.
class SpectrumDb {
public:
    static SpectrumDb synthetic(const GridSpec& grid, std::uint64_t seed, std::uint64_t valid_from = 0,
                                std::uint64_t valid_to = ~std::uint64_t{0});
    /// File: u32 header length, JSON header, then columns*rows records in row-major order.
    static SpectrumDb load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const GridSpec& grid() const { return grid_; }
    /// Enclosing cell corner. Throws ProtocolError(OutOfArea) outside the service area.
    std::pair<std::int32_t, std::int32_t> cell_of(double lx, double ly) const;
    SpectrumRecord record_at(std::int32_t cell_x, std::int32_t cell_y) const;
    /// Record of the enclosing cell with channels restricted to what the device may use.
    SpectrumRecord lookup(double lx, double ly, const DeviceProfile& device) const;

private:
    SpectrumDb(GridSpec grid, std::uint64_t seed, std::uint64_t from, std::uint64_t to)
        : grid_(grid), seed_(seed), valid_from_(from), valid_to_(to) {}
    SpectrumRecord synthesize(std::int32_t cx, std::int32_t cy) const;

    GridSpec grid_;
    std::uint64_t seed_ = 0;
    std::uint64_t valid_from_ = 0;
    std::uint64_t valid_to_ = 0;
    std::vector<SpectrumRecord> stored_;  // empty means synthesized on demand
};

}  // namespace slapx::protocol
