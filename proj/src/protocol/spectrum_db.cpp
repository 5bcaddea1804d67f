#include "slapx/protocol/spectrum_db.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "slapx/crypto/codec.hpp"
#include "slapx/crypto/hash.hpp"
#include "slapx/crypto/rng.hpp"
#include "slapx/protocol/reject.hpp"

namespace slapx::protocol {

namespace {

using crypto::ByteReader;
using crypto::ByteWriter;

constexpr std::size_t kChecksumBytes = 4;
constexpr std::size_t kBodyBytes = kRecordBytes - kChecksumBytes;

std::int16_t to_deci(double dbm) {
    const double v = std::round(dbm * 10.0);
    if (v < -32768.0 || v > 32767.0) throw std::out_of_range("spectrum record: power out of range");
    return static_cast<std::int16_t>(v);
}

// TV white space: 6 MHz channels from 470 MHz.
constexpr std::uint32_t kBaseKhz = 470000;
constexpr std::uint32_t kStepKhz = 6000;
constexpr int kBandChannels = 38;

}  // namespace

Bytes encode_record(const SpectrumRecord& r) {
    if (r.channels.size() > kMaxChannels) throw std::length_error("spectrum record: too many channels");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(r.cell_x)).u32(static_cast<std::uint32_t>(r.cell_y));
    w.u64(r.valid_from).u64(r.valid_to);
    w.u16(static_cast<std::uint16_t>(to_deci(r.max_tx_dbm)));
    w.u8(r.device_type_mask).u8(static_cast<std::uint8_t>(r.channels.size()));
    for (const auto& c : r.channels) w.u32(c.freq_khz).u16(static_cast<std::uint16_t>(to_deci(c.max_eirp_dbm)));
    w.zeros(kBodyBytes - w.size());
    const auto d = crypto::sha256(w.bytes());
    w.raw(ByteView(d.data(), kChecksumBytes));
    return w.take();
}

std::optional<SpectrumRecord> decode_record(ByteView in) {
    if (in.size() != kRecordBytes) return std::nullopt;
    const auto d = crypto::sha256(in.first(kBodyBytes));
    if (!std::equal(d.begin(), d.begin() + kChecksumBytes, in.begin() + kBodyBytes)) return std::nullopt;
    ByteReader r(in);
    SpectrumRecord rec;
    std::uint32_t cx = 0, cy = 0;
    std::uint16_t tx = 0;
    std::uint8_t n = 0;
    if (!r.u32(cx) || !r.u32(cy) || !r.u64(rec.valid_from) || !r.u64(rec.valid_to) || !r.u16(tx) ||
        !r.u8(rec.device_type_mask) || !r.u8(n) || n > kMaxChannels) {
        return std::nullopt;
    }
    rec.cell_x = static_cast<std::int32_t>(cx);
    rec.cell_y = static_cast<std::int32_t>(cy);
    rec.max_tx_dbm = static_cast<std::int16_t>(tx) / 10.0;
    for (int i = 0; i < n; ++i) {
        std::uint32_t f = 0;
        std::uint16_t e = 0;
        r.u32(f);
        r.u16(e);
        rec.channels.push_back({f, static_cast<std::int16_t>(e) / 10.0});
    }
    return rec;
}

void GridSpec::validate() const {
    if (resolution_m <= 0 || width_m <= 0 || height_m <= 0) throw std::invalid_argument("grid: non-positive size");
    if (width_m % resolution_m != 0 || height_m % resolution_m != 0) {
        throw std::invalid_argument("grid: area must be a multiple of the resolution");
    }
}

SpectrumDb SpectrumDb::synthetic(const GridSpec& grid, std::uint64_t seed, std::uint64_t valid_from,
                                 std::uint64_t valid_to) {
    grid.validate();
    return SpectrumDb(grid, seed, valid_from, valid_to);
}

SpectrumRecord SpectrumDb::synthesize(std::int32_t cx, std::int32_t cy) const {
    auto rng = crypto::SeededRng(seed_).fork("cell/" + std::to_string(cx) + "/" + std::to_string(cy));
    SpectrumRecord r;
    r.cell_x = cx;
    r.cell_y = cy;
    r.valid_from = valid_from_;
    r.valid_to = valid_to_;
    r.max_tx_dbm = 20.0 + static_cast<double>(rng.uniform(17));
    r.device_type_mask = static_cast<std::uint8_t>(0x0f | (rng.uniform(2) ? 0xf0 : 0x00));
    for (int c = 0; c < kBandChannels; ++c) {
        if (rng.uniform(10) < 6) {
            r.channels.push_back({kBaseKhz + static_cast<std::uint32_t>(c) * kStepKhz,
                                  16.0 + static_cast<double>(rng.uniform(21))});
        }
    }
    return r;
}

std::pair<std::int32_t, std::int32_t> SpectrumDb::cell_of(double lx, double ly) const {
    const double rx = lx - grid_.origin_x;
    const double ry = ly - grid_.origin_y;
    if (!std::isfinite(rx) || !std::isfinite(ry) || rx < 0 || ry < 0 || rx >= grid_.width_m || ry >= grid_.height_m) {
        throw ProtocolError(Reject::OutOfArea, "spectrum db: coordinates outside the service area");
    }
    const auto col = static_cast<std::int32_t>(std::floor(rx / grid_.resolution_m));
    const auto row = static_cast<std::int32_t>(std::floor(ry / grid_.resolution_m));
    return {grid_.origin_x + col * grid_.resolution_m, grid_.origin_y + row * grid_.resolution_m};
}

SpectrumRecord SpectrumDb::record_at(std::int32_t cell_x, std::int32_t cell_y) const {
    if (stored_.empty()) return synthesize(cell_x, cell_y);
    const std::int64_t col = (cell_x - grid_.origin_x) / grid_.resolution_m;
    const std::int64_t row = (cell_y - grid_.origin_y) / grid_.resolution_m;
    return stored_.at(static_cast<std::size_t>(row * grid_.columns() + col));
}

SpectrumRecord SpectrumDb::lookup(double lx, double ly, const DeviceProfile& device) const {
    const auto [cx, cy] = cell_of(lx, ly);
    SpectrumRecord r = record_at(cx, cy);
    if (device.device_type >= 8 || !(r.device_type_mask & (1u << device.device_type))) r.channels.clear();
    return r;
}

void SpectrumDb::save(const std::filesystem::path& path) const {
    nlohmann::json h = {{"origin_x", grid_.origin_x},       {"origin_y", grid_.origin_y},
                        {"resolution_m", grid_.resolution_m}, {"width_m", grid_.width_m},
                        {"height_m", grid_.height_m},         {"record_bytes", kRecordBytes},
                        {"records", grid_.columns() * grid_.rows()}};
    const std::string hs = h.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("spectrum db: cannot write " + path.string());
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(hs.size()));
    out.write(reinterpret_cast<const char*>(w.bytes().data()), 4);
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (std::int64_t row = 0; row < grid_.rows(); ++row) {
        for (std::int64_t col = 0; col < grid_.columns(); ++col) {
            const auto rec = encode_record(record_at(grid_.origin_x + static_cast<std::int32_t>(col) * grid_.resolution_m,
                                                     grid_.origin_y + static_cast<std::int32_t>(row) * grid_.resolution_m));
            out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
        }
    }
    if (!out) throw std::runtime_error("spectrum db: write failed");
}

SpectrumDb SpectrumDb::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("spectrum db: cannot open " + path.string());
    std::uint8_t len[4];
    if (!in.read(reinterpret_cast<char*>(len), 4)) throw std::runtime_error("spectrum db: truncated header");
    const std::uint32_t n = (std::uint32_t{len[0]} << 24) | (len[1] << 16) | (len[2] << 8) | len[3];
    std::string hs(n, '\0');
    if (!in.read(hs.data(), n)) throw std::runtime_error("spectrum db: truncated header");
    const auto h = nlohmann::json::parse(hs);
    GridSpec g{h.at("origin_x"), h.at("origin_y"), h.at("resolution_m"), h.at("width_m"), h.at("height_m")};
    g.validate();
    if (h.at("record_bytes").get<std::size_t>() != kRecordBytes) throw std::runtime_error("spectrum db: record size");
    SpectrumDb db(g, 0, 0, 0);
    const auto count = static_cast<std::size_t>(g.columns() * g.rows());
    db.stored_.reserve(count);
    Bytes buf(kRecordBytes);
    for (std::size_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), kRecordBytes)) {
            throw std::runtime_error("spectrum db: truncated records");
        }
        auto rec = decode_record(buf);
        if (!rec) throw std::runtime_error("spectrum db: corrupt record " + std::to_string(i));
        db.stored_.push_back(std::move(*rec));
    }
    return db;
}

}  // namespace slapx::protocol
