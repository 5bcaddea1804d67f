#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "slapx/protocol/wire.hpp"

namespace slapx::cli {

/// ceil(payload / (mtu - header_bytes)); 0 for an empty payload. Throws if mtu <= header_bytes.
std::size_t packet_count(std::size_t payload, std::size_t mtu, std::size_t header_bytes);

struct FragRow {
    std::size_t mtu = 0;
    protocol::MessageType type = protocol::MessageType::PolRequest;
    std::size_t payload = 0;
    std::size_t header_bytes = 0;
    std::size_t packets = 0;
    /// total headers / (total headers + payload)
    double overhead = 0.0;
};

struct FragSweep {
    std::size_t mtu_min = 576;
    std::size_t mtu_max = 9000;
    std::size_t step = 1;
    std::size_t header_bytes = 40;
    /// Extra MTUs always included when inside the range.
    std::vector<std::size_t> anchors{1500};
};

/// Message payloads are the fixed budgets; the 5-byte frame header is not counted.
std::vector<FragRow> fragmentation(const FragSweep& sweep);
FragRow frag_row(protocol::MessageType t, std::size_t mtu, std::size_t header_bytes);

std::string frag_csv_header();
std::string frag_csv_row(const FragRow& r);

}  // namespace slapx::cli
