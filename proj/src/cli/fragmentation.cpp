#include "slapx/cli/fragmentation.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

namespace slapx::cli {

std::size_t packet_count(std::size_t payload, std::size_t mtu, std::size_t header_bytes) {
    if (mtu <= header_bytes) throw std::invalid_argument("packet_count: MTU must exceed the header size");
    const std::size_t per = mtu - header_bytes;
    return (payload + per - 1) / per;
}

FragRow frag_row(protocol::MessageType t, std::size_t mtu, std::size_t header_bytes) {
    FragRow r{mtu, t, protocol::payload_budget(t), header_bytes, 0, 0.0};
    r.packets = packet_count(r.payload, mtu, header_bytes);
    const double headers = static_cast<double>(r.packets * header_bytes);
    r.overhead = headers + static_cast<double>(r.payload) > 0 ? headers / (headers + static_cast<double>(r.payload)) : 0.0;
    return r;
}

std::vector<FragRow> fragmentation(const FragSweep& s) {
    if (s.mtu_min <= s.header_bytes) throw std::invalid_argument("fragmentation: mtu_min must exceed the header size");
    if (s.mtu_max < s.mtu_min) throw std::invalid_argument("fragmentation: empty MTU range");
    if (s.step == 0) throw std::invalid_argument("fragmentation: step must be positive");
    std::set<std::size_t> mtus;
    for (std::size_t m = s.mtu_min; m <= s.mtu_max; m += s.step) mtus.insert(m);
    mtus.insert(s.mtu_max);
    for (auto a : s.anchors) {
        if (a >= s.mtu_min && a <= s.mtu_max) mtus.insert(a);
    }
    std::vector<FragRow> out;
    out.reserve(mtus.size() * protocol::kAllMessageTypes.size());
    for (auto m : mtus) {
        for (auto t : protocol::kAllMessageTypes) out.push_back(frag_row(t, m, s.header_bytes));
    }
    return out;
}

std::string frag_csv_header() { return "mtu,message,payload_bytes,header_bytes,packets,overhead_ratio"; }

std::string frag_csv_row(const FragRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%zu,%zu,%.6f", r.mtu, std::string(protocol::message_name(r.type)).c_str(),
                  r.payload, r.header_bytes, r.packets, r.overhead);
    return buf;
}

}  // namespace slapx::cli
