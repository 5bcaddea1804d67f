#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace slapx::simnet {

using SimTime = std::int64_t;  // nanoseconds

inline SimTime from_ms(double ms) { return std::llround(ms * 1e6); }
inline SimTime from_s(double s) { return std::llround(s * 1e9); }
inline double to_ms(SimTime t) { return static_cast<double>(t) / 1e6; }
inline double to_s(SimTime t) { return static_cast<double>(t) / 1e9; }

/// Discrete-event clock. Events at equal times fire in insertion order.
class SimClock {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }
    /// Throws std::logic_error for a time in the past.
    void at(SimTime t, Action a);
    void after(SimTime dt, Action a) { at(now_ + dt, std::move(a)); }

    /// Runs the next event; false when none are left.
    bool step();
    void run();
    std::size_t pending() const { return events_.size(); }
    std::uint64_t fired() const { return fired_; }

private:
    struct Event {
        SimTime t;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const { return a.t != b.t ? a.t > b.t : a.seq > b.seq; }
    };

    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t fired_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> events_;
};

}  // namespace slapx::simnet
