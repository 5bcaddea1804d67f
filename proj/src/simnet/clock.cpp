#include "slapx/simnet/clock.hpp"

#include <stdexcept>

namespace slapx::simnet {

void SimClock::at(SimTime t, Action a) {
    if (t < now_) throw std::logic_error("SimClock: event scheduled in the past");
    events_.push(Event{t, seq_++, std::move(a)});
}

bool SimClock::step() {
    if (events_.empty()) return false;
    // priority_queue::top is const; move the action out before popping.
    Event e = std::move(const_cast<Event&>(events_.top()));
    events_.pop();
    now_ = e.t;
    ++fired_;
    e.action();
    return true;
}

void SimClock::run() {
    while (step()) {
    }
}

}  // namespace slapx::simnet
