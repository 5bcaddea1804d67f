#pragma once

#include <deque>
#include <string>

#include "slapx/simnet/clock.hpp"

namespace slapx::simnet {

struct Job {
    SimTime service = 0;
    bool malicious = false;
    std::uint32_t ue = 0;
    /// Called when a worker finishes the job.
    std::function<void()> on_done;
};

/// Workers plus a bounded FIFO. A job that finds every worker busy and the
/// queue full is dropped.
class ServerModel {
public:
    enum class Admit { Immediate, Queued, Dropped };

    struct Stats {
        std::uint64_t generated = 0;
        std::uint64_t immediate = 0;
        std::uint64_t enqueued = 0;  // N_Q
        std::uint64_t dropped_benign = 0;
        std::uint64_t dropped_malicious = 0;
        std::uint64_t rejected_at_arrival = 0;
        std::uint64_t dequeued = 0;
        std::uint64_t served = 0;
        SimTime wait_sum = 0;  // over dequeued jobs
        std::size_t max_queue = 0;
        SimTime busy_time = 0;

        std::uint64_t dropped() const { return dropped_benign + dropped_malicious; }
        double mean_wait_ms() const { return dequeued ? to_ms(wait_sum) / static_cast<double>(dequeued) : 0.0; }
        /// generated == immediate + enqueued + dropped + rejected_at_arrival
        bool conserved() const { return generated == immediate + enqueued + dropped() + rejected_at_arrival; }
    };

    /// capacity 0 means an unbounded queue.
    ServerModel(SimClock& clock, std::string name, int workers, std::size_t capacity);

    Admit submit(Job job);
    /// A job turned away by a cheap check before it reaches the queue.
    void reject_at_arrival(const Job& job);

    const std::string& name() const { return name_; }
    int workers() const { return workers_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t queue_length() const { return queue_.size(); }
    int busy() const { return busy_; }
    const Stats& stats() const { return stats_; }

private:
    struct Waiting {
        SimTime arrived;
        Job job;
    };
    void start(Job job);
    void finish();

    SimClock& clock_;
    std::string name_;
    int workers_;
    std::size_t capacity_;
    int busy_ = 0;
    std::deque<Waiting> queue_;
    Stats stats_;
};

}  // namespace slapx::simnet
