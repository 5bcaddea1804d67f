#include "slapx/simnet/server.hpp"

#include <stdexcept>

namespace slapx::simnet {

ServerModel::ServerModel(SimClock& clock, std::string name, int workers, std::size_t capacity)
    : clock_(clock), name_(std::move(name)), workers_(workers), capacity_(capacity) {
    if (workers < 1) throw std::invalid_argument("ServerModel: need at least one worker");
}

ServerModel::Admit ServerModel::submit(Job job) {
    ++stats_.generated;
    if (busy_ < workers_) {
        ++stats_.immediate;
        start(std::move(job));
        return Admit::Immediate;
    }
    if (capacity_ != 0 && queue_.size() >= capacity_) {
        if (job.malicious) {
            ++stats_.dropped_malicious;
        } else {
            ++stats_.dropped_benign;
        }
        return Admit::Dropped;
    }
    queue_.push_back({clock_.now(), std::move(job)});
    ++stats_.enqueued;
    if (capacity_ != 0 && queue_.size() > capacity_) throw std::logic_error("ServerModel: queue over capacity");
    stats_.max_queue = std::max(stats_.max_queue, queue_.size());
    return Admit::Queued;
}

void ServerModel::reject_at_arrival(const Job&) {
    ++stats_.generated;
    ++stats_.rejected_at_arrival;
}

void ServerModel::start(Job job) {
    ++busy_;
    stats_.busy_time += job.service;
    auto done = std::move(job.on_done);
    clock_.after(job.service, [this, done = std::move(done)] {
        ++stats_.served;
        finish();
        if (done) done();
    });
}

void ServerModel::finish() {
    --busy_;
    if (queue_.empty()) return;
    Waiting w = std::move(queue_.front());
    queue_.pop_front();
    ++stats_.dequeued;
    stats_.wait_sum += clock_.now() - w.arrived;
    start(std::move(w.job));
}

}  // namespace slapx::simnet
