#include "slapx/vdf/pool.hpp"

#include <stdexcept>
#include <string>

namespace slapx::vdf {

ModulusPool::ModulusPool(int modulus_bits, std::size_t depth, std::uint64_t seed, crypto::ModulusSize size)
    : bits_(modulus_bits), depth_(depth), seed_(seed), size_(size) {
    if (depth == 0) throw std::invalid_argument("modulus pool depth must be positive");
    worker_ = std::thread([this] { run(); });
}

ModulusPool::~ModulusPool() {
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    not_full_.notify_all();
    worker_.join();
}

void ModulusPool::run() {
    const crypto::SeededRng root(seed_);
    for (std::uint64_t k = 0;; ++k) {
        {
            std::unique_lock lock(mu_);
            not_full_.wait(lock, [this] { return stop_ || queue_.size() < depth_; });
            if (stop_) return;
        }
        crypto::SeededRng rng = root.fork("modulus/" + std::to_string(k));
        crypto::RsaModulus m = crypto::rsa_setup(bits_, rng, size_);
        {
            std::lock_guard lock(mu_);
            queue_.push_back(std::move(m));
            ++produced_;
        }
        not_empty_.notify_one();
    }
}

crypto::RsaModulus ModulusPool::take() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [this] { return !queue_.empty(); });
    crypto::RsaModulus m = std::move(queue_.front());
    queue_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return m;
}

std::size_t ModulusPool::ready() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

std::uint64_t ModulusPool::produced() const {
    std::lock_guard lock(mu_);
    return produced_;
}

}  // namespace slapx::vdf
