#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <thread>

#include "slapx/crypto/rsa.hpp"

namespace slapx::vdf {

/// Background producer of fresh RSA moduli. Modulus k is derived from
/// SeededRng(seed).fork("modulus/k"), so the sequence does not depend on timing.
class ModulusPool {
public:
    ModulusPool(int modulus_bits, std::size_t depth, std::uint64_t seed,
                crypto::ModulusSize size = crypto::ModulusSize::Standard);
    ~ModulusPool();
    ModulusPool(const ModulusPool&) = delete;
    ModulusPool& operator=(const ModulusPool&) = delete;

    /// Blocks until a modulus is ready.
    crypto::RsaModulus take();
    std::size_t ready() const;
    std::uint64_t produced() const;

private:
    void run();

    int bits_;
    std::size_t depth_;
    std::uint64_t seed_;
    crypto::ModulusSize size_;
    mutable std::mutex mu_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<crypto::RsaModulus> queue_;
    std::uint64_t produced_ = 0;
    bool stop_ = false;
    std::thread worker_;
};

}  // namespace slapx::vdf
