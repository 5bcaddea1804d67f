#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "slapx/crypto/bignum.hpp"

namespace slapx::crypto {

/// Big-endian append-only writer.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        out_.push_back(v);
        return *this;
    }
    ByteWriter& u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
        return *this;
    }
    ByteWriter& u32(std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
        return *this;
    }
    ByteWriter& u64(std::uint64_t v) {
        for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
        return *this;
    }
    ByteWriter& raw(ByteView b) {
        out_.insert(out_.end(), b.begin(), b.end());
        return *this;
    }
    /// 2-byte length prefix then the bytes.
    ByteWriter& var(ByteView b) {
        if (b.size() > 0xffff) throw std::length_error("field longer than 65535 bytes");
        u16(static_cast<std::uint16_t>(b.size()));
        return raw(b);
    }
    ByteWriter& zeros(std::size_t n) {
        out_.insert(out_.end(), n, 0);
        return *this;
    }
    std::size_t size() const { return out_.size(); }
    Bytes take() { return std::move(out_); }
    const Bytes& bytes() const { return out_; }

private:
    Bytes out_;
};

/// Bounds-checked big-endian reader. Every accessor returns false/nullopt once input runs short.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    bool u8(std::uint8_t& v) {
        if (remaining() < 1) return fail();
        v = in_[pos_++];
        return true;
    }
    bool u16(std::uint16_t& v) {
        if (remaining() < 2) return fail();
        v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
        pos_ += 2;
        return true;
    }
    bool u32(std::uint32_t& v) {
        if (remaining() < 4) return fail();
        v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
        return true;
    }
    bool u64(std::uint64_t& v) {
        if (remaining() < 8) return fail();
        v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
        return true;
    }
    bool raw(std::size_t n, Bytes& out) {
        if (remaining() < n) return fail();
        out.assign(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                   in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return true;
    }
    bool var(Bytes& out) {
        std::uint16_t n = 0;
        return u16(n) && raw(n, out);
    }
    bool skip(std::size_t n) {
        if (remaining() < n) return fail();
        pos_ += n;
        return true;
    }

    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool ok() const { return ok_; }
    bool done() const { return ok_ && remaining() == 0; }

private:
    bool fail() {
        ok_ = false;
        return false;
    }

    ByteView in_;
    std::size_t pos_ = 0;
    bool ok_ = true;
};

}  // namespace slapx::crypto
