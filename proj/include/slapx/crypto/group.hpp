#pragma once

#include <memory>
#include <string_view>

#include <openssl/ec.h>

#include "slapx/crypto/bignum.hpp"
#include "slapx/crypto/hash.hpp"
#include "slapx/crypto/rng.hpp"

namespace slapx::crypto {

class Scalar;
class GroupElement;

/// Prime-order elliptic-curve group (cofactor 1). Immutable and shareable across threads.
class Group {
public:
    /// 128 -> P-256, 192 -> P-384, 256 -> P-521.
    static Group setup(int security_bits);

    int security_bits() const;
    const BigInt& order() const;
    std::size_t scalar_size() const;
    /// Fixed serialized width of a group element (compressed point).
    std::size_t element_size() const;
    std::string_view curve_name() const;

    GroupElement generator() const;
    GroupElement identity() const;

    Scalar scalar(const BigInt& v) const;
    Scalar scalar(std::uint64_t v) const;
    Scalar random_scalar(SeededRng& rng) const;
    /// Uniform-enough reduction of a domain-separated hash into Z_p.
    Scalar hash_to_scalar(const Transcript& t) const;
    Scalar scalar_from_bytes(ByteView be) const;

    /// Deterministic map to a group element (try-and-increment over x-coordinates).
    GroupElement hash_to_element(std::string_view domain, ByteView data) const;
    GroupElement element_from_bytes(ByteView b) const;
    /// g*a + q*b in one pass.
    GroupElement mul_gen_add(const Scalar& a, const GroupElement& q, const Scalar& b) const;

    friend bool operator==(const Group& a, const Group& b) { return a.impl_ == b.impl_; }

    struct Impl;

private:
    explicit Group(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend class Scalar;
    friend class GroupElement;
};

/// Element of Z_p for the owning group's order p.
class Scalar {
public:
    const BigInt& value() const { return value_; }
    Bytes to_bytes() const;
    bool is_zero() const { return value_.is_zero(); }

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    Scalar operator-() const;
    Scalar inverse() const;
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.value_ == b.value_; }

private:
    Scalar(std::shared_ptr<const Group::Impl> g, BigInt v);
    std::shared_ptr<const Group::Impl> group_;
    BigInt value_;

    friend class Group;
    friend class GroupElement;
};

class GroupElement {
public:
    GroupElement(const GroupElement& other);
    GroupElement(GroupElement&&) noexcept = default;
    GroupElement& operator=(const GroupElement& other);
    GroupElement& operator=(GroupElement&&) noexcept = default;

    bool is_identity() const;
    /// Compressed encoding of fixed width; the identity encodes as all zeros.
    Bytes to_bytes() const;

    friend GroupElement operator+(const GroupElement& a, const GroupElement& b);
    friend GroupElement operator-(const GroupElement& a, const GroupElement& b);
    friend GroupElement operator*(const GroupElement& a, const Scalar& k);
    friend GroupElement operator*(const Scalar& k, const GroupElement& a) { return a * k; }
    GroupElement operator-() const;
    friend bool operator==(const GroupElement& a, const GroupElement& b);

private:
    GroupElement(std::shared_ptr<const Group::Impl> g, EC_POINT* p);
    struct Deleter {
        void operator()(EC_POINT* p) const { EC_POINT_free(p); }
    };
    std::shared_ptr<const Group::Impl> group_;
    std::unique_ptr<EC_POINT, Deleter> point_;

    friend class Group;
};

}  // namespace slapx::crypto
