#include "slapx/crypto/group.hpp"

#include <stdexcept>
#include <string>

#include <openssl/err.h>
#include <openssl/obj_mac.h>

namespace slapx::crypto {

namespace {

BN_CTX* tls_ctx() {
    thread_local BnCtx ctx = make_ctx();
    return ctx.get();
}

void check(int rc, const char* what) {
    if (rc != 1) {
        throw std::runtime_error(std::string("ec: ") + what + " failed");
    }
}

}  // namespace

struct Group::Impl {
    struct GroupDeleter {
        void operator()(EC_GROUP* g) const { EC_GROUP_free(g); }
    };
    std::unique_ptr<EC_GROUP, GroupDeleter> group;
    int security_bits = 0;
    std::string name;
    BigInt order;
    BigInt field;
    std::size_t scalar_size = 0;
    std::size_t field_size = 0;
};

Group Group::setup(int security_bits) {
    int nid = 0;
    std::string name;
    switch (security_bits) {
        case 128: nid = NID_X9_62_prime256v1; name = "P-256"; break;
        case 192: nid = NID_secp384r1; name = "P-384"; break;
        case 256: nid = NID_secp521r1; name = "P-521"; break;
        default:
            throw std::invalid_argument("group_setup: unsupported security level " + std::to_string(security_bits));
    }
    auto impl = std::make_shared<Impl>();
    impl->group.reset(EC_GROUP_new_by_curve_name(nid));
    if (!impl->group) throw std::runtime_error("ec: cannot create curve " + name);
    impl->security_bits = security_bits;
    impl->name = name;
    check(EC_GROUP_get_order(impl->group.get(), impl->order.get(), tls_ctx()), "get_order");
    check(EC_GROUP_get_curve(impl->group.get(), impl->field.get(), nullptr, nullptr, tls_ctx()), "get_curve");
    impl->scalar_size = static_cast<std::size_t>((impl->order.bits() + 7) / 8);
    impl->field_size = static_cast<std::size_t>((impl->field.bits() + 7) / 8);
    return Group(std::move(impl));
}

int Group::security_bits() const { return impl_->security_bits; }
const BigInt& Group::order() const { return impl_->order; }
std::size_t Group::scalar_size() const { return impl_->scalar_size; }
std::size_t Group::element_size() const { return impl_->field_size + 1; }
std::string_view Group::curve_name() const { return impl_->name; }

GroupElement Group::mul_gen_add(const Scalar& a, const GroupElement& q, const Scalar& b) const {
    EC_POINT* r = EC_POINT_new(impl_->group.get());
    check(EC_POINT_mul(impl_->group.get(), r, a.value().get(), q.point_.get(), b.value().get(), tls_ctx()), "mul2");
    return GroupElement(impl_, r);
}

GroupElement Group::generator() const {
    EC_POINT* p = EC_POINT_dup(EC_GROUP_get0_generator(impl_->group.get()), impl_->group.get());
    return GroupElement(impl_, p);
}

GroupElement Group::identity() const {
    EC_POINT* p = EC_POINT_new(impl_->group.get());
    check(EC_POINT_set_to_infinity(impl_->group.get(), p), "set_to_infinity");
    return GroupElement(impl_, p);
}

Scalar Group::scalar(const BigInt& v) const { return Scalar(impl_, v % impl_->order); }
Scalar Group::scalar(std::uint64_t v) const { return scalar(BigInt(v)); }

Scalar Group::random_scalar(SeededRng& rng) const { return Scalar(impl_, rng.uniform(impl_->order)); }

Scalar Group::hash_to_scalar(const Transcript& t) const {
    const Digest d = t.finish();
    // 16 extra bytes keep the modular bias below 2^-128.
    const Bytes wide = expand(d, "slapx/h2s", impl_->scalar_size + 16);
    return scalar(BigInt::from_bytes(wide));
}

Scalar Group::scalar_from_bytes(ByteView be) const {
    if (be.size() != impl_->scalar_size) throw std::invalid_argument("scalar: wrong encoding width");
    BigInt v = BigInt::from_bytes(be);
    if (v >= impl_->order) throw std::invalid_argument("scalar: not reduced");
    return Scalar(impl_, std::move(v));
}

GroupElement Group::hash_to_element(std::string_view domain, ByteView data) const {
    EC_POINT* p = EC_POINT_new(impl_->group.get());
    Transcript base("slapx/h2g");
    base.absorb(domain).absorb(data);
    for (std::uint64_t ctr = 0;; ++ctr) {
        Transcript t(base);
        t.absorb_u64(ctr);
        const Bytes wide = expand(t.finish(), "slapx/h2g/x", impl_->field_size + 16);
        const BigInt x = BigInt::from_bytes(wide) % impl_->field;
        ERR_set_mark();
        const int ok = EC_POINT_set_compressed_coordinates(impl_->group.get(), p, x.get(), 0, tls_ctx());
        ERR_pop_to_mark();
        if (ok == 1 && EC_POINT_is_at_infinity(impl_->group.get(), p) == 0) {
            return GroupElement(impl_, p);
        }
    }
}

GroupElement Group::element_from_bytes(ByteView b) const {
    if (b.size() != element_size()) throw std::invalid_argument("group element: wrong encoding width");
    bool all_zero = true;
    for (auto x : b) all_zero = all_zero && x == 0;
    if (all_zero) return identity();
    EC_POINT* p = EC_POINT_new(impl_->group.get());
    if (EC_POINT_oct2point(impl_->group.get(), p, b.data(), b.size(), tls_ctx()) != 1) {
        EC_POINT_free(p);
        ERR_clear_error();
        throw std::invalid_argument("group element: not on curve");
    }
    return GroupElement(impl_, p);
}

// --- Scalar ---

Scalar::Scalar(std::shared_ptr<const Group::Impl> g, BigInt v) : group_(std::move(g)), value_(std::move(v)) {}

Bytes Scalar::to_bytes() const { return value_.to_bytes(group_->scalar_size); }

Scalar operator+(const Scalar& a, const Scalar& b) {
    BigInt r;
    check(BN_mod_add(r.get(), a.value_.get(), b.value_.get(), a.group_->order.get(), tls_ctx()), "mod_add");
    return Scalar(a.group_, std::move(r));
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    BigInt r;
    check(BN_mod_sub(r.get(), a.value_.get(), b.value_.get(), a.group_->order.get(), tls_ctx()), "mod_sub");
    return Scalar(a.group_, std::move(r));
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    BigInt r;
    check(BN_mod_mul(r.get(), a.value_.get(), b.value_.get(), a.group_->order.get(), tls_ctx()), "mod_mul");
    return Scalar(a.group_, std::move(r));
}

Scalar Scalar::operator-() const { return Scalar(group_, BigInt(0)) - *this; }

Scalar Scalar::inverse() const { return Scalar(group_, mod_inverse(value_, group_->order)); }

// --- GroupElement ---

GroupElement::GroupElement(std::shared_ptr<const Group::Impl> g, EC_POINT* p) : group_(std::move(g)), point_(p) {
    if (!point_) throw std::bad_alloc();
}

GroupElement::GroupElement(const GroupElement& other)
    : group_(other.group_), point_(EC_POINT_dup(other.point_.get(), other.group_->group.get())) {
    if (!point_) throw std::bad_alloc();
}

GroupElement& GroupElement::operator=(const GroupElement& other) {
    if (this != &other) {
        group_ = other.group_;
        point_.reset(EC_POINT_dup(other.point_.get(), other.group_->group.get()));
        if (!point_) throw std::bad_alloc();
    }
    return *this;
}

bool GroupElement::is_identity() const { return EC_POINT_is_at_infinity(group_->group.get(), point_.get()) == 1; }

Bytes GroupElement::to_bytes() const {
    const std::size_t width = group_->field_size + 1;
    Bytes out(width, 0);
    if (is_identity()) return out;
    const std::size_t n = EC_POINT_point2oct(group_->group.get(), point_.get(), POINT_CONVERSION_COMPRESSED,
                                             out.data(), out.size(), tls_ctx());
    if (n != width) throw std::runtime_error("ec: unexpected point encoding width");
    return out;
}

GroupElement operator+(const GroupElement& a, const GroupElement& b) {
    EC_POINT* r = EC_POINT_new(a.group_->group.get());
    check(EC_POINT_add(a.group_->group.get(), r, a.point_.get(), b.point_.get(), tls_ctx()), "add");
    return GroupElement(a.group_, r);
}

GroupElement GroupElement::operator-() const {
    GroupElement r(*this);
    check(EC_POINT_invert(group_->group.get(), r.point_.get(), tls_ctx()), "invert");
    return r;
}

GroupElement operator-(const GroupElement& a, const GroupElement& b) { return a + (-b); }

GroupElement operator*(const GroupElement& a, const Scalar& k) {
    EC_POINT* r = EC_POINT_new(a.group_->group.get());
    const EC_POINT* gen = EC_GROUP_get0_generator(a.group_->group.get());
    if (EC_POINT_cmp(a.group_->group.get(), a.point_.get(), gen, tls_ctx()) == 0) {
        // Generator multiplication can use the curve's precomputed tables.
        check(EC_POINT_mul(a.group_->group.get(), r, k.value().get(), nullptr, nullptr, tls_ctx()), "mul_gen");
    } else {
        check(EC_POINT_mul(a.group_->group.get(), r, nullptr, a.point_.get(), k.value().get(), tls_ctx()), "mul");
    }
    return GroupElement(a.group_, r);
}

bool operator==(const GroupElement& a, const GroupElement& b) {
    return EC_POINT_cmp(a.group_->group.get(), a.point_.get(), b.point_.get(), tls_ctx()) == 0;
}

}  // namespace slapx::crypto
