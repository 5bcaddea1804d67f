#include "slapx/crypto/sgn.hpp"

#include <stdexcept>
#include <string>

#include <openssl/core_names.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>

namespace slapx::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

const char* ossl_group_name(const Group& group) {
    switch (group.security_bits()) {
        case 128: return "prime256v1";
        case 192: return "secp384r1";
        case 256: return "secp521r1";
    }
    throw std::invalid_argument("sgn: unsupported group");
}

Pkey make_key(const Group& group, const BigInt* sk, const GroupElement& pk) {
    std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(), OSSL_PARAM_BLD_free);
    const Bytes pub = pk.to_bytes();
    OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, ossl_group_name(group), 0);
    OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(), pub.size());
    if (sk != nullptr) OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, sk->get());
    std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()),
                                                                   OSSL_PARAM_free);
    std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr),
                                                                    EVP_PKEY_CTX_free);
    EVP_PKEY* raw = nullptr;
    if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
        EVP_PKEY_fromdata(ctx.get(), &raw, sk ? EVP_PKEY_KEYPAIR : EVP_PKEY_PUBLIC_KEY, params.get()) != 1) {
        ERR_clear_error();
        throw std::runtime_error("sgn: cannot build EC key");
    }
    return Pkey(raw);
}

}  // namespace

SgnKeyPair sgn_keygen(const Group& group, SeededRng& rng) {
    Scalar sk = group.random_scalar(rng);
    while (sk.is_zero()) sk = group.random_scalar(rng);
    GroupElement pk = group.generator() * sk;
    return SgnKeyPair{std::move(sk), std::move(pk)};
}

Bytes sgn_sign(const Group& group, const SgnKeyPair& key, ByteView msg) {
    Pkey pkey = make_key(group, &key.sk.value(), key.pk);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::size_t len = 0;
    if (EVP_DigestSignInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()) != 1 ||
        EVP_DigestSign(md.get(), nullptr, &len, msg.data(), msg.size()) != 1) {
        throw std::runtime_error("sgn: sign init failed");
    }
    Bytes sig(len);
    if (EVP_DigestSign(md.get(), sig.data(), &len, msg.data(), msg.size()) != 1) {
        throw std::runtime_error("sgn: sign failed");
    }
    sig.resize(len);
    return sig;
}

bool sgn_verify(const Group& group, const GroupElement& pk, ByteView msg, ByteView sig) {
    if (pk.is_identity() || sig.empty()) return false;
    Pkey pkey = make_key(group, nullptr, pk);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()) != 1) {
        ERR_clear_error();
        return false;
    }
    const bool ok = EVP_DigestVerify(md.get(), sig.data(), sig.size(), msg.data(), msg.size()) == 1;
    ERR_clear_error();
    return ok;
}

}  // namespace slapx::crypto
