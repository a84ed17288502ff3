// SPDX-License-Identifier: Apache-2.0
#include "pksim/crypto/keys.hpp"

#include <sodium.h>

#include <atomic>
#include <stdexcept>

namespace pksim::crypto {

namespace {

std::atomic<std::uint64_t> g_dh_invocations{0};

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

}  // namespace

void SecretKey::wipe() { sodium_memzero(bytes_.data(), bytes_.size()); }

DhKeyPair DhKeyPair::generate(Rng& rng) {
    ensure_sodium();
    std::array<std::uint8_t, kSecretKeyBytes> scalar;
    rng.fill(scalar);
    DhKeyPair pair;
    pair.secret = SecretKey(scalar);
    crypto_scalarmult_base(pair.pub.data(), scalar.data());
    sodium_memzero(scalar.data(), scalar.size());
    return pair;
}

Key32 dh(const SecretKey& secret, const PublicKey& peer_public) {
    ensure_sodium();
    if (secret.erased()) throw std::logic_error("DH with an erased secret key");
    g_dh_invocations.fetch_add(1, std::memory_order_relaxed);
    Key32 out;
    if (crypto_scalarmult(out.data(), secret.data(), peer_public.data()) != 0)
        throw std::runtime_error("scalar multiplication failed");
    return out;
}

std::uint64_t dh_invocation_count() { return g_dh_invocations.load(std::memory_order_relaxed); }

IdentityKeyPair IdentityKeyPair::generate(Rng& rng) {
    ensure_sodium();
    std::array<std::uint8_t, 32> seed;
    rng.fill(seed);

    IdentityKeyPair identity;
    crypto_sign_seed_keypair(identity.ed_public_.data(), identity.ed_secret_.data(), seed.data());
    sodium_memzero(seed.data(), seed.size());

    std::array<std::uint8_t, kSecretKeyBytes> curve_secret;
    if (crypto_sign_ed25519_sk_to_curve25519(curve_secret.data(), identity.ed_secret_.data()) != 0)
        throw std::runtime_error("identity secret conversion failed");
    identity.dh_secret_ = SecretKey(curve_secret);
    sodium_memzero(curve_secret.data(), curve_secret.size());

    if (crypto_sign_ed25519_pk_to_curve25519(identity.dh_public_.data(),
                                             identity.ed_public_.data()) != 0)
        throw std::runtime_error("identity public conversion failed");
    return identity;
}

Signature IdentityKeyPair::sign(ByteSpan message) const {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), ed_secret_.data());
    return sig;
}

bool verify_identity_signature(const PublicKey& identity_public, ByteSpan message,
                               const Signature& signature) {
    ensure_sodium();
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       identity_public.data()) == 0;
}

PublicKey identity_dh_public(const PublicKey& identity_public) {
    ensure_sodium();
    PublicKey out;
    if (crypto_sign_ed25519_pk_to_curve25519(out.data(), identity_public.data()) != 0)
        throw std::invalid_argument("malformed identity public key");
    return out;
}

SignedPrekeyPair SignedPrekeyPair::generate(const IdentityKeyPair& identity, std::uint32_t key_id,
                                            Rng& rng) {
    SignedPrekeyPair spk;
    spk.pair = DhKeyPair::generate(rng);
    spk.key_id = key_id;
    spk.signature = identity.sign(spk.pair.pub);
    return spk;
}

OneTimePrekeyPair OneTimePrekeyPair::generate(std::uint32_t key_id, Rng& rng) {
    OneTimePrekeyPair otpk;
    otpk.pair = DhKeyPair::generate(rng);
    otpk.key_id = key_id;
    return otpk;
}

EphemeralHandshakeKeyPair EphemeralHandshakeKeyPair::generate(Rng& rng) {
    return EphemeralHandshakeKeyPair{DhKeyPair::generate(rng)};
}

RatchetKeyPair RatchetKeyPair::generate(Rng& rng) {
    return RatchetKeyPair{DhKeyPair::generate(rng)};
}

}  // namespace pksim::crypto
