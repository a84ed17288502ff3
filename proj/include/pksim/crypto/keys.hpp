// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "pksim/crypto/kdf.hpp"
#include "pksim/sim/rng.hpp"
#include "pksim/util/bytes.hpp"

namespace pksim::crypto {

constexpr std::size_t kPublicKeyBytes = 32;
constexpr std::size_t kSecretKeyBytes = 32;
constexpr std::size_t kSignatureBytes = 64;

using PublicKey = std::array<std::uint8_t, kPublicKeyBytes>;
using Signature = std::array<std::uint8_t, kSignatureBytes>;

// 32-byte secret scalar. "Deleted" secrets are zeroized in place and flagged;
// consumers that model key compromise refuse flagged secrets, which turns the
// protocol's deletion requirement into an observable state transition.
class SecretKey {
public:
    SecretKey() = default;
    explicit SecretKey(const std::array<std::uint8_t, kSecretKeyBytes>& bytes) : bytes_(bytes) {}
    ~SecretKey() { wipe(); }

    SecretKey(const SecretKey&) = default;
    SecretKey& operator=(const SecretKey&) = default;
    SecretKey(SecretKey&& other) noexcept : bytes_(other.bytes_), erased_(other.erased_) {
        other.erase();
    }
    SecretKey& operator=(SecretKey&& other) noexcept {
        if (this != &other) {
            bytes_ = other.bytes_;
            erased_ = other.erased_;
            other.erase();
        }
        return *this;
    }

    const std::uint8_t* data() const { return bytes_.data(); }
    const std::array<std::uint8_t, kSecretKeyBytes>& bytes() const { return bytes_; }
    bool erased() const { return erased_; }
    void erase() {
        wipe();
        erased_ = true;
    }

private:
    void wipe();
    std::array<std::uint8_t, kSecretKeyBytes> bytes_{};
    bool erased_ = false;
};

struct DhKeyPair {
    SecretKey secret;
    PublicKey pub{};

    static DhKeyPair generate(Rng& rng);
};

// X25519 between a secret scalar and a peer public key.
Key32 dh(const SecretKey& secret, const PublicKey& peer_public);

// Number of dh() invocations since process start; lets tests pin the exact
// DH count of a handshake variant.
std::uint64_t dh_invocation_count();

// Long-term identity. Holds an Ed25519 pair for prekey signatures plus the
// birationally equivalent Curve25519 pair used in the handshake DH mix. The
// distributed identity public key is the Ed25519 encoding.
class IdentityKeyPair {
public:
    static IdentityKeyPair generate(Rng& rng);

    const PublicKey& public_key() const { return ed_public_; }
    const PublicKey& dh_public() const { return dh_public_; }
    const SecretKey& dh_secret() const { return dh_secret_; }

    Signature sign(ByteSpan message) const;

private:
    std::array<std::uint8_t, 64> ed_secret_{};
    PublicKey ed_public_{};
    SecretKey dh_secret_;
    PublicKey dh_public_{};
};

bool verify_identity_signature(const PublicKey& identity_public, ByteSpan message,
                               const Signature& signature);

// Curve25519 form of a distributed (Ed25519) identity public key, as needed
// for the dh2 computation. Throws on a malformed point.
PublicKey identity_dh_public(const PublicKey& identity_public);

struct SignedPrekeyPair {
    DhKeyPair pair;
    std::uint32_t key_id = 0;
    Signature signature{};

    static SignedPrekeyPair generate(const IdentityKeyPair& identity, std::uint32_t key_id,
                                     Rng& rng);
};

struct OneTimePrekeyPair {
    DhKeyPair pair;
    std::uint32_t key_id = 0;

    static OneTimePrekeyPair generate(std::uint32_t key_id, Rng& rng);
};

struct EphemeralHandshakeKeyPair {
    DhKeyPair pair;

    static EphemeralHandshakeKeyPair generate(Rng& rng);
};

struct RatchetKeyPair {
    DhKeyPair pair;

    static RatchetKeyPair generate(Rng& rng);
};

}  // namespace pksim::crypto
