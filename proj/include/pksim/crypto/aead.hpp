// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "pksim/crypto/kdf.hpp"
#include "pksim/sim/rng.hpp"
#include "pksim/util/bytes.hpp"

namespace pksim::crypto {

// AES-256-CBC with an HMAC-SHA256 tag in encrypt-then-MAC composition.
// The 32-byte message key is expanded into a cipher key and a MAC key; the
// IV is drawn fresh per message and travels with the ciphertext. The tag
// covers length-framed associated data, IV and ciphertext.
struct AeadCiphertext {
    Bytes iv;          // 16 bytes
    Bytes ciphertext;  // padded to the block size
    Bytes tag;         // 32 bytes
};

AeadCiphertext aead_encrypt(const Key32& message_key, ByteSpan plaintext,
                            ByteSpan associated_data, Rng& rng);

// Returns the plaintext only when the tag verifies; no partial output.
std::optional<Bytes> aead_decrypt(const Key32& message_key, const AeadCiphertext& ct,
                                  ByteSpan associated_data);

// Raw primitives, exposed for the conformance vectors in the test suite.
Bytes aes256_cbc_encrypt(const Key32& key, const Bytes& iv, ByteSpan plaintext);
std::optional<Bytes> aes256_cbc_decrypt(const Key32& key, const Bytes& iv, ByteSpan ciphertext);

}  // namespace pksim::crypto
