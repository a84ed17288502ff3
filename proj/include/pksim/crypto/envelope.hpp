// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "pksim/crypto/aead.hpp"
#include "pksim/crypto/keys.hpp"

namespace pksim::crypto {

// First-flight fields, present only on the envelope that opens a session
// (x == 0, y == 0).
struct HandshakeHeader {
    PublicKey ephemeral_public{};
    std::uint32_t signed_prekey_id = 0;
    std::optional<std::uint32_t> one_time_prekey_id;

    bool operator==(const HandshakeHeader&) const = default;
};

// Cleartext header of every message. Serialized verbatim as the associated
// data authenticated by the message key: (x, y, sender ratchet public,
// initiator and responder identity publics, handshake fields when present).
struct EnvelopeHeader {
    std::uint32_t ratchet_index = 0;   // x: increments by one per direction switch
    std::uint32_t message_index = 0;   // y: position within the sending chain
    PublicKey ratchet_public{};        // sender's current ratchet public
    PublicKey initiator_identity{};    // ipk of the session initiator (Ed25519 encoding)
    PublicKey responder_identity{};
    std::optional<HandshakeHeader> handshake;

    bool operator==(const EnvelopeHeader&) const = default;
};

struct Envelope {
    EnvelopeHeader header;
    AeadCiphertext payload;

    Bytes associated_data() const;
    Bytes serialize() const;
    static Envelope deserialize(ByteSpan data);

    bool operator==(const Envelope& other) const {
        return header == other.header && payload.iv == other.payload.iv &&
               payload.ciphertext == other.payload.ciphertext && payload.tag == other.payload.tag;
    }
};

}  // namespace pksim::crypto
