// SPDX-License-Identifier: Apache-2.0
#include "pksim/crypto/envelope.hpp"

#include <stdexcept>

namespace pksim::crypto {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kFlagHandshake = 0x01;
constexpr std::uint8_t kFlagOneTimePrekey = 0x02;

void write_header(ByteWriter& w, const EnvelopeHeader& h) {
    w.u8(kVersion);
    std::uint8_t flags = 0;
    if (h.handshake) {
        flags |= kFlagHandshake;
        if (h.handshake->one_time_prekey_id) flags |= kFlagOneTimePrekey;
    }
    w.u8(flags);
    w.u32(h.ratchet_index);
    w.u32(h.message_index);
    w.raw(h.ratchet_public);
    w.raw(h.initiator_identity);
    w.raw(h.responder_identity);
    if (h.handshake) {
        w.raw(h.handshake->ephemeral_public);
        w.u32(h.handshake->signed_prekey_id);
        if (h.handshake->one_time_prekey_id) w.u32(*h.handshake->one_time_prekey_id);
    }
}

EnvelopeHeader read_header(ByteReader& r) {
    if (r.u8() != kVersion) throw std::invalid_argument("unsupported envelope version");
    std::uint8_t flags = r.u8();
    EnvelopeHeader h;
    h.ratchet_index = r.u32();
    h.message_index = r.u32();
    h.ratchet_public = r.fixed<kPublicKeyBytes>();
    h.initiator_identity = r.fixed<kPublicKeyBytes>();
    h.responder_identity = r.fixed<kPublicKeyBytes>();
    if (flags & kFlagHandshake) {
        HandshakeHeader hs;
        hs.ephemeral_public = r.fixed<kPublicKeyBytes>();
        hs.signed_prekey_id = r.u32();
        if (flags & kFlagOneTimePrekey) hs.one_time_prekey_id = r.u32();
        h.handshake = hs;
    }
    return h;
}

}  // namespace

Bytes Envelope::associated_data() const {
    ByteWriter w;
    write_header(w, header);
    return w.take();
}

Bytes Envelope::serialize() const {
    ByteWriter w;
    write_header(w, header);
    w.prefixed(payload.iv);
    w.prefixed(payload.ciphertext);
    w.prefixed(payload.tag);
    return w.take();
}

Envelope Envelope::deserialize(ByteSpan data) {
    ByteReader r(data);
    Envelope env;
    env.header = read_header(r);
    env.payload.iv = r.prefixed();
    env.payload.ciphertext = r.prefixed();
    env.payload.tag = r.prefixed();
    if (!r.empty()) throw std::invalid_argument("trailing bytes after envelope");
    return env;
}

}  // namespace pksim::crypto
