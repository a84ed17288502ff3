// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "pksim/util/bytes.hpp"

namespace pksim::crypto {

using Key32 = std::array<std::uint8_t, 32>;

// Derivation labels. One fixed constant per derivation site so that an
// independent straight-line evaluation of the key schedule reproduces the
// exact same bytes.
inline constexpr std::string_view kRootInitInfo = "pksim/v1/rk-init";
inline constexpr std::string_view kRatchetStepInfo = "pksim/v1/rk-step";
inline constexpr std::string_view kAeadExpandInfo = "pksim/v1/aead";
inline constexpr std::uint8_t kMessageKeySeed = 0x01;
inline constexpr std::uint8_t kChainKeySeed = 0x02;

Key32 hmac_sha256(ByteSpan key, ByteSpan data);

// RFC 5869 HKDF with HMAC-SHA256.
Bytes hkdf_sha256(ByteSpan salt, ByteSpan ikm, ByteSpan info, std::size_t length);

// rk_0 from the concatenated handshake DH outputs (dh4 appended when present).
Key32 kdf_root_initial(ByteSpan dh_concat);

// One DH-ratchet step: (rk_x, DH output) -> (rk_{x+1}, ck_{x,0}).
struct RatchetStepKeys {
    Key32 root_key;
    Key32 chain_key;
};
RatchetStepKeys kdf_ratchet_step(const Key32& root_key, const Key32& dh_output);

// One symmetric step: ck_{x,y} -> (ck_{x,y+1}, mk_{x,y}), via single-byte
// HMAC inputs (0x01 message, 0x02 chain).
struct MessageStepKeys {
    Key32 chain_key;
    Key32 message_key;
};
MessageStepKeys kdf_message_step(const Key32& chain_key);

}  // namespace pksim::crypto
