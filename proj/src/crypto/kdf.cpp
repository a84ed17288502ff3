// SPDX-License-Identifier: Apache-2.0
#include "pksim/crypto/kdf.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace pksim::crypto {

namespace {

ByteSpan as_span(std::string_view s) {
    return ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

}  // namespace

Key32 hmac_sha256(ByteSpan key, ByteSpan data) {
    crypto_auth_hmacsha256_state state;
    crypto_auth_hmacsha256_init(&state, key.data(), key.size());
    crypto_auth_hmacsha256_update(&state, data.data(), data.size());
    Key32 out;
    crypto_auth_hmacsha256_final(&state, out.data());
    return out;
}

Bytes hkdf_sha256(ByteSpan salt, ByteSpan ikm, ByteSpan info, std::size_t length) {
    if (length > 255 * 32) throw std::invalid_argument("hkdf output too long");
    Key32 prk = hmac_sha256(salt, ikm);

    Bytes okm;
    okm.reserve(length);
    Bytes block;
    std::uint8_t counter = 1;
    while (okm.size() < length) {
        crypto_auth_hmacsha256_state state;
        crypto_auth_hmacsha256_init(&state, prk.data(), prk.size());
        crypto_auth_hmacsha256_update(&state, block.data(), block.size());
        crypto_auth_hmacsha256_update(&state, info.data(), info.size());
        crypto_auth_hmacsha256_update(&state, &counter, 1);
        Key32 t;
        crypto_auth_hmacsha256_final(&state, t.data());
        block.assign(t.begin(), t.end());
        std::size_t take = std::min<std::size_t>(32, length - okm.size());
        okm.insert(okm.end(), t.begin(), t.begin() + take);
        ++counter;
    }
    return okm;
}

Key32 kdf_root_initial(ByteSpan dh_concat) {
    Key32 zero_salt{};
    Bytes okm = hkdf_sha256(zero_salt, dh_concat, as_span(kRootInitInfo), 32);
    Key32 out;
    std::memcpy(out.data(), okm.data(), 32);
    return out;
}

RatchetStepKeys kdf_ratchet_step(const Key32& root_key, const Key32& dh_output) {
    Bytes okm = hkdf_sha256(root_key, dh_output, as_span(kRatchetStepInfo), 64);
    RatchetStepKeys keys;
    std::memcpy(keys.root_key.data(), okm.data(), 32);
    std::memcpy(keys.chain_key.data(), okm.data() + 32, 32);
    return keys;
}

MessageStepKeys kdf_message_step(const Key32& chain_key) {
    MessageStepKeys keys;
    keys.message_key = hmac_sha256(chain_key, ByteSpan(&kMessageKeySeed, 1));
    keys.chain_key = hmac_sha256(chain_key, ByteSpan(&kChainKeySeed, 1));
    return keys;
}

}  // namespace pksim::crypto
