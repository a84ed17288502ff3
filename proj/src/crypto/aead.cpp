// SPDX-License-Identifier: Apache-2.0
#include "pksim/crypto/aead.hpp"

#include <openssl/evp.h>
#include <sodium.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace pksim::crypto {

namespace {

constexpr std::size_t kIvBytes = 16;

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

struct AeadKeys {
    Key32 cipher_key;
    Key32 mac_key;
};

AeadKeys expand_message_key(const Key32& message_key) {
    Key32 zero_salt{};
    Bytes okm = hkdf_sha256(zero_salt, message_key,
                            ByteSpan(reinterpret_cast<const std::uint8_t*>(kAeadExpandInfo.data()),
                                     kAeadExpandInfo.size()),
                            64);
    AeadKeys keys;
    std::memcpy(keys.cipher_key.data(), okm.data(), 32);
    std::memcpy(keys.mac_key.data(), okm.data() + 32, 32);
    return keys;
}

Key32 compute_tag(const Key32& mac_key, ByteSpan associated_data, const Bytes& iv,
                  const Bytes& ciphertext) {
    ByteWriter w;
    w.prefixed(associated_data);
    w.prefixed(iv);
    w.prefixed(ciphertext);
    return hmac_sha256(mac_key, w.bytes());
}

}  // namespace

Bytes aes256_cbc_encrypt(const Key32& key, const Bytes& iv, ByteSpan plaintext) {
    if (iv.size() != kIvBytes) throw std::invalid_argument("bad IV length");
    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(), iv.data()) != 1)
        throw std::runtime_error("cipher init failed");
    Bytes out(plaintext.size() + kIvBytes);
    int len1 = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len1, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw std::runtime_error("encrypt failed");
    int len2 = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1)
        throw std::runtime_error("encrypt finalize failed");
    out.resize(static_cast<std::size_t>(len1 + len2));
    return out;
}

std::optional<Bytes> aes256_cbc_decrypt(const Key32& key, const Bytes& iv, ByteSpan ciphertext) {
    if (iv.size() != kIvBytes) return std::nullopt;
    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(), iv.data()) != 1)
        return std::nullopt;
    Bytes out(ciphertext.size() + kIvBytes);
    int len1 = 0;
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &len1, ciphertext.data(),
                          static_cast<int>(ciphertext.size())) != 1)
        return std::nullopt;
    int len2 = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) return std::nullopt;
    out.resize(static_cast<std::size_t>(len1 + len2));
    return out;
}

AeadCiphertext aead_encrypt(const Key32& message_key, ByteSpan plaintext,
                            ByteSpan associated_data, Rng& rng) {
    AeadKeys keys = expand_message_key(message_key);
    AeadCiphertext out;
    out.iv.resize(kIvBytes);
    rng.fill(out.iv);
    out.ciphertext = aes256_cbc_encrypt(keys.cipher_key, out.iv, plaintext);
    Key32 tag = compute_tag(keys.mac_key, associated_data, out.iv, out.ciphertext);
    out.tag.assign(tag.begin(), tag.end());
    return out;
}

std::optional<Bytes> aead_decrypt(const Key32& message_key, const AeadCiphertext& ct,
                                  ByteSpan associated_data) {
    AeadKeys keys = expand_message_key(message_key);
    Key32 expected = compute_tag(keys.mac_key, associated_data, ct.iv, ct.ciphertext);
    if (ct.tag.size() != expected.size() ||
        sodium_memcmp(expected.data(), ct.tag.data(), expected.size()) != 0)
        return std::nullopt;
    return aes256_cbc_decrypt(keys.cipher_key, ct.iv, ct.ciphertext);
}

}  // namespace pksim::crypto
