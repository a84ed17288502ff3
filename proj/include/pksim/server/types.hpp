// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pksim/crypto/session.hpp"
#include "pksim/server/jid.hpp"

namespace pksim::server {

using crypto::PublicKey;
using crypto::Signature;

struct SignedPrekeyRecord {
    std::uint32_t id = 0;
    PublicKey pub{};
    Signature signature{};
};

struct OneTimePrekeyRecord {
    std::uint32_t id = 0;
    PublicKey pub{};
};

// The record served by the bundle infoquery. Field set mirrors the wire
// format: jid, t, registration, type, identity, skey{id,value,signature},
// key{id,value} with `key` omitted when the store is empty.
struct PrekeyBundle {
    Jid jid;
    std::uint64_t timestamp = 0;  // epoch seconds of the last relevant upload
    std::uint32_t registration_id = 0;
    std::uint8_t key_type = 0x05;  // djb
    PublicKey identity{};
    SignedPrekeyRecord signed_prekey;
    std::optional<OneTimePrekeyRecord> one_time_prekey;

    crypto::HandshakeBundle handshake_view() const {
        crypto::HandshakeBundle view;
        view.identity = identity;
        view.signed_prekey_id = signed_prekey.id;
        view.signed_prekey = signed_prekey.pub;
        view.signed_prekey_signature = signed_prekey.signature;
        if (one_time_prekey) view.one_time_prekey = {one_time_prekey->id, one_time_prekey->pub};
        return view;
    }
};

struct RateLimitConfig {
    std::uint32_t bundles_per_account_per_window = 1;
    std::int64_t window_ms = 60'000;
};

struct FaultModes {
    double double_handout_probability = 0.0;
    double refill_reject_probability = 0.0;
};

struct ServerConfig {
    std::uint32_t watermark_threshold = 11;
    double overload_soft_rps = 50.0;
    double overload_hard_rps = 2000.0;
    std::optional<RateLimitConfig> rate_limit;
    FaultModes fault_modes;
    bool block_list_effect = false;

    // Countermeasure switches.
    bool hash_key_ids = false;         // ids are key hashes; monotonicity not enforced
    bool on_demand_rotation = false;   // serving a keyless bundle requests a rotation

    std::uint64_t epoch_base_seconds = 1'740'000'000;
};

struct DeviceRegistration {
    std::uint32_t registration_id = 0;
    PublicKey identity{};
    SignedPrekeyRecord signed_prekey;
    std::vector<OneTimePrekeyRecord> one_time;
    std::string profile_handle;
};

struct PrekeyUpload {
    std::vector<OneTimePrekeyRecord> one_time;
    // On-demand rotation rides along with a refill batch.
    std::optional<SignedPrekeyRecord> rotate_signed;
};

enum class FetchStatus { Ok, ServiceUnavailable, RateLimited, Blocked };

struct FetchResult {
    FetchStatus status = FetchStatus::Ok;
    std::optional<PrekeyBundle> bundle;

    bool ok() const { return status == FetchStatus::Ok; }
};

enum class UploadStatus { Ok, ServiceUnavailable };

class NotFoundError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class ProtocolError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pksim::server
