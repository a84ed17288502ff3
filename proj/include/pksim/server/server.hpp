// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>

#include "pksim/server/types.hpp"
#include "pksim/sim/rng.hpp"

namespace pksim::server {

enum class RegistrationKind { Main, Companion, MainReset };

// Central key-distribution state machine. Linearizable: operations on one
// device serialize on that device's record, operations on different devices
// are independent. Time never comes from the clock; callers pass simulated
// milliseconds. Load-dependent behavior (503s) is driven by the request rate
// the caller observed for the target device.
class PrekeyServer {
public:
    using NotificationSink = std::function<void(const Jid&, std::int64_t now_ms)>;

    PrekeyServer(ServerConfig config, Rng rng) : config_(std::move(config)), rng_(rng) {}

    const ServerConfig& config() const { return config_; }
    void set_notification_sink(NotificationSink sink) { sink_ = std::move(sink); }

    Jid register_device(const std::string& phone_number, const DeviceRegistration& registration,
                        RegistrationKind kind, std::int64_t now_ms);
    void unlink_device(const Jid& jid);

    bool has_account(const std::string& phone_number) const;
    std::vector<int> query_devices(const std::string& requester_phone,
                                   const std::string& phone_number) const;

    FetchResult fetch_bundle(const std::string& requester_phone, const Jid& target,
                             std::int64_t now_ms, double load_rps);

    UploadStatus upload_prekeys(const Jid& jid, const PrekeyUpload& upload, std::int64_t now_ms);
    void rotate_signed_prekey(const Jid& jid, const SignedPrekeyRecord& fresh,
                              std::int64_t now_ms);

    void block_contact(const std::string& owner_phone, const std::string& blocked_phone);

    // Observability for devices, tests and reports.
    bool has_pending_notification(const Jid& jid) const;
    bool rotation_requested(const Jid& jid) const;
    std::size_t one_time_count(const Jid& jid) const;
    std::uint64_t last_update_epoch(const Jid& jid) const;

    // Scenario-replay snapshots (whole key-store state as JSON text).
    std::string save_snapshot() const;
    void load_snapshot(const std::string& json_text);

private:
    struct DeviceEntry {
        Jid jid;
        std::uint32_t registration_id = 0;
        PublicKey identity{};
        SignedPrekeyRecord signed_prekey;
        std::map<std::uint32_t, PublicKey> one_time_store;
        std::uint64_t last_update_epoch = 0;
        std::uint64_t max_seen_otpk_id = 0;
        bool has_seen_otpk = false;
        bool pending_notification = false;
        bool rotate_requested = false;
        std::string profile_handle;
        mutable std::mutex mutex;
    };

    struct Account {
        std::map<int, std::unique_ptr<DeviceEntry>> devices;
        int next_companion_id = 1;
        std::set<std::string> blocked;
    };

    DeviceEntry& entry_unlocked(const Jid& jid);
    const DeviceEntry* find_entry(const Jid& jid) const;
    std::uint64_t epoch_seconds(std::int64_t now_ms) const {
        return config_.epoch_base_seconds + static_cast<std::uint64_t>(now_ms / 1000);
    }
    void validate_upload_ids(const DeviceEntry& entry,
                             const std::vector<OneTimePrekeyRecord>& batch) const;

    ServerConfig config_;
    Rng rng_;
    mutable std::mutex rng_mutex_;
    NotificationSink sink_;

    std::map<std::string, Account> accounts_;
    mutable std::shared_mutex topology_mutex_;

    // Granted bundles per (requester, target device) for rate limiting.
    std::map<std::pair<std::string, std::string>, std::deque<std::int64_t>> grants_;
    std::mutex grants_mutex_;
};

}  // namespace pksim::server
