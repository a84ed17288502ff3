// SPDX-License-Identifier: Apache-2.0
#include "pksim/server/server.hpp"

#include <algorithm>

#include "pksim/util/bytes.hpp"

namespace pksim::server {

PrekeyServer::DeviceEntry& PrekeyServer::entry_unlocked(const Jid& jid) {
    auto account = accounts_.find(jid.phone_number);
    if (account == accounts_.end()) throw NotFoundError("unknown phone number: " + jid.phone_number);
    auto device = account->second.devices.find(jid.device_id);
    if (device == account->second.devices.end()) throw NotFoundError("unknown jid: " + jid.str());
    return *device->second;
}

const PrekeyServer::DeviceEntry* PrekeyServer::find_entry(const Jid& jid) const {
    auto account = accounts_.find(jid.phone_number);
    if (account == accounts_.end()) return nullptr;
    auto device = account->second.devices.find(jid.device_id);
    if (device == account->second.devices.end()) return nullptr;
    return device->second.get();
}

Jid PrekeyServer::register_device(const std::string& phone_number,
                                  const DeviceRegistration& registration, RegistrationKind kind,
                                  std::int64_t now_ms) {
    std::unique_lock lock(topology_mutex_);
    Account& account = accounts_[phone_number];

    int device_id = 0;
    switch (kind) {
        case RegistrationKind::Main:
            if (account.devices.count(0)) throw ProtocolError("duplicate main device registration");
            device_id = 0;
            break;
        case RegistrationKind::MainReset:
            // Re-setup keeps device id 0 but resets key material and the
            // companion index; existing companions are unlinked.
            account.devices.clear();
            account.next_companion_id = 1;
            device_id = 0;
            break;
        case RegistrationKind::Companion:
            if (!account.devices.count(0)) throw ProtocolError("companion requires a main device");
            device_id = account.next_companion_id++;
            break;
    }

    auto entry = std::make_unique<DeviceEntry>();
    entry->jid = Jid{phone_number, device_id};
    entry->registration_id = registration.registration_id;
    entry->identity = registration.identity;
    entry->signed_prekey = registration.signed_prekey;
    for (const auto& otpk : registration.one_time) entry->one_time_store[otpk.id] = otpk.pub;
    if (!registration.one_time.empty()) {
        entry->max_seen_otpk_id = registration.one_time.back().id;
        for (const auto& otpk : registration.one_time)
            entry->max_seen_otpk_id = std::max<std::uint64_t>(entry->max_seen_otpk_id, otpk.id);
        entry->has_seen_otpk = true;
    }
    entry->last_update_epoch = epoch_seconds(now_ms);
    entry->profile_handle = registration.profile_handle;

    Jid jid = entry->jid;
    account.devices[device_id] = std::move(entry);
    return jid;
}

void PrekeyServer::unlink_device(const Jid& jid) {
    std::unique_lock lock(topology_mutex_);
    auto account = accounts_.find(jid.phone_number);
    if (account == accounts_.end()) throw NotFoundError("unknown phone number: " + jid.phone_number);
    if (jid.device_id == 0) throw ProtocolError("cannot unlink the main device");
    if (account->second.devices.erase(jid.device_id) == 0)
        throw NotFoundError("unknown jid: " + jid.str());
}

bool PrekeyServer::has_account(const std::string& phone_number) const {
    std::shared_lock lock(topology_mutex_);
    return accounts_.count(phone_number) > 0;
}

std::vector<int> PrekeyServer::query_devices(const std::string& requester_phone,
                                             const std::string& phone_number) const {
    std::shared_lock lock(topology_mutex_);
    auto account = accounts_.find(phone_number);
    if (account == accounts_.end()) return {};
    if (config_.block_list_effect && account->second.blocked.count(requester_phone)) return {};
    std::vector<int> ids;
    ids.reserve(account->second.devices.size());
    for (const auto& [id, entry] : account->second.devices) ids.push_back(id);
    return ids;  // map iteration is already ascending
}

FetchResult PrekeyServer::fetch_bundle(const std::string& requester_phone, const Jid& target,
                                       std::int64_t now_ms, double load_rps) {
    bool notify = false;
    FetchResult result;
    {
        std::shared_lock topo(topology_mutex_);
        auto account = accounts_.find(target.phone_number);
        if (account == accounts_.end())
            throw NotFoundError("unknown phone number: " + target.phone_number);
        if (config_.block_list_effect && account->second.blocked.count(requester_phone))
            return FetchResult{FetchStatus::Blocked, std::nullopt};
        auto device = account->second.devices.find(target.device_id);
        if (device == account->second.devices.end())
            throw NotFoundError("unknown jid: " + target.str());
        DeviceEntry& entry = *device->second;

        // Hard overload clogs retrieval for every requester of this device.
        if (load_rps >= config_.overload_hard_rps)
            return FetchResult{FetchStatus::ServiceUnavailable, std::nullopt};

        if (config_.rate_limit) {
            std::scoped_lock gl(grants_mutex_);
            auto& window = grants_[{requester_phone, target.str()}];
            while (!window.empty() && window.front() <= now_ms - config_.rate_limit->window_ms)
                window.pop_front();
            if (window.size() >= config_.rate_limit->bundles_per_account_per_window)
                return FetchResult{FetchStatus::RateLimited, std::nullopt};
        }

        if (load_rps > config_.overload_soft_rps) {
            double p = (load_rps - config_.overload_soft_rps) /
                       (config_.overload_hard_rps - config_.overload_soft_rps);
            std::scoped_lock rl(rng_mutex_);
            if (rng_.chance(p)) return FetchResult{FetchStatus::ServiceUnavailable, std::nullopt};
        }

        std::scoped_lock dl(entry.mutex);
        PrekeyBundle bundle;
        bundle.jid = entry.jid;
        bundle.timestamp = entry.last_update_epoch;
        bundle.registration_id = entry.registration_id;
        bundle.identity = entry.identity;
        bundle.signed_prekey = entry.signed_prekey;

        std::size_t size_before = entry.one_time_store.size();
        if (size_before > 0) {
            std::size_t pick;
            bool double_handout;
            {
                std::scoped_lock rl(rng_mutex_);
                pick = rng_.index(size_before);
                double_handout = rng_.chance(config_.fault_modes.double_handout_probability);
            }
            auto it = entry.one_time_store.begin();
            std::advance(it, pick);
            bundle.one_time_prekey = OneTimePrekeyRecord{it->first, it->second};
            if (!double_handout) entry.one_time_store.erase(it);

            if (size_before >= config_.watermark_threshold &&
                entry.one_time_store.size() < config_.watermark_threshold &&
                !entry.pending_notification) {
                entry.pending_notification = true;
                notify = true;
            }
        } else if (config_.on_demand_rotation) {
            entry.rotate_requested = true;
        }

        if (config_.rate_limit) {
            std::scoped_lock gl(grants_mutex_);
            grants_[{requester_phone, target.str()}].push_back(now_ms);
        }
        result = FetchResult{FetchStatus::Ok, std::move(bundle)};
    }
    if (notify && sink_) sink_(target, now_ms);
    return result;
}

void PrekeyServer::validate_upload_ids(const DeviceEntry& entry,
                                       const std::vector<OneTimePrekeyRecord>& batch) const {
    std::set<std::uint32_t> seen;
    for (const auto& otpk : batch) {
        if (!seen.insert(otpk.id).second)
            throw ProtocolError("duplicate one-time prekey id in batch");
        if (!config_.hash_key_ids && entry.has_seen_otpk && otpk.id <= entry.max_seen_otpk_id)
            throw ProtocolError("one-time prekey ids must be strictly increasing");
    }
}

UploadStatus PrekeyServer::upload_prekeys(const Jid& jid, const PrekeyUpload& upload,
                                          std::int64_t now_ms) {
    std::shared_lock topo(topology_mutex_);
    DeviceEntry& entry = entry_unlocked(jid);
    std::scoped_lock dl(entry.mutex);

    validate_upload_ids(entry, upload.one_time);
    if (upload.rotate_signed) {
        if (config_.hash_key_ids) {
            if (upload.rotate_signed->id == entry.signed_prekey.id)
                throw ProtocolError("rotated signed prekey id must differ");
        } else if (upload.rotate_signed->id <= entry.signed_prekey.id) {
            throw ProtocolError("signed prekey id must increase");
        }
        if (!crypto::verify_identity_signature(entry.identity, upload.rotate_signed->pub,
                                               upload.rotate_signed->signature))
            throw ProtocolError("invalid signed prekey signature");
    }

    {
        std::scoped_lock rl(rng_mutex_);
        if (rng_.chance(config_.fault_modes.refill_reject_probability))
            return UploadStatus::ServiceUnavailable;
    }

    // Pushing new one-time prekeys invalidates any previous ones.
    entry.one_time_store.clear();
    for (const auto& otpk : upload.one_time) {
        entry.one_time_store[otpk.id] = otpk.pub;
        entry.max_seen_otpk_id = std::max<std::uint64_t>(entry.max_seen_otpk_id, otpk.id);
        entry.has_seen_otpk = true;
    }
    if (upload.rotate_signed) {
        entry.signed_prekey = *upload.rotate_signed;
        entry.rotate_requested = false;
    }
    entry.last_update_epoch = epoch_seconds(now_ms);
    entry.pending_notification = false;
    return UploadStatus::Ok;
}

void PrekeyServer::rotate_signed_prekey(const Jid& jid, const SignedPrekeyRecord& fresh,
                                        std::int64_t now_ms) {
    std::shared_lock topo(topology_mutex_);
    DeviceEntry& entry = entry_unlocked(jid);
    std::scoped_lock dl(entry.mutex);

    if (config_.hash_key_ids) {
        if (fresh.id == entry.signed_prekey.id)
            throw ProtocolError("rotated signed prekey id must differ");
    } else if (fresh.id <= entry.signed_prekey.id) {
        throw ProtocolError("signed prekey id must increase");
    }
    if (!crypto::verify_identity_signature(entry.identity, fresh.pub, fresh.signature))
        throw ProtocolError("invalid signed prekey signature");

    entry.signed_prekey = fresh;
    entry.rotate_requested = false;
    entry.last_update_epoch = epoch_seconds(now_ms);
}

void PrekeyServer::block_contact(const std::string& owner_phone,
                                 const std::string& blocked_phone) {
    std::unique_lock lock(topology_mutex_);
    auto account = accounts_.find(owner_phone);
    if (account == accounts_.end()) throw NotFoundError("unknown phone number: " + owner_phone);
    account->second.blocked.insert(blocked_phone);
}

bool PrekeyServer::has_pending_notification(const Jid& jid) const {
    std::shared_lock topo(topology_mutex_);
    const DeviceEntry* entry = find_entry(jid);
    if (!entry) throw NotFoundError("unknown jid: " + jid.str());
    std::scoped_lock dl(entry->mutex);
    return entry->pending_notification;
}

bool PrekeyServer::rotation_requested(const Jid& jid) const {
    std::shared_lock topo(topology_mutex_);
    const DeviceEntry* entry = find_entry(jid);
    if (!entry) throw NotFoundError("unknown jid: " + jid.str());
    std::scoped_lock dl(entry->mutex);
    return entry->rotate_requested;
}

std::size_t PrekeyServer::one_time_count(const Jid& jid) const {
    std::shared_lock topo(topology_mutex_);
    const DeviceEntry* entry = find_entry(jid);
    if (!entry) throw NotFoundError("unknown jid: " + jid.str());
    std::scoped_lock dl(entry->mutex);
    return entry->one_time_store.size();
}

std::uint64_t PrekeyServer::last_update_epoch(const Jid& jid) const {
    std::shared_lock topo(topology_mutex_);
    const DeviceEntry* entry = find_entry(jid);
    if (!entry) throw NotFoundError("unknown jid: " + jid.str());
    std::scoped_lock dl(entry->mutex);
    return entry->last_update_epoch;
}

}  // namespace pksim::server
