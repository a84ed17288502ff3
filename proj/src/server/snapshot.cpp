// SPDX-License-Identifier: Apache-2.0
#include "json.hpp"
#include "pksim/server/server.hpp"
#include "pksim/util/bytes.hpp"

namespace pksim::server {

namespace {

using nlohmann::ordered_json;

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex) {
    Bytes b = from_hex(hex);
    if (b.size() != N) throw std::invalid_argument("bad key length in snapshot");
    std::array<std::uint8_t, N> out;
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

}  // namespace

std::string PrekeyServer::save_snapshot() const {
    std::shared_lock topo(topology_mutex_);
    ordered_json root;
    root["format"] = "pksim-server-snapshot";
    root["version"] = 1;
    ordered_json accounts = ordered_json::array();
    for (const auto& [phone, account] : accounts_) {
        ordered_json a;
        a["phone"] = phone;
        a["nextCompanionId"] = account.next_companion_id;
        a["blocked"] = account.blocked;
        ordered_json devices = ordered_json::array();
        for (const auto& [id, entry] : account.devices) {
            std::scoped_lock dl(entry->mutex);
            ordered_json d;
            d["deviceId"] = id;
            d["registration"] = entry->registration_id;
            d["identity"] = to_hex(entry->identity);
            d["signedPrekey"] = ordered_json{{"id", entry->signed_prekey.id},
                                             {"value", to_hex(entry->signed_prekey.pub)},
                                             {"signature", to_hex(entry->signed_prekey.signature)}};
            ordered_json store = ordered_json::array();
            for (const auto& [key_id, pub] : entry->one_time_store)
                store.push_back(ordered_json{{"id", key_id}, {"value", to_hex(pub)}});
            d["oneTimeStore"] = std::move(store);
            d["lastUpdateEpoch"] = entry->last_update_epoch;
            d["maxSeenOtpkId"] = entry->max_seen_otpk_id;
            d["hasSeenOtpk"] = entry->has_seen_otpk;
            d["pendingNotification"] = entry->pending_notification;
            d["profile"] = entry->profile_handle;
            devices.push_back(std::move(d));
        }
        a["devices"] = std::move(devices);
        accounts.push_back(std::move(a));
    }
    root["accounts"] = std::move(accounts);
    return root.dump(2);
}

void PrekeyServer::load_snapshot(const std::string& json_text) {
    ordered_json root = ordered_json::parse(json_text);
    if (root.at("format").get<std::string>() != "pksim-server-snapshot" ||
        root.at("version").get<int>() != 1)
        throw std::invalid_argument("unsupported snapshot format");

    std::unique_lock topo(topology_mutex_);
    accounts_.clear();
    for (const auto& a : root.at("accounts")) {
        Account account;
        account.next_companion_id = a.at("nextCompanionId").get<int>();
        for (const auto& b : a.at("blocked")) account.blocked.insert(b.get<std::string>());
        std::string phone = a.at("phone").get<std::string>();
        for (const auto& d : a.at("devices")) {
            auto entry = std::make_unique<DeviceEntry>();
            entry->jid = Jid{phone, d.at("deviceId").get<int>()};
            entry->registration_id = d.at("registration").get<std::uint32_t>();
            entry->identity = fixed_from_hex<32>(d.at("identity").get<std::string>());
            const auto& spk = d.at("signedPrekey");
            entry->signed_prekey.id = spk.at("id").get<std::uint32_t>();
            entry->signed_prekey.pub = fixed_from_hex<32>(spk.at("value").get<std::string>());
            entry->signed_prekey.signature =
                fixed_from_hex<64>(spk.at("signature").get<std::string>());
            for (const auto& k : d.at("oneTimeStore"))
                entry->one_time_store[k.at("id").get<std::uint32_t>()] =
                    fixed_from_hex<32>(k.at("value").get<std::string>());
            entry->last_update_epoch = d.at("lastUpdateEpoch").get<std::uint64_t>();
            entry->max_seen_otpk_id = d.at("maxSeenOtpkId").get<std::uint64_t>();
            entry->has_seen_otpk = d.at("hasSeenOtpk").get<bool>();
            entry->pending_notification = d.at("pendingNotification").get<bool>();
            entry->profile_handle = d.at("profile").get<std::string>();
            account.devices[entry->jid.device_id] = std::move(entry);
        }
        accounts_[phone] = std::move(account);
    }
}

}  // namespace pksim::server
