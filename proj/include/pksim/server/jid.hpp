// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace pksim::server {

inline constexpr const char* kDefaultServerName = "s.whatsapp.net";

// Jabber-style device address. Device 0 is the main device and renders
// without the device part: "<phone>@<server>" vs "<phone>:<dev>@<server>".
struct Jid {
    std::string phone_number;
    int device_id = 0;
    std::string server_name = kDefaultServerName;

    std::string str() const {
        if (device_id == 0) return phone_number + "@" + server_name;
        return phone_number + ":" + std::to_string(device_id) + "@" + server_name;
    }

    static Jid parse(const std::string& text) {
        auto at = text.find('@');
        if (at == std::string::npos || at == 0) throw std::invalid_argument("malformed jid: " + text);
        Jid jid;
        jid.server_name = text.substr(at + 1);
        std::string user = text.substr(0, at);
        auto colon = user.find(':');
        if (colon == std::string::npos) {
            jid.phone_number = user;
        } else {
            jid.phone_number = user.substr(0, colon);
            std::string dev = user.substr(colon + 1);
            if (dev.empty()) throw std::invalid_argument("malformed jid: " + text);
            jid.device_id = std::stoi(dev);
            if (jid.device_id < 0) throw std::invalid_argument("negative device id: " + text);
        }
        if (jid.phone_number.empty() || jid.server_name.empty())
            throw std::invalid_argument("malformed jid: " + text);
        return jid;
    }

    auto operator<=>(const Jid&) const = default;
};

}  // namespace pksim::server
