// SPDX-License-Identifier: Apache-2.0
#include "pksim/server/bundle_format.hpp"

#include <cstdio>

#include "json.hpp"
#include "pksim/util/bytes.hpp"

namespace pksim::server {

namespace {

using nlohmann::ordered_json;

std::string hex_padded(std::uint32_t value, int width, bool uppercase) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), uppercase ? "%0*X" : "%0*x", width, value);
    return buf;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex, const char* field) {
    Bytes b = from_hex(hex);
    if (b.size() != N) throw std::invalid_argument(std::string("bad length for field ") + field);
    std::array<std::uint8_t, N> out;
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

}  // namespace

std::string format_registration_id(std::uint32_t id) { return hex_padded(id, 8, true); }
std::string format_signed_prekey_id(std::uint32_t id) { return hex_padded(id, 6, false); }
std::string format_one_time_id(std::uint32_t id) { return hex_padded(id, 5, false); }

std::string to_listing_json(const PrekeyBundle& bundle) {
    ordered_json j;
    j["jid"] = bundle.jid.str();
    j["t"] = std::to_string(bundle.timestamp);
    j["registration"] = format_registration_id(bundle.registration_id);
    j["type"] = hex_padded(bundle.key_type, 2, false);
    j["identity"] = to_hex(bundle.identity);
    j["skey"] = ordered_json{{"id", format_signed_prekey_id(bundle.signed_prekey.id)},
                             {"value", to_hex(bundle.signed_prekey.pub)},
                             {"signature", to_hex(bundle.signed_prekey.signature)}};
    if (bundle.one_time_prekey) {
        j["key"] = ordered_json{{"id", format_one_time_id(bundle.one_time_prekey->id)},
                                {"value", to_hex(bundle.one_time_prekey->pub)}};
    }
    return j.dump(2);
}

PrekeyBundle from_listing_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    PrekeyBundle bundle;
    bundle.jid = Jid::parse(j.at("jid").get<std::string>());
    bundle.timestamp = std::stoull(j.at("t").get<std::string>());
    bundle.registration_id =
        static_cast<std::uint32_t>(std::stoul(j.at("registration").get<std::string>(), nullptr, 16));
    bundle.key_type =
        static_cast<std::uint8_t>(std::stoul(j.at("type").get<std::string>(), nullptr, 16));
    bundle.identity = fixed_from_hex<32>(j.at("identity").get<std::string>(), "identity");

    const auto& skey = j.at("skey");
    bundle.signed_prekey.id =
        static_cast<std::uint32_t>(std::stoul(skey.at("id").get<std::string>(), nullptr, 16));
    bundle.signed_prekey.pub = fixed_from_hex<32>(skey.at("value").get<std::string>(), "skey.value");
    bundle.signed_prekey.signature =
        fixed_from_hex<64>(skey.at("signature").get<std::string>(), "skey.signature");

    if (j.contains("key")) {
        const auto& key = j.at("key");
        OneTimePrekeyRecord otpk;
        otpk.id = static_cast<std::uint32_t>(std::stoul(key.at("id").get<std::string>(), nullptr, 16));
        otpk.pub = fixed_from_hex<32>(key.at("value").get<std::string>(), "key.value");
        bundle.one_time_prekey = otpk;
    }
    return bundle;
}

}  // namespace pksim::server
