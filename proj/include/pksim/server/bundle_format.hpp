// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pksim/server/types.hpp"

namespace pksim::server {

// Textual bundle record with the wire field names and id widths:
// registration zero-padded to 8 hex digits (uppercase), signed prekey id to
// 6, one-time prekey id to 5; byte arrays as lowercase hex; `key` omitted
// when no one-time prekey is available.
std::string to_listing_json(const PrekeyBundle& bundle);
PrekeyBundle from_listing_json(const std::string& text);

std::string format_registration_id(std::uint32_t id);  // "000005DB"
std::string format_signed_prekey_id(std::uint32_t id); // "000001"
std::string format_one_time_id(std::uint32_t id);      // "0001a"

}  // namespace pksim::server
