// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pksim {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

inline std::string to_hex(ByteSpan data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

// Little-endian writer used for envelope and log framing.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    template <std::size_t N>
    void raw(const std::array<std::uint8_t, N>& data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }
    void prefixed(ByteSpan data) {
        u32(static_cast<std::uint32_t>(data.size()));
        raw(data);
    }
    void prefixed(const std::string& s) {
        prefixed(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    }
    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    std::uint8_t u8() { return *next(1); }
    std::uint32_t u32() {
        const std::uint8_t* p = next(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const std::uint8_t* p = next(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    Bytes raw(std::size_t n) {
        const std::uint8_t* p = next(n);
        return Bytes(p, p + n);
    }
    template <std::size_t N>
    std::array<std::uint8_t, N> fixed() {
        const std::uint8_t* p = next(N);
        std::array<std::uint8_t, N> out;
        std::memcpy(out.data(), p, N);
        return out;
    }
    Bytes prefixed() { return raw(u32()); }
    std::string prefixed_string() {
        Bytes b = prefixed();
        return std::string(b.begin(), b.end());
    }
    bool empty() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    const std::uint8_t* next(std::size_t n) {
        if (pos_ + n > data_.size()) throw std::out_of_range("byte reader underrun");
        const std::uint8_t* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }
    ByteSpan data_;
    std::size_t pos_ = 0;
};

}  // namespace pksim
