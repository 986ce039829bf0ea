#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wikinli::utf8 {

inline constexpr uint32_t kReplacement = 0xFFFD;

// Decodes the code point starting at byte offset i and advances i past it.
// Malformed sequences consume exactly one byte and decode as U+FFFD, so a
// scan always terminates and byte offsets stay monotone.
inline uint32_t decode_next(std::string_view s, size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto cont = [&](size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        uint32_t cp = (uint32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp >= 0x80 ? cp : kReplacement;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        uint32_t cp = (uint32_t(b0 & 0x0F) << 12) |
                      (uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        i += 3;
        return cp >= 0x800 ? cp : kReplacement;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        uint32_t cp = (uint32_t(b0 & 0x07) << 18) |
                      (uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                      (uint32_t(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        i += 4;
        return (cp >= 0x10000 && cp <= 0x10FFFF) ? cp : kReplacement;
    }
    ++i;
    return kReplacement;
}

inline void append(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline size_t length(std::string_view s) {
    size_t i = 0, n = 0;
    while (i < s.size()) {
        decode_next(s, i);
        ++n;
    }
    return n;
}

}  // namespace wikinli::utf8
