#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hexnet {

inline constexpr std::string_view kVersion = "0.1.0";

/// FNV-1a 64 of a canonical config string, printed as 16 hex digits.
inline std::string config_hash(std::string_view canonical) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xfU];
        h >>= 4;
    }
    return out;
}

}  // namespace hexnet
