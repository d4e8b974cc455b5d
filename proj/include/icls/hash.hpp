#pragma once

#include <cstdint>
#include <string_view>

namespace icls {

/// 64-bit FNV-1a. Stable across platforms and process restarts, which the
/// hashing embedder and the mock provider both depend on.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace icls
