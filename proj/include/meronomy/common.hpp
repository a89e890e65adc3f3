#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meronomy {

/// Placeholder substituted for masked entity spans.
inline constexpr std::string_view kMaskToken = "[MASK]";

/// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid invocation or configuration. The CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a. Stable across platforms, used for config fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

/// Lowercases ASCII letters; other bytes pass through unchanged.
std::string ascii_lower(std::string_view s);

/// Normalizes a human-written term ("Operating System") to token form ("operating_system").
std::string normalize_term(std::string_view term);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace meronomy
