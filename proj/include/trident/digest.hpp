#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trident {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> data);
Sha256 sha256(std::span<const std::uint8_t> prefix, std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Throws Error(Errc::BadChar) on non-hex input or odd length.
std::vector<std::uint8_t> from_hex(std::string_view hex);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace trident
