#pragma once

// Length-prefixed JSON framing: 4-byte big-endian payload length N followed by
// N bytes of UTF-8 JSON, N <= 65536.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trident::wire {

inline constexpr std::size_t kFrameHeaderSize = 4;
inline constexpr std::size_t kMaxFramePayload = 65536;

struct RegisterMsg {
    std::string session;
    std::string account;
    std::optional<std::string> phone;
    std::string password;
    std::string imei;
    std::string imsi;

    friend bool operator==(const RegisterMsg&, const RegisterMsg&) = default;
};

/// Login-name field submission.
struct NameMsg {
    std::string session;
    std::string credential;
    std::string imei;
    std::string imsi;

    friend bool operator==(const NameMsg&, const NameMsg&) = default;
};

/// Login-password field submission.
struct PasswordMsg {
    std::string session;
    std::string credential;
    std::string imei;
    std::string imsi;

    friend bool operator==(const PasswordMsg&, const PasswordMsg&) = default;
};

struct ResultMsg {
    std::string outcome;  // "proceed" | "access denied"

    friend bool operator==(const ResultMsg&, const ResultMsg&) = default;
};

struct TokenMsg {
    std::string token_hex;

    friend bool operator==(const TokenMsg&, const TokenMsg&) = default;
};

using Message = std::variant<RegisterMsg, NameMsg, PasswordMsg, ResultMsg, TokenMsg>;

std::string_view message_type(const Message& message) noexcept;

std::string to_json(const Message& message);

/// Throws MalformedJson or UnknownType.
Message from_json(std::string_view payload);

/// Frames an arbitrary payload. Throws Oversize past 65536 bytes.
std::vector<std::uint8_t> frame_payload(std::string_view payload);

std::vector<std::uint8_t> encode_frame(const Message& message);

struct DecodedFrame {
    Message message;
    std::size_t consumed = 0;
};

/// Decodes the first frame in `bytes`. Throws ShortRead if incomplete,
/// Oversize if the declared length exceeds the limit.
DecodedFrame decode_frame(std::span<const std::uint8_t> bytes);

/// Reads the declared payload length from a 4-byte header.
std::uint32_t read_length_prefix(std::span<const std::uint8_t, kFrameHeaderSize> header) noexcept;

/// Login fields accept only a-z and 0-9 (and must be non-empty).
bool field_filter_accepts(std::string_view text) noexcept;

}  // namespace trident::wire
