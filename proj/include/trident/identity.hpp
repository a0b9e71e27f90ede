#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "trident/digest.hpp"

namespace trident {

inline constexpr std::size_t kImeiDigits = 15;
inline constexpr std::size_t kImsiDigits = 15;
inline constexpr std::size_t kMaxLoginNameLength = 32;
inline constexpr std::size_t kMinLoginPasswordLength = 5;
inline constexpr std::size_t kMaxLoginPasswordLength = 15;
inline constexpr std::size_t kMinAuthenticationPasswordLength = 20;
inline constexpr std::uint8_t kIdentitySeparator = 0x1F;

class Imei {
public:
    /// Throws BadLength / BadChar / BadChecksum (the latter only when strict_luhn).
    static Imei parse(std::string_view text, bool strict_luhn = true);

    const std::string& digits() const noexcept { return digits_; }

    friend bool operator==(const Imei&, const Imei&) = default;

private:
    explicit Imei(std::string digits) : digits_(std::move(digits)) {}
    std::string digits_;
};

class Imsi {
public:
    static Imsi parse(std::string_view text);

    const std::string& digits() const noexcept { return digits_; }

    friend bool operator==(const Imsi&, const Imsi&) = default;

private:
    explicit Imsi(std::string digits) : digits_(std::move(digits)) {}
    std::string digits_;
};

inline Imei validate_imei(std::string_view text, bool strict_luhn = true) { return Imei::parse(text, strict_luhn); }
inline Imsi validate_imsi(std::string_view text) { return Imsi::parse(text); }

/// Luhn check over every digit of `digits` (the last digit is the check digit).
bool luhn_valid(std::string_view digits) noexcept;

enum class LoginNameKind { Username, PhoneNumber };

struct LoginName {
    std::string normalized;
    LoginNameKind kind = LoginNameKind::Username;

    friend bool operator==(const LoginName&, const LoginName&) = default;
};

/// Keeps the part before '@', lowercases, strips everything outside a-z0-9.
/// Throws EmptyAfterNormalization, or TooLong past 32 characters.
LoginName normalize_login_name(std::string_view raw);

struct LoginPassword {
    std::string value;
};

/// Throws TooShort / TooLong / InvalidCharacter.
LoginPassword check_login_password_policy(std::string_view value);

struct PolicyVerdict {
    bool pass = false;
    std::string reason;  // empty on pass
};

/// >= 20 characters containing an uppercase letter, a lowercase letter, a digit
/// and a symbol.
PolicyVerdict check_authentication_password_policy(std::string_view value);

using Salt = std::array<std::uint8_t, 16>;

struct CombinedIdentity {
    std::string canonical;  // credential 0x1F imei 0x1F imsi
    Salt salt{};
    Sha256 digest{};
};

CombinedIdentity combine_identity(std::string_view credential, const Imei& imei, const Imsi& imsi,
                                  const Salt& salt);

}  // namespace trident
