#include "trident/identity.hpp"

#include <algorithm>
#include <cctype>

#include "trident/error.hpp"
#include "trident/matrix_hash.hpp"

namespace trident {

namespace {

bool all_digits(std::string_view s) noexcept {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void check_digit_string(std::string_view text, std::size_t expected, std::string_view what) {
    if (text.size() != expected) {
        throw Error(Errc::BadLength, std::string(what) + " must have " + std::to_string(expected) + " digits");
    }
    if (!all_digits(text)) {
        throw Error(Errc::BadChar, std::string(what) + " must be decimal digits");
    }
}

}  // namespace

bool luhn_valid(std::string_view digits) noexcept {
    if (digits.empty() || !all_digits(digits)) {
        return false;
    }
    int sum = 0;
    bool double_it = false;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        int d = *it - '0';
        if (double_it) {
            d *= 2;
            if (d > 9) {
                d -= 9;
            }
        }
        sum += d;
        double_it = !double_it;
    }
    return sum % 10 == 0;
}

Imei Imei::parse(std::string_view text, bool strict_luhn) {
    check_digit_string(text, kImeiDigits, "IMEI");
    if (strict_luhn && !luhn_valid(text)) {
        throw Error(Errc::BadChecksum, "IMEI Luhn check digit mismatch");
    }
    return Imei(std::string(text));
}

Imsi Imsi::parse(std::string_view text) {
    check_digit_string(text, kImsiDigits, "IMSI");
    return Imsi(std::string(text));
}

LoginName normalize_login_name(std::string_view raw) {
    const std::string_view local = raw.substr(0, raw.find('@'));
    LoginName name;
    bool saw_letter = false;
    for (char c : local) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalpha(u) && u < 0x80) {
            saw_letter = true;
            name.normalized.push_back(static_cast<char>(std::tolower(u)));
        } else if (c >= '0' && c <= '9') {
            name.normalized.push_back(c);
        }
    }
    if (name.normalized.empty()) {
        throw Error(Errc::EmptyAfterNormalization, "login name has no alphanumeric characters");
    }
    if (name.normalized.size() > kMaxLoginNameLength) {
        throw Error(Errc::TooLong, "login name exceeds 32 characters");
    }
    name.kind = (!saw_letter && all_digits(name.normalized)) ? LoginNameKind::PhoneNumber : LoginNameKind::Username;
    return name;
}

LoginPassword check_login_password_policy(std::string_view value) {
    if (value.size() < kMinLoginPasswordLength) {
        throw Error(Errc::TooShort, "login password shorter than 5 characters");
    }
    if (value.size() > kMaxLoginPasswordLength) {
        throw Error(Errc::TooLong, "login password longer than 15 characters");
    }
    if (!std::all_of(value.begin(), value.end(), is_login_char)) {
        throw Error(Errc::InvalidCharacter, "login password accepts only a-z and 0-9");
    }
    return LoginPassword{std::string(value)};
}

PolicyVerdict check_authentication_password_policy(std::string_view value) {
    if (value.size() < kMinAuthenticationPasswordLength) {
        return {false, "shorter than 20 characters"};
    }
    bool upper = false;
    bool lower = false;
    bool digit = false;
    bool symbol = false;
    for (char c : value) {
        if (c >= 'A' && c <= 'Z') {
            upper = true;
        } else if (c >= 'a' && c <= 'z') {
            lower = true;
        } else if (c >= '0' && c <= '9') {
            digit = true;
        } else {
            symbol = true;
        }
    }
    if (!(upper && lower && digit && symbol)) {
        return {false, "missing a character class"};
    }
    return {true, {}};
}

CombinedIdentity combine_identity(std::string_view credential, const Imei& imei, const Imsi& imsi, const Salt& salt) {
    CombinedIdentity id;
    id.canonical.reserve(credential.size() + kImeiDigits + kImsiDigits + 2);
    id.canonical.append(credential);
    id.canonical.push_back(static_cast<char>(kIdentitySeparator));
    id.canonical.append(imei.digits());
    id.canonical.push_back(static_cast<char>(kIdentitySeparator));
    id.canonical.append(imsi.digits());
    id.salt = salt;
    id.digest = sha256(salt, as_bytes(id.canonical));
    return id;
}

}  // namespace trident
