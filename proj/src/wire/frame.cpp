#include "trident/wire/frame.hpp"

#include <nlohmann/json.hpp>

#include "trident/error.hpp"
#include "trident/matrix_hash.hpp"

namespace trident::wire {

using json = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string str(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw Error(Errc::MalformedJson, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

}  // namespace

std::string_view message_type(const Message& message) noexcept {
    static constexpr std::string_view kNames[] = {"REGISTER", "NAME", "PASSWORD", "RESULT", "TOKEN"};
    return kNames[message.index()];
}

std::string to_json(const Message& message) {
    json j;
    j["t"] = message_type(message);
    std::visit(Overloaded{
                   [&](const RegisterMsg& m) {
                       j["session"] = m.session;
                       j["account"] = m.account;
                       if (m.phone) {
                           j["phone"] = *m.phone;
                       }
                       j["password"] = m.password;
                       j["imei"] = m.imei;
                       j["imsi"] = m.imsi;
                   },
                   [&](const NameMsg& m) {
                       j["session"] = m.session;
                       j["credential"] = m.credential;
                       j["imei"] = m.imei;
                       j["imsi"] = m.imsi;
                   },
                   [&](const PasswordMsg& m) {
                       j["session"] = m.session;
                       j["credential"] = m.credential;
                       j["imei"] = m.imei;
                       j["imsi"] = m.imsi;
                   },
                   [&](const ResultMsg& m) { j["outcome"] = m.outcome; },
                   [&](const TokenMsg& m) { j["token_hex"] = m.token_hex; },
               },
               message);
    return j.dump();
}

Message from_json(std::string_view payload) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedJson, e.what());
    }
    if (!j.is_object()) {
        throw Error(Errc::MalformedJson, "payload is not a JSON object");
    }
    const std::string type = str(j, "t");
    if (type == "REGISTER") {
        RegisterMsg m{str(j, "session"), str(j, "account"), std::nullopt, str(j, "password"), str(j, "imei"),
                      str(j, "imsi")};
        if (j.contains("phone")) {
            m.phone = str(j, "phone");
        }
        return m;
    }
    if (type == "NAME") {
        return NameMsg{str(j, "session"), str(j, "credential"), str(j, "imei"), str(j, "imsi")};
    }
    if (type == "PASSWORD") {
        return PasswordMsg{str(j, "session"), str(j, "credential"), str(j, "imei"), str(j, "imsi")};
    }
    if (type == "RESULT") {
        ResultMsg m{str(j, "outcome")};
        if (m.outcome != "proceed" && m.outcome != "access denied") {
            throw Error(Errc::MalformedJson, "RESULT outcome must be 'proceed' or 'access denied'");
        }
        return m;
    }
    if (type == "TOKEN") {
        return TokenMsg{str(j, "token_hex")};
    }
    throw Error(Errc::UnknownType, type);
}

std::vector<std::uint8_t> frame_payload(std::string_view payload) {
    if (payload.size() > kMaxFramePayload) {
        throw Error(Errc::Oversize, std::to_string(payload.size()) + " byte payload");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::vector<std::uint8_t> out;
    out.reserve(kFrameHeaderSize + payload.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::vector<std::uint8_t> encode_frame(const Message& message) { return frame_payload(to_json(message)); }

std::uint32_t read_length_prefix(std::span<const std::uint8_t, kFrameHeaderSize> h) noexcept {
    return (std::uint32_t{h[0]} << 24) | (std::uint32_t{h[1]} << 16) | (std::uint32_t{h[2]} << 8) | h[3];
}

DecodedFrame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameHeaderSize) {
        throw Error(Errc::ShortRead, "incomplete frame header");
    }
    const std::uint32_t n = read_length_prefix(bytes.first<kFrameHeaderSize>());
    if (n > kMaxFramePayload) {
        throw Error(Errc::Oversize, std::to_string(n) + " byte payload");
    }
    if (bytes.size() - kFrameHeaderSize < n) {
        throw Error(Errc::ShortRead, "incomplete frame payload");
    }
    const auto payload = bytes.subspan(kFrameHeaderSize, n);
    return {from_json({reinterpret_cast<const char*>(payload.data()), payload.size()}), kFrameHeaderSize + n};
}

bool field_filter_accepts(std::string_view text) noexcept {
    if (text.empty()) {
        return false;
    }
    for (char c : text) {
        if (!is_login_char(c)) {
            return false;
        }
    }
    return true;
}

}  // namespace trident::wire
