#include "trident/wire/client.hpp"

#include <algorithm>

#include "trident/digest.hpp"
#include "trident/error.hpp"

namespace trident::wire {

void Transcript::append(FrameDirection direction, std::vector<std::uint8_t> frame) {
    entries_.push_back({direction, std::move(frame), std::chrono::system_clock::now()});
}

std::string Transcript::to_hex_dump() const {
    std::string out;
    for (const TranscriptEntry& e : entries_) {
        out += e.direction == FrameDirection::ClientToServer ? "C2S " : "S2C ";
        out += std::to_string(e.frame.size());
        out += ' ';
        out += to_hex(e.frame);
        out += '\n';
    }
    return out;
}

bool Transcript::contains(std::string_view needle) const {
    if (needle.empty()) {
        return true;
    }
    return std::any_of(entries_.begin(), entries_.end(), [&](const TranscriptEntry& e) {
        return std::search(e.frame.begin(), e.frame.end(), needle.begin(), needle.end()) != e.frame.end();
    });
}

std::string login_field_text(std::string_view typed) {
    try {
        return normalize_login_name(typed).normalized;
    } catch (const Error&) {
        return {};
    }
}

SimClient::SimClient(SimDevice device, ByteStream& stream, EntropySource& rng)
    : device_(std::move(device)), stream_(stream), session_(to_hex(rng.bytes(8))) {}

void SimClient::send(const Message& message) {
    auto frame = encode_frame(message);
    stream_.write_all(frame);
    transcript_.append(FrameDirection::ClientToServer, std::move(frame));
}

std::optional<Message> SimClient::receive() {
    std::vector<std::uint8_t> raw;
    try {
        Message m = receive_message(stream_, raw);
        transcript_.append(FrameDirection::ServerToClient, std::move(raw));
        return m;
    } catch (const Error& e) {
        if (e.code() == Errc::ShortRead) {
            return std::nullopt;
        }
        throw;
    }
}

bool SimClient::enroll(std::string_view login_name, std::optional<std::string_view> phone, std::string_view password) {
    RegisterMsg m{session_, std::string(login_name), std::nullopt, std::string(password), device_.imei().digits(),
                  device_.imsi().digits()};
    if (phone) {
        m.phone = std::string(*phone);
    }
    send(m);
    const auto reply = receive();
    const auto* result = reply ? std::get_if<ResultMsg>(&*reply) : nullptr;
    return result && result->outcome == "proceed";
}

LoginOutcome SimClient::login(std::string_view login_name, std::string_view password) {
    LoginOutcome outcome;
    auto await_result = [&]() -> bool {
        const auto reply = receive();
        const auto* result = reply ? std::get_if<ResultMsg>(&*reply) : nullptr;
        if (!result) {
            return false;
        }
        outcome.results.push_back(result->outcome);
        return result->outcome == "proceed";
    };

    send(NameMsg{session_, login_field_text(login_name), device_.imei().digits(), device_.imsi().digits()});
    if (!await_result()) {
        return outcome;
    }
    send(PasswordMsg{session_, std::string(password), device_.imei().digits(), device_.imsi().digits()});
    if (!await_result()) {
        return outcome;
    }
    if (const auto reply = receive()) {
        if (const auto* token = std::get_if<TokenMsg>(&*reply)) {
            outcome.token_hex = token->token_hex;
        } else if (const auto* result = std::get_if<ResultMsg>(&*reply)) {
            outcome.results.push_back(result->outcome);
        }
    }
    return outcome;
}

}  // namespace trident::wire
