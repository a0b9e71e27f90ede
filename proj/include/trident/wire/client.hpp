#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trident/entropy.hpp"
#include "trident/identity.hpp"
#include "trident/wire/stream.hpp"

namespace trident::wire {

class SimDevice {
public:
    SimDevice(Imei imei, Imsi imsi, std::string label)
        : imei_(std::move(imei)), imsi_(std::move(imsi)), label_(std::move(label)) {}

    const Imei& imei() const noexcept { return imei_; }
    const Imsi& imsi() const noexcept { return imsi_; }
    const std::string& label() const noexcept { return label_; }

private:
    Imei imei_;
    Imsi imsi_;
    std::string label_;
};

enum class FrameDirection { ClientToServer, ServerToClient };

struct TranscriptEntry {
    FrameDirection direction;
    std::vector<std::uint8_t> frame;
    std::chrono::system_clock::time_point at;
};

/// Append-only record of every frame a client sent or received.
class Transcript {
public:
    void append(FrameDirection direction, std::vector<std::uint8_t> frame);

    std::span<const TranscriptEntry> entries() const noexcept { return entries_; }

    /// One line per frame: "C2S|S2C <len> <hex>".
    std::string to_hex_dump() const;

    bool contains(std::string_view needle) const;

private:
    std::vector<TranscriptEntry> entries_;
};

struct LoginOutcome {
    std::vector<std::string> results;  // RESULT outcomes in arrival order
    std::optional<std::string> token_hex;

    bool authenticated() const noexcept { return token_hex.has_value(); }
};

/// Simulated handset. The login-name field normalizes what the user typed
/// (lowercase, strip, drop the e-mail domain); the password field sends the
/// text verbatim, so the server-side filter decides.
class SimClient {
public:
    SimClient(SimDevice device, ByteStream& stream, EntropySource& rng);

    /// REGISTER; true iff the server answered "proceed".
    bool enroll(std::string_view login_name, std::optional<std::string_view> phone, std::string_view password);

    LoginOutcome login(std::string_view login_name, std::string_view password);

    /// Sends an arbitrary message and records it (used by attack scripts).
    void send(const Message& message);
    std::optional<Message> receive();

    const SimDevice& device() const noexcept { return device_; }
    const Transcript& transcript() const noexcept { return transcript_; }
    const std::string& session() const noexcept { return session_; }

private:
    SimDevice device_;
    ByteStream& stream_;
    std::string session_;
    Transcript transcript_;
};

/// Name-field normalization as applied by the handset before sending.
std::string login_field_text(std::string_view typed);

}  // namespace trident::wire
