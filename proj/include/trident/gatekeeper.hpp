#pragma once

// Three-point verification: login-name gate, login-password gate and the
// server authentication point. Each gate first IDENTIFIES the combined
// identity (salted digest of credential+IMEI+IMSI) and then VERIFIES it with
// an identifier extracted from the credential's matrix.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trident/entropy.hpp"
#include "trident/identity.hpp"
#include "trident/matrix_hash.hpp"

namespace trident {

class AccountStore;

inline constexpr int kMaxPolicyAttempts = 64;
inline constexpr std::string_view kAccessDenied = "access denied";
inline constexpr std::string_view kProceed = "proceed";
inline constexpr std::chrono::minutes kTokenLifetime{10};

/// Everything derived at registration for one credential field (UN, PN or LP).
struct CredentialField {
    std::string credential;
    Codebook codebook;
    std::vector<ShuffleLabel> labels;
    SelectionPlan plan;
    std::string identifier;
    Sha256 digest{};

    std::size_t registered_length() const noexcept { return credential.size(); }

    friend bool operator==(const CredentialField&, const CredentialField&) = default;
};

struct ApData {
    SelectionPlan plan;
    std::string identifier;
    Sha256 digest{};

    friend bool operator==(const ApData&, const ApData&) = default;
};

struct AccountRecord {
    std::string account_id;
    LoginName login_name;
    Imei imei;
    Imsi imsi;
    Salt salt{};
    CredentialField un;
    std::optional<CredentialField> pn;
    CredentialField lp;
    ApData ap;

    friend bool operator==(const AccountRecord&, const AccountRecord&) = default;
};

struct RegistrationRequest {
    std::string login_name_raw;
    std::optional<std::string> phone_raw;
    std::string login_password;
    Imei imei;
    Imsi imsi;
};

struct RegistrationReport {
    int ap_attempts = 0;  // codebook draws needed for the AP to meet policy
};

/// Draw order (relevant for recorded entropy): salt (16 bytes); LP codebook,
/// LP labels, LP codebook redraws until the AP meets policy; LP plan; AP plan;
/// UN codebook, labels, plan; then the same for PN when present.
AccountRecord register_account(const RegistrationRequest& request, EntropySource& rng,
                               RegistrationReport* report = nullptr);

/// Recomputes identifiers and digests from the stored inputs. Empty when intact.
std::vector<std::string> integrity_violations(const AccountRecord& record);

/// The matrix of a stored field, rebuilt from its registered credential.
Matrix field_matrix(const CredentialField& field);

enum class Stage { Start, NameVerified, PasswordVerified, Authenticated, Denied };

enum class DenyReason {
    None,
    WrongName,
    WrongPassword,
    WrongDevice,
    WrongService,
    LengthMismatch,
    IdentifierMismatch,
    PolicyViolation,
    StageOrder,
    ApMismatch,
};

std::string_view stage_name(Stage stage) noexcept;
std::string_view deny_reason_name(DenyReason reason) noexcept;

struct Device {
    Imei imei;
    Imsi imsi;

    friend bool operator==(const Device&, const Device&) = default;
};

enum class Outcome { Proceed, Deny };

struct GateResult {
    Outcome outcome = Outcome::Deny;
    std::string_view external_message = kAccessDenied;
};

using SessionToken = std::array<std::uint8_t, 32>;

struct AuthResult {
    Outcome outcome = Outcome::Deny;
    std::string_view external_message = kAccessDenied;
    std::optional<SessionToken> token;
};

class GateSession {
public:
    const std::string& id() const noexcept { return id_; }
    const std::string& account_id() const noexcept { return account_id_; }
    Stage stage() const noexcept { return stage_; }
    const Device& device() const noexcept { return device_; }

    /// Internal only; never sent to clients.
    DenyReason deny_reason() const noexcept { return deny_reason_; }

private:
    friend class Gatekeeper;

    GateSession(std::string id, Device device) : id_(std::move(id)), device_(std::move(device)) {}

    std::string id_;
    std::string account_id_;
    Stage stage_ = Stage::Start;
    const Device device_;
    DenyReason deny_reason_ = DenyReason::None;
    // Transient between gate 2 and gate 3; cleared afterwards.
    std::optional<Matrix> lp_matrix_;
    std::string ap_;
};

class Gatekeeper {
public:
    using Clock = std::function<std::chrono::system_clock::time_point()>;

    Gatekeeper(AccountStore& store, EntropySource& rng, Clock clock = {});

    /// register_account + persist. Throws DuplicateAccount when the login name
    /// or phone number is already enrolled. Returns the account id.
    std::string enroll(const RegistrationRequest& request, RegistrationReport* report = nullptr);

    GateSession open_session(Device device);

    GateResult gate_login_name(GateSession& session, std::string_view entered_name_raw, const Device& device);
    GateResult gate_login_password(GateSession& session, std::string_view entered_lp, const Device& device);
    AuthResult gate_server_authentication(GateSession& session);

    bool token_valid(const SessionToken& token) const;

private:
    GateResult deny(GateSession& session, DenyReason reason);
    std::chrono::system_clock::time_point now() const;

    AccountStore& store_;
    EntropySource& rng_;
    Clock clock_;
    mutable std::mutex mutex_;  // guards rng_ and tokens_
    std::map<SessionToken, std::chrono::system_clock::time_point> tokens_;
};

}  // namespace trident
