#include "trident/gatekeeper.hpp"

#include <algorithm>

#include "trident/account_store.hpp"
#include "trident/error.hpp"

namespace trident {

namespace {

bool has_invalid_login_char(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return !is_login_char(c); });
}

/// Draws a plan whose identifier contains at least one character the login
/// fields reject. Falls back to the last draw if the matrix cannot produce one
/// (e.g. a one-row matrix whose string is all a-z0-9).
SelectionPlan draw_identifier_plan(EntropySource& rng, const Matrix& matrix, const SelectionPlan* distinct_from) {
    SelectionPlan plan;
    for (int attempt = 0; attempt < kMaxPolicyAttempts; ++attempt) {
        plan = draw_selection_plan(rng, matrix.size());
        if (distinct_from && plan.same_cell_set(*distinct_from)) {
            continue;
        }
        if (has_invalid_login_char(extract_identifier(matrix, plan))) {
            return plan;
        }
    }
    while (distinct_from && plan.same_cell_set(*distinct_from)) {
        plan = draw_selection_plan(rng, matrix.size());
    }
    return plan;
}

CredentialField enroll_field(std::string credential, const Imei& imei, const Imsi& imsi, const Salt& salt,
                             EntropySource& rng) {
    CredentialField field;
    field.credential = std::move(credential);
    field.codebook = generate_codebook(rng);
    const Matrix matrix = build_matrix(field.credential, field.codebook, rng);
    field.labels = matrix.labels();
    field.plan = draw_identifier_plan(rng, matrix, nullptr);
    field.identifier = extract_identifier(matrix, field.plan);
    field.digest = combine_identity(field.credential, imei, imsi, salt).digest;
    return field;
}

void wipe(std::string& s) noexcept {
    std::fill(s.begin(), s.end(), '\0');
    s.clear();
}

}  // namespace

Matrix field_matrix(const CredentialField& field) {
    return build_matrix(field.credential, field.codebook, field.labels);
}

AccountRecord register_account(const RegistrationRequest& request, EntropySource& rng, RegistrationReport* report) {
    const LoginName name = normalize_login_name(request.login_name_raw);
    const LoginPassword lp = check_login_password_policy(request.login_password);
    std::optional<LoginName> phone;
    if (request.phone_raw) {
        phone = normalize_login_name(*request.phone_raw);
        if (phone->kind != LoginNameKind::PhoneNumber) {
            throw Error(Errc::BadChar, "phone number must contain only digits");
        }
    }

    AccountRecord record{.account_id = name.normalized,
                         .login_name = name,
                         .imei = request.imei,
                         .imsi = request.imsi,
                         .salt = {},
                         .un = {},
                         .pn = std::nullopt,
                         .lp = {},
                         .ap = {}};
    rng.fill(record.salt);

    // LP field: the AP must meet policy, so codebook entries for the
    // password's characters are redrawn until it does.
    CredentialField& lpf = record.lp;
    lpf.credential = lp.value;
    lpf.codebook = generate_codebook(rng);
    lpf.labels = draw_labels(rng, lp.value.size() - 1);
    std::string distinct;
    for (char c : lp.value) {
        if (distinct.find(c) == std::string::npos) {
            distinct.push_back(c);
        }
    }
    int attempts = 1;
    Matrix lp_matrix = field_matrix(lpf);
    std::string ap = compose_authentication_password(lp_matrix);
    while (!check_authentication_password_policy(ap).pass) {
        if (attempts == kMaxPolicyAttempts) {
            throw Error(Errc::PolicyExhausted, "no policy-compliant AP after 64 codebook draws");
        }
        for (char c : distinct) {
            lpf.codebook.set(c, draw_codebook_entry(rng));
        }
        ++attempts;
        lp_matrix = field_matrix(lpf);
        ap = compose_authentication_password(lp_matrix);
    }
    if (report) {
        report->ap_attempts = attempts;
    }
    lpf.plan = draw_identifier_plan(rng, lp_matrix, nullptr);
    lpf.identifier = extract_identifier(lp_matrix, lpf.plan);
    lpf.digest = combine_identity(lpf.credential, record.imei, record.imsi, record.salt).digest;

    record.ap.plan = draw_identifier_plan(rng, lp_matrix, &lpf.plan);
    record.ap.identifier = extract_identifier(lp_matrix, record.ap.plan);
    record.ap.digest = combine_identity(ap, record.imei, record.imsi, record.salt).digest;
    wipe(ap);

    record.un = enroll_field(name.normalized, record.imei, record.imsi, record.salt, rng);
    if (phone) {
        record.pn = enroll_field(phone->normalized, record.imei, record.imsi, record.salt, rng);
    }
    return record;
}

std::vector<std::string> integrity_violations(const AccountRecord& record) {
    std::vector<std::string> out;
    if (record.account_id.empty()) {
        out.emplace_back("empty account id");
    }
    if (record.un.credential != record.login_name.normalized) {
        out.emplace_back("UN credential differs from login name");
    }

    auto check_field = [&](std::string_view tag, const CredentialField& field) -> std::optional<Matrix> {
        try {
            Matrix matrix = field_matrix(field);
            if (!field.codebook.complete()) {
                out.push_back(std::string(tag) + ": incomplete codebook");
            }
            if (extract_identifier(matrix, field.plan) != field.identifier) {
                out.push_back(std::string(tag) + ": identifier does not match recomputation");
            }
            if (combine_identity(field.credential, record.imei, record.imsi, record.salt).digest != field.digest) {
                out.push_back(std::string(tag) + ": combined identity digest does not match");
            }
            return matrix;
        } catch (const Error& e) {
            out.push_back(std::string(tag) + ": " + e.what());
            return std::nullopt;
        }
    };

    check_field("un", record.un);
    if (record.pn) {
        check_field("pn", *record.pn);
    }
    if (const auto lp_matrix = check_field("lp", record.lp)) {
        try {
            const std::string ap = compose_authentication_password(*lp_matrix);
            if (!check_authentication_password_policy(ap).pass) {
                out.emplace_back("ap: violates authentication password policy");
            }
            if (combine_identity(ap, record.imei, record.imsi, record.salt).digest != record.ap.digest) {
                out.emplace_back("ap: combined identity digest does not match");
            }
            if (extract_identifier(*lp_matrix, record.ap.plan) != record.ap.identifier) {
                out.emplace_back("ap: identifier does not match recomputation");
            }
            if (record.ap.plan.same_cell_set(record.lp.plan)) {
                out.emplace_back("ap: selection plan duplicates the LP plan");
            }
        } catch (const Error& e) {
            out.push_back(std::string("ap: ") + e.what());
        }
    }
    return out;
}

std::string_view stage_name(Stage stage) noexcept {
    switch (stage) {
        case Stage::Start: return "START";
        case Stage::NameVerified: return "NAME_VERIFIED";
        case Stage::PasswordVerified: return "PASSWORD_VERIFIED";
        case Stage::Authenticated: return "AUTHENTICATED";
        case Stage::Denied: return "DENIED";
    }
    return "?";
}

std::string_view deny_reason_name(DenyReason reason) noexcept {
    switch (reason) {
        case DenyReason::None: return "NONE";
        case DenyReason::WrongName: return "WRONG_NAME";
        case DenyReason::WrongPassword: return "WRONG_PASSWORD";
        case DenyReason::WrongDevice: return "WRONG_DEVICE";
        case DenyReason::WrongService: return "WRONG_SERVICE";
        case DenyReason::LengthMismatch: return "LENGTH_MISMATCH";
        case DenyReason::IdentifierMismatch: return "IDENTIFIER_MISMATCH";
        case DenyReason::PolicyViolation: return "POLICY_VIOLATION";
        case DenyReason::StageOrder: return "STAGE_ORDER";
        case DenyReason::ApMismatch: return "AP_MISMATCH";
    }
    return "?";
}

Gatekeeper::Gatekeeper(AccountStore& store, EntropySource& rng, Clock clock)
    : store_(store), rng_(rng), clock_(std::move(clock)) {}

std::chrono::system_clock::time_point Gatekeeper::now() const {
    return clock_ ? clock_() : std::chrono::system_clock::now();
}

std::string Gatekeeper::enroll(const RegistrationRequest& request, RegistrationReport* report) {
    AccountRecord record = [&] {
        std::lock_guard lock(mutex_);
        return register_account(request, rng_, report);
    }();
    store_.save_account(record);
    return record.account_id;
}

GateSession Gatekeeper::open_session(Device device) {
    std::array<std::uint8_t, 16> id{};
    {
        std::lock_guard lock(mutex_);
        rng_.fill(id);
    }
    return GateSession(to_hex(id), std::move(device));
}

GateResult Gatekeeper::deny(GateSession& session, DenyReason reason) {
    session.stage_ = Stage::Denied;
    session.deny_reason_ = reason;
    session.lp_matrix_.reset();
    wipe(session.ap_);
    return GateResult{Outcome::Deny, kAccessDenied};
}

namespace {

DenyReason device_mismatch_reason(const AccountRecord& record, const Device& device, DenyReason otherwise) {
    if (!(device.imei == record.imei)) {
        return DenyReason::WrongDevice;
    }
    if (!(device.imsi == record.imsi)) {
        return DenyReason::WrongService;
    }
    return otherwise;
}

}  // namespace

GateResult Gatekeeper::gate_login_name(GateSession& session, std::string_view entered_name_raw, const Device& device) {
    if (session.stage_ != Stage::Start) {
        return deny(session, DenyReason::StageOrder);
    }
    if (!(device == session.device_)) {
        return deny(session, DenyReason::WrongDevice);
    }

    LoginName name;
    std::optional<AccountRecord> record;
    try {
        name = normalize_login_name(entered_name_raw);
        record = store_.load_account(name.normalized);
    } catch (const Error& e) {
        return deny(session, e.code() == Errc::CorruptRecord ? DenyReason::IdentifierMismatch : DenyReason::WrongName);
    }
    const CredentialField* field = nullptr;
    if (record->login_name.normalized == name.normalized) {
        field = &record->un;
    } else if (record->pn && record->pn->credential == name.normalized) {
        field = &*record->pn;
    } else {
        return deny(session, DenyReason::WrongName);
    }

    // IDENTIFY
    const Sha256 digest = combine_identity(name.normalized, device.imei, device.imsi, record->salt).digest;
    if (!constant_time_equal(digest, field->digest)) {
        return deny(session, device_mismatch_reason(*record, device, DenyReason::WrongName));
    }

    // VERIFY
    if (name.normalized.size() != field->registered_length()) {
        return deny(session, DenyReason::LengthMismatch);
    }
    const Matrix matrix = build_matrix(name.normalized, field->codebook, field->labels);
    if (!constant_time_equal(extract_identifier(matrix, field->plan), field->identifier)) {
        return deny(session, DenyReason::IdentifierMismatch);
    }

    session.account_id_ = record->account_id;
    session.stage_ = Stage::NameVerified;
    return GateResult{Outcome::Proceed, kProceed};
}

GateResult Gatekeeper::gate_login_password(GateSession& session, std::string_view entered_lp, const Device& device) {
    if (session.stage_ != Stage::NameVerified) {
        return deny(session, DenyReason::StageOrder);
    }
    if (!(device == session.device_)) {
        return deny(session, DenyReason::WrongDevice);
    }
    try {
        check_login_password_policy(entered_lp);
    } catch (const Error&) {
        return deny(session, DenyReason::PolicyViolation);
    }

    std::optional<AccountRecord> record;
    try {
        record = store_.load_account(session.account_id_);
    } catch (const Error&) {
        return deny(session, DenyReason::IdentifierMismatch);
    }
    const CredentialField& field = record->lp;

    // IDENTIFY
    const Sha256 digest = combine_identity(entered_lp, device.imei, device.imsi, record->salt).digest;
    if (!constant_time_equal(digest, field.digest)) {
        return deny(session, device_mismatch_reason(*record, device, DenyReason::WrongPassword));
    }

    // VERIFY
    if (entered_lp.size() != field.registered_length()) {
        return deny(session, DenyReason::LengthMismatch);
    }
    Matrix matrix = build_matrix(entered_lp, field.codebook, field.labels);
    if (!constant_time_equal(extract_identifier(matrix, field.plan), field.identifier)) {
        return deny(session, DenyReason::IdentifierMismatch);
    }

    session.ap_ = compose_authentication_password(matrix);
    session.lp_matrix_ = std::move(matrix);
    session.stage_ = Stage::PasswordVerified;
    return GateResult{Outcome::Proceed, kProceed};
}

AuthResult Gatekeeper::gate_server_authentication(GateSession& session) {
    auto denied = [&](DenyReason reason) {
        deny(session, reason);
        return AuthResult{Outcome::Deny, kAccessDenied, std::nullopt};
    };
    if (session.stage_ != Stage::PasswordVerified || !session.lp_matrix_) {
        return denied(DenyReason::StageOrder);
    }
    std::optional<AccountRecord> record;
    try {
        record = store_.load_account(session.account_id_);
    } catch (const Error&) {
        return denied(DenyReason::ApMismatch);
    }

    const Sha256 digest =
        combine_identity(session.ap_, session.device_.imei, session.device_.imsi, record->salt).digest;
    bool ok = constant_time_equal(digest, record->ap.digest);
    try {
        ok = constant_time_equal(extract_identifier(*session.lp_matrix_, record->ap.plan), record->ap.identifier) && ok;
    } catch (const Error&) {
        ok = false;
    }
    if (!ok) {
        return denied(DenyReason::ApMismatch);
    }

    SessionToken token{};
    {
        std::lock_guard lock(mutex_);
        rng_.fill(token);
        const auto t = now();
        std::erase_if(tokens_, [&](const auto& kv) { return kv.second <= t; });
        tokens_[token] = t + kTokenLifetime;
    }
    session.lp_matrix_.reset();
    wipe(session.ap_);
    session.stage_ = Stage::Authenticated;
    return AuthResult{Outcome::Proceed, kProceed, token};
}

bool Gatekeeper::token_valid(const SessionToken& token) const {
    std::lock_guard lock(mutex_);
    const auto it = tokens_.find(token);
    return it != tokens_.end() && now() < it->second;
}

}  // namespace trident
