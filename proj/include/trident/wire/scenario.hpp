#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "trident/account_store.hpp"
#include "trident/wire/client.hpp"
#include "trident/wire/server.hpp"

namespace trident::wire {

enum class Scenario { HappyPath, SimSwap, StolenCredentials, ReplayAp, WrongDevice };

inline constexpr Scenario kAllScenarios[] = {Scenario::HappyPath, Scenario::SimSwap, Scenario::StolenCredentials,
                                             Scenario::ReplayAp, Scenario::WrongDevice};

enum class Verdict {
    Authenticated,
    DeniedAtNameGate,
    DeniedAtPasswordGate,
    DeniedAtServer,
    DeniedByFieldFilter,
    Inconclusive,
};

std::string_view scenario_name(Scenario scenario) noexcept;  // "sim-swap"
std::string_view verdict_name(Verdict verdict) noexcept;     // "DENIED_AT_NAME_GATE"

/// Accepts "sim-swap" or "SIM_SWAP". Throws UnknownScenario.
Scenario parse_scenario(std::string_view name);

Verdict expected_verdict(Scenario scenario) noexcept;

struct Fixtures {
    std::string victim_name;
    std::string victim_phone;
    std::string victim_password;
    std::string victim_imei;
    std::string victim_imsi;
    std::string attacker_imei;
    std::string attacker_imsi;
    /// Captured AP the replay attacker types into the password field.
    std::string captured_ap;
    /// Registration entropy; the default reproduces the worked "dp7a3k" LP matrix.
    std::vector<std::uint8_t> entropy;
};

Fixtures default_fixtures();

struct ScenarioRun {
    Scenario scenario;
    Verdict verdict = Verdict::Inconclusive;
    LoginOutcome outcome;
    Transcript transcript;
    std::vector<ServerEvent> events;
};

/// In-process server + store with the victim registered over the wire.
class ScenarioHarness {
public:
    explicit ScenarioHarness(Fixtures fixtures);

    ScenarioRun run(Scenario scenario);

    /// Registration traffic.
    const Transcript& registration_transcript() const noexcept { return registration_; }

    /// Server-side secrets that must never appear on the wire: stored
    /// identifiers, the regenerated AP, and codebook strings of length >= 3.
    std::vector<std::string> wire_secrets() const;

    AccountStore& store() noexcept { return store_; }

private:
    Fixtures fixtures_;
    AccountStore store_;
    ReplayEntropy server_rng_;
    ReplayEntropy client_rng_;
    Gatekeeper gatekeeper_;
    Server server_;
    Transcript registration_;
};

ScenarioRun run_scenario(Scenario scenario, const Fixtures& fixtures);

}  // namespace trident::wire
