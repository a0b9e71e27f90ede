#include "trident/wire/scenario.hpp"

#include <thread>

#include "trident/error.hpp"
#include "trident/fixtures.hpp"

namespace trident::wire {

std::string_view scenario_name(Scenario scenario) noexcept {
    switch (scenario) {
        case Scenario::HappyPath: return "happy-path";
        case Scenario::SimSwap: return "sim-swap";
        case Scenario::StolenCredentials: return "stolen-credentials";
        case Scenario::ReplayAp: return "replay-ap";
        case Scenario::WrongDevice: return "wrong-device";
    }
    return "?";
}

std::string_view verdict_name(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::Authenticated: return "AUTHENTICATED";
        case Verdict::DeniedAtNameGate: return "DENIED_AT_NAME_GATE";
        case Verdict::DeniedAtPasswordGate: return "DENIED_AT_PASSWORD_GATE";
        case Verdict::DeniedAtServer: return "DENIED_AT_SERVER";
        case Verdict::DeniedByFieldFilter: return "DENIED_BY_FIELD_FILTER";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    std::string kebab(name);
    for (char& c : kebab) {
        if (c == '_') {
            c = '-';
        } else if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    for (Scenario s : kAllScenarios) {
        if (scenario_name(s) == kebab) {
            return s;
        }
    }
    throw Error(Errc::UnknownScenario, std::string(name));
}

Verdict expected_verdict(Scenario scenario) noexcept {
    switch (scenario) {
        case Scenario::HappyPath: return Verdict::Authenticated;
        case Scenario::SimSwap:
        case Scenario::StolenCredentials:
        case Scenario::WrongDevice: return Verdict::DeniedAtNameGate;
        case Scenario::ReplayAp: return Verdict::DeniedByFieldFilter;
    }
    return Verdict::Inconclusive;
}

Fixtures default_fixtures() {
    return Fixtures{
        .victim_name = std::string(fixtures::kFig2Email),
        .victim_phone = "+1 415 555 0133",
        .victim_password = std::string(fixtures::kFig1Password),
        .victim_imei = "490154203237518",
        .victim_imsi = "310150123456789",
        .attacker_imei = "356938035643809",
        .attacker_imsi = "310260987654321",
        .captured_ap = std::string(fixtures::kFig1Ap),
        .entropy = fixtures::fig1_registration_entropy(),
    };
}

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

/// Verdict from the server's own log; the wire only ever says "access denied".
Verdict classify(const std::vector<ServerEvent>& events, const LoginOutcome& outcome) {
    if (events.empty()) {
        return Verdict::Inconclusive;
    }
    const ServerEvent& last = events.back();
    Verdict v = Verdict::Inconclusive;
    if (last.kind == EventKind::Authenticated) {
        v = Verdict::Authenticated;
    } else if (last.kind == EventKind::FilterReject) {
        v = Verdict::DeniedByFieldFilter;
    } else if (last.kind == EventKind::GateDeny || last.kind == EventKind::ProtocolViolation) {
        switch (last.gate) {
            case GateId::Name: v = Verdict::DeniedAtNameGate; break;
            case GateId::Password: v = Verdict::DeniedAtPasswordGate; break;
            case GateId::Server: v = Verdict::DeniedAtServer; break;
            case GateId::Register: v = Verdict::Inconclusive; break;
        }
    }
    // Client and server must agree on whether access was granted.
    if ((v == Verdict::Authenticated) != outcome.authenticated()) {
        return Verdict::Inconclusive;
    }
    return v;
}

}  // namespace

ScenarioHarness::ScenarioHarness(Fixtures fixtures)
    : fixtures_(std::move(fixtures)),
      server_rng_(fixtures_.entropy),
      client_rng_(bytes_of("trident scenario client")),
      gatekeeper_(store_, server_rng_),
      server_(gatekeeper_) {
    auto [client_end, server_end] = make_pipe();
    std::thread server_thread([&, s = server_end.get()] { server_.serve_connection(*s); });
    SimClient victim(SimDevice(Imei::parse(fixtures_.victim_imei), Imsi::parse(fixtures_.victim_imsi), "victim"),
                     *client_end, client_rng_);
    const bool ok = victim.enroll(fixtures_.victim_name, fixtures_.victim_phone, fixtures_.victim_password);
    client_end->close();
    server_thread.join();
    registration_ = victim.transcript();
    if (!ok) {
        throw Error(Errc::IoError, "fixture registration was rejected");
    }
}

ScenarioRun ScenarioHarness::run(Scenario scenario) {
    const Imei victim_imei = Imei::parse(fixtures_.victim_imei);
    const Imsi victim_imsi = Imsi::parse(fixtures_.victim_imsi);

    std::optional<SimDevice> device;
    std::string name = fixtures_.victim_name;
    std::string password = fixtures_.victim_password;
    switch (scenario) {
        case Scenario::HappyPath:
            device.emplace(victim_imei, victim_imsi, "victim handset");
            break;
        case Scenario::SimSwap:
            // Carrier moved the victim's subscription onto a SIM in the attacker's handset.
            device.emplace(Imei::parse(fixtures_.attacker_imei), victim_imsi, "attacker handset, swapped SIM");
            name = fixtures_.victim_phone;
            break;
        case Scenario::StolenCredentials:
            device.emplace(Imei::parse(fixtures_.attacker_imei), Imsi::parse(fixtures_.attacker_imsi),
                           "attacker handset");
            break;
        case Scenario::WrongDevice: {
            std::string imei = fixtures_.victim_imei;
            imei[7] = static_cast<char>('0' + (imei[7] - '0' + 1) % 10);
            device.emplace(Imei::parse(imei, false), victim_imsi, "look-alike handset");
            break;
        }
        case Scenario::ReplayAp:
            // Attacker holds the victim's handset and types a captured AP.
            device.emplace(victim_imei, victim_imsi, "victim handset, attacker at keyboard");
            password = fixtures_.captured_ap;
            break;
    }

    auto [client_end, server_end] = make_pipe();
    std::vector<ServerEvent> events;
    std::thread server_thread([&, s = server_end.get()] { events = server_.serve_connection(*s); });
    SimClient client(*device, *client_end, client_rng_);
    LoginOutcome outcome;
    try {
        outcome = client.login(name, password);
    } catch (const Error&) {
        // Server closed early; the transcript and event log still tell the story.
    }
    client_end->close();
    server_thread.join();

    ScenarioRun run{scenario, Verdict::Inconclusive, outcome, client.transcript(), events};
    run.verdict = classify(events, outcome);
    return run;
}

std::vector<std::string> ScenarioHarness::wire_secrets() const {
    const AccountRecord record = store_.load_account(login_field_text(fixtures_.victim_name));
    std::vector<std::string> out{record.un.identifier, record.lp.identifier, record.ap.identifier,
                                 compose_authentication_password(field_matrix(record.lp))};
    std::vector<const CredentialField*> fields{&record.un, &record.lp};
    if (record.pn) {
        out.push_back(record.pn->identifier);
        fields.push_back(&*record.pn);
    }
    for (const CredentialField* f : fields) {
        for (char c : kLoginAlphabet) {
            const std::string& s = f->codebook.at(c).converted;
            if (s.size() >= 3) {
                out.push_back(s);
            }
        }
    }
    return out;
}

ScenarioRun run_scenario(Scenario scenario, const Fixtures& fixtures) {
    ScenarioHarness harness(fixtures);
    return harness.run(scenario);
}

}  // namespace trident::wire
