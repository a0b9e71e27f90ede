#include "trident/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "trident/account_store.hpp"
#include "trident/error.hpp"
#include "trident/fixtures.hpp"
#include "trident/wire/client.hpp"
#include "trident/wire/scenario.hpp"
#include "trident/wire/server.hpp"

namespace trident::cli {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct Globals {
    std::optional<std::string> store;
    std::uint16_t port = wire::kDefaultPort;
    std::optional<std::string> seed;
    bool production = false;
};

struct DeviceArgs {
    std::string imei;
    std::string imsi;
    bool lax_luhn = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Server-side and client-side entropy. With --seed both are deterministic
/// replays keyed by the seed (domain-separated so they never share a stream).
struct EntropyPair {
    std::unique_ptr<EntropySource> server;
    std::unique_ptr<EntropySource> client;
};

EntropyPair make_entropy(const Globals& g) {
    if (!g.seed) {
        return {std::make_unique<SystemEntropy>(), std::make_unique<SystemEntropy>()};
    }
    if (g.production) {
        throw UsageError("--seed is refused in --production mode");
    }
    std::vector<std::uint8_t> seed;
    try {
        seed = from_hex(*g.seed);
    } catch (const Error&) {
        throw UsageError("--seed must be an even-length hex string");
    }
    std::vector<std::uint8_t> client_seed = seed;
    const std::string tag = "client";
    client_seed.insert(client_seed.begin(), tag.begin(), tag.end());
    const Sha256 client_key = sha256(client_seed);
    return {std::make_unique<ReplayEntropy>(std::move(seed)),
            std::make_unique<ReplayEntropy>(std::vector<std::uint8_t>(client_key.begin(), client_key.end()))};
}

Device parse_device(const DeviceArgs& d) { return Device{Imei::parse(d.imei, !d.lax_luhn), Imsi::parse(d.imsi)}; }

int cmd_demo_fig1(std::ostream& out) {
    const Matrix matrix = fixtures::fig1_matrix();
    out << render_matrix(matrix);
    std::string text = matrix.row(1).converted;
    out << "step 1: " << text << '\n';
    for (std::size_t i = 2; i <= matrix.size(); ++i) {
        const MatrixRow& row = matrix.row(i);
        text = apply_shuffle_step(text, row.converted, *row.label);
        out << "step " << i << " (" << row.label->render() << "): " << text << '\n';
    }
    const std::string ap = compose_authentication_password(matrix);
    out << "AP=" << ap << '\n';
    return ap == fixtures::kFig1Ap ? kExitOk : kExitMismatch;
}

int cmd_demo_fig2(std::ostream& out) {
    const LoginName name = normalize_login_name(fixtures::kFig2Email);
    out << "login name: " << fixtures::kFig2Email << " -> " << name.normalized << '\n';
    const Matrix matrix = fixtures::fig2_matrix();
    out << render_matrix(matrix);
    const SelectionPlan plan = fixtures::fig2_plan();
    out << "plan:";
    for (const Cell& c : plan.cells) {
        out << " (" << c.row << ',' << column_name(c.column) << ')';
    }
    out << '\n';
    const std::string id = extract_identifier(matrix, plan);
    out << "identifier=" << id << '\n';
    return id == fixtures::kFig2Identifier ? kExitOk : kExitMismatch;
}

int cmd_attack(const std::string& name, const std::optional<std::string>& transcript_dir, std::ostream& out,
               std::ostream& err) {
    wire::Scenario scenario;
    try {
        scenario = wire::parse_scenario(name);
    } catch (const Error&) {
        throw UsageError("unknown scenario '" + name + "'");
    }
    const wire::ScenarioRun run = wire::run_scenario(scenario, wire::default_fixtures());
    if (transcript_dir) {
        std::filesystem::create_directories(*transcript_dir);
        std::ofstream(std::filesystem::path(*transcript_dir) / (std::string(wire::scenario_name(scenario)) + ".hex"))
            << run.transcript.to_hex_dump();
    }
    for (const std::string& r : run.outcome.results) {
        out << "server: " << r << '\n';
    }
    out << wire::verdict_name(run.verdict) << '\n';
    const wire::Verdict expected = wire::expected_verdict(scenario);
    if (run.verdict != expected) {
        err << "expected " << wire::verdict_name(expected) << '\n';
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_audit(const Globals& g, std::ostream& out) {
    const AccountStore store(resolve_store_path(g.store));
    bool clean = true;
    for (const AuditFinding& f : store.audit()) {
        if (f.violations.empty()) {
            out << "ok " << f.account_id << '\n';
            continue;
        }
        clean = false;
        for (const std::string& v : f.violations) {
            out << "CORRUPT " << f.account_id << ": " << v << '\n';
        }
    }
    out << store.size() << " record(s), " << (clean ? "integrity ok" : "integrity FAILED") << '\n';
    return clean ? kExitOk : kExitMismatch;
}

int cmd_inspect(const Globals& g, const std::string& account, const std::string& field, std::ostream& out) {
    const AccountStore store(resolve_store_path(g.store));
    const AccountRecord record = store.load_account(wire::login_field_text(account));
    const CredentialField* f = nullptr;
    if (field == "un") {
        f = &record.un;
    } else if (field == "lp") {
        f = &record.lp;
    } else if (field == "pn") {
        if (!record.pn) {
            throw Error(Errc::NotFound, "account has no phone number");
        }
        f = &*record.pn;
    } else {
        throw UsageError("field must be one of un, pn, lp");
    }
    out << render_matrix(field_matrix(*f));
    return kExitOk;
}

int cmd_register(const Globals& g, const std::string& name, const std::optional<std::string>& phone,
                 const std::string& password, const DeviceArgs& d, std::ostream& out) {
    EntropyPair rng = make_entropy(g);
    const Device device = parse_device(d);
    AccountStore store(resolve_store_path(g.store));
    Gatekeeper gatekeeper(store, *rng.server);
    RegistrationReport report;
    const std::string id = gatekeeper.enroll(RegistrationRequest{name, phone, password, device.imei, device.imsi}, &report);
    out << "registered " << id << " (ap draws: " << report.ap_attempts << ")\n";
    return kExitOk;
}

int cmd_login(const Globals& g, const std::string& name, const std::string& password, const DeviceArgs& d,
              bool connect, std::ostream& out) {
    EntropyPair rng = make_entropy(g);
    const Device device = parse_device(d);
    const wire::SimDevice handset(device.imei, device.imsi, "cli");

    wire::LoginOutcome outcome;
    if (connect) {
        auto stream = wire::connect_tcp("127.0.0.1", g.port);
        wire::SimClient client(handset, *stream, *rng.client);
        outcome = client.login(name, password);
    } else {
        AccountStore store(resolve_store_path(g.store));
        Gatekeeper gatekeeper(store, *rng.server);
        wire::Server server(gatekeeper, wire::ServerConfig{!d.lax_luhn});
        auto [client_end, server_end] = wire::make_pipe();
        std::thread server_thread([&, s = server_end.get()] { server.serve_connection(*s); });
        wire::SimClient client(handset, *client_end, *rng.client);
        try {
            outcome = client.login(name, password);
        } catch (const Error&) {
        }
        client_end->close();
        server_thread.join();
    }

    static constexpr const char* kGates[] = {"name gate", "password gate", "server"};
    for (std::size_t i = 0; i < outcome.results.size() && i < 3; ++i) {
        out << kGates[i] << ": " << outcome.results[i] << '\n';
    }
    if (outcome.token_hex) {
        out << "token: " << *outcome.token_hex << '\n';
        return kExitOk;
    }
    return kExitMismatch;
}

int cmd_serve(const Globals& g, bool lax_luhn, std::ostream& out) {
    EntropyPair rng = make_entropy(g);
    AccountStore store(resolve_store_path(g.store));
    wire::TcpListener listener(g.port);
    out << "listening on 127.0.0.1:" << listener.port() << std::endl;
    g_stop.store(false);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    wire::run_server(listener, store, *rng.server, g_stop, wire::ServerConfig{!lax_luhn});
    return kExitOk;
}

void add_device_options(CLI::App* cmd, DeviceArgs& d) {
    cmd->add_option("--imei", d.imei, "15-digit IMEI of the handset")->required();
    cmd->add_option("--imsi", d.imsi, "15-digit IMSI of the SIM")->required();
    cmd->add_flag("--lax-luhn", d.lax_luhn, "accept IMEIs with a bad Luhn check digit");
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Triple-identity authentication reference tool", "trident"};
    app.require_subcommand(1);

    Globals g;
    std::string store_flag;
    std::string seed_flag;
    app.add_option("--store", store_flag, "account store path (default: $TRIDENT_STORE_PATH or ./trident_store.ndjson)");
    app.add_option("--port", g.port, "TCP port for serve / login --connect");
    app.add_option("--seed", seed_flag, "hex entropy stream to replay (reproducible runs)");
    app.add_flag("--production", g.production, "production mode; refuses --seed");

    std::string name;
    std::optional<std::string> phone;
    std::string password;
    DeviceArgs device;
    bool connect = false;

    auto* reg = app.add_subcommand("register", "enroll an account");
    reg->add_option("--name", name, "login name (username or e-mail)")->required();
    reg->add_option("--phone", phone, "phone number");
    reg->add_option("--password", password, "login password (5-15 of a-z0-9)")->required();
    add_device_options(reg, device);

    auto* login = app.add_subcommand("login", "run the three gates for one login");
    login->add_option("--name", name, "login name")->required();
    login->add_option("--password", password, "login password")->required();
    login->add_flag("--connect", connect, "talk to a running server on --port instead of in-process");
    add_device_options(login, device);

    auto* serve = app.add_subcommand("serve", "run the reference server");
    serve->add_flag("--lax-luhn", device.lax_luhn, "accept IMEIs with a bad Luhn check digit");

    auto* fig1 = app.add_subcommand("demo-fig1", "compose the worked login-password example");
    auto* fig2 = app.add_subcommand("demo-fig2", "extract the worked username identifier");

    std::string scenario;
    std::optional<std::string> transcript_dir;
    auto* attack = app.add_subcommand("attack", "run an attack scenario against a fixture account");
    attack->add_option("scenario", scenario, "happy-path | sim-swap | stolen-credentials | replay-ap | wrong-device")
        ->required();
    attack->add_option("--transcript-dir", transcript_dir, "write the scenario transcript as a hex dump");

    auto* audit = app.add_subcommand("audit", "recompute every stored identifier and digest");

    std::string account;
    std::string field;
    auto* inspect = app.add_subcommand("inspect", "print a stored credential matrix");
    inspect->add_option("account", account, "account id or login name")->required();
    inspect->add_option("field", field, "un | pn | lp")->required();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    if (!store_flag.empty()) {
        g.store = store_flag;
    }
    if (!seed_flag.empty()) {
        g.seed = seed_flag;
    }

    try {
        if (g.seed && g.production) {
            throw UsageError("--seed is refused in --production mode");
        }
        if (*reg) return cmd_register(g, name, phone, password, device, out);
        if (*login) return cmd_login(g, name, password, device, connect, out);
        if (*serve) return cmd_serve(g, device.lax_luhn, out);
        if (*fig1) return cmd_demo_fig1(out);
        if (*fig2) return cmd_demo_fig2(out);
        if (*attack) return cmd_attack(scenario, transcript_dir, out, err);
        if (*audit) return cmd_audit(g, out);
        if (*inspect) return cmd_inspect(g, account, field, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitMismatch;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace trident::cli
