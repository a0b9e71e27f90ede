#include <doctest.h>

#include <atomic>
#include <functional>
#include <set>
#include <thread>

#include "support.hpp"
#include "trident/account_store.hpp"
#include "trident/error.hpp"
#include "trident/fixtures.hpp"
#include "trident/wire/client.hpp"
#include "trident/wire/frame.hpp"
#include "trident/wire/scenario.hpp"
#include "trident/wire/server.hpp"
#include "trident/wire/stream.hpp"

using namespace trident;
using namespace trident::wire;

namespace {

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::IoError;
}

const std::string kImei = "490154203237518";
const std::string kImsi = "310150123456789";

SimDevice victim_device() { return SimDevice(Imei::parse(kImei), Imsi::parse(kImsi), "victim"); }

/// Server + store over in-process pipes, with the fixture account enrolled.
struct Rig {
    AccountStore store;
    ReplayEntropy server_rng{fixtures::fig1_registration_entropy()};
    ReplayEntropy client_rng{std::vector<std::uint8_t>{7}};
    Gatekeeper gk{store, server_rng};
    Server server{gk};

    Rig() {
        gk.enroll({"Benz428@woxinet.com", "+1 415 555 0133", "dp7a3k", Imei::parse(kImei), Imsi::parse(kImsi)});
    }

    /// Runs `client_side` against one served connection; returns the server's events.
    template <class F>
    std::vector<ServerEvent> connect(F&& client_side) {
        auto [c, s] = make_pipe();
        std::vector<ServerEvent> events;
        std::thread t([&, sp = s.get()] { events = server.serve_connection(*sp); });
        try {
            client_side(*c);
        } catch (const Error&) {
        }
        c->close();
        t.join();
        return events;
    }
};

std::vector<Message> drain(ByteStream& s) {
    std::vector<Message> out;
    try {
        for (;;) {
            out.push_back(receive_message(s));
        }
    } catch (const Error&) {
    }
    return out;
}

}  // namespace

TEST_CASE("frame header is a 4-byte big-endian length") {
    const auto frame = frame_payload(R"({"t":"HELLO"})");
    REQUIRE(frame.size() == 17);
    CHECK(frame[0] == 0x00);
    CHECK(frame[1] == 0x00);
    CHECK(frame[2] == 0x00);
    CHECK(frame[3] == 0x0D);
    CHECK(read_length_prefix(std::span<const std::uint8_t, 4>(frame.data(), 4)) == 13);
    CHECK(error_of([&] { decode_frame(frame); }) == Errc::UnknownType);
}

TEST_CASE("frame errors") {
    CHECK(error_of([] { frame_payload(std::string(70000, 'x')); }) == Errc::Oversize);
    CHECK(frame_payload(std::string(kMaxFramePayload, 'x')).size() == kMaxFramePayload + 4);

    const std::vector<std::uint8_t> oversize{0x00, 0x01, 0x00, 0x01};
    CHECK(error_of([&] { decode_frame(oversize); }) == Errc::Oversize);

    const auto good = encode_frame(ResultMsg{"proceed"});
    const std::vector<std::uint8_t> truncated(good.begin(), good.end() - 1);
    CHECK(error_of([&] { decode_frame(truncated); }) == Errc::ShortRead);
    CHECK(error_of([] { decode_frame(std::vector<std::uint8_t>{0, 0}); }) == Errc::ShortRead);

    CHECK(error_of([] { decode_frame(frame_payload("{not json")); }) == Errc::MalformedJson);
    CHECK(error_of([] { decode_frame(frame_payload(R"({"t":"NAME"})")); }) == Errc::MalformedJson);
    CHECK(error_of([] { decode_frame(frame_payload(R"({"t":"RESULT","outcome":"maybe"})")); }) ==
          Errc::MalformedJson);
    CHECK(error_of([] { decode_frame(frame_payload("[]")); }) != Errc::IoError);
}

TEST_CASE("encode/decode round-trips every message type") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 500; ++i) {
        const std::string a = test::random_printable(gen, gen() % 20);
        const std::string b = test::random_printable(gen, gen() % 20);
        const std::vector<Message> messages{
            RegisterMsg{a, b, (i % 2) ? std::optional<std::string>(a + b) : std::nullopt, b, a, b},
            NameMsg{a, b, a, b},
            PasswordMsg{b, a, b, a},
            ResultMsg{i % 2 ? "proceed" : "access denied"},
            TokenMsg{a},
        };
        for (const Message& m : messages) {
            const auto frame = encode_frame(m);
            const DecodedFrame d = decode_frame(frame);
            CHECK(d.message == m);
            CHECK(d.consumed == frame.size());
        }
    }
}

TEST_CASE("decode consumes exactly one frame from a concatenation") {
    auto bytes = encode_frame(ResultMsg{"proceed"});
    const auto second = encode_frame(TokenMsg{"abcd"});
    const std::size_t first_size = bytes.size();
    bytes.insert(bytes.end(), second.begin(), second.end());
    const DecodedFrame d = decode_frame(bytes);
    CHECK(d.consumed == first_size);
    CHECK(std::get<TokenMsg>(decode_frame(std::span(bytes).subspan(d.consumed)).message).token_hex == "abcd");
}

TEST_CASE("field filter") {
    CHECK(field_filter_accepts("benz428"));
    CHECK_FALSE(field_filter_accepts(""));
    CHECK_FALSE(field_filter_accepts("Benz428"));
    CHECK_FALSE(field_filter_accepts("dp7a#k"));
    CHECK_FALSE(field_filter_accepts(fixtures::kFig1Ap));
}

TEST_CASE("pipe stream reports short reads") {
    auto [a, b] = make_pipe();
    const std::uint8_t data[] = {1, 2, 3};
    a->write_all(data);
    a->close();
    std::array<std::uint8_t, 4> out{};
    CHECK(error_of([&, bp = b.get()] { bp->read_exact(out); }) == Errc::ShortRead);
}

TEST_CASE("server happy path: proceed, proceed, token") {
    Rig rig;
    std::vector<Message> replies;
    const auto events = rig.connect([&](ByteStream& c) {
        send_message(c, NameMsg{"s1", "benz428", kImei, kImsi});
        send_message(c, PasswordMsg{"s1", "dp7a3k", kImei, kImsi});
        replies = drain(c);
    });
    REQUIRE(replies.size() == 3);
    CHECK(std::get<ResultMsg>(replies[0]).outcome == "proceed");
    CHECK(std::get<ResultMsg>(replies[1]).outcome == "proceed");
    CHECK(std::get<TokenMsg>(replies[2]).token_hex.size() == 64);
    REQUIRE(events.size() == 3);
    CHECK(events.back().kind == EventKind::Authenticated);
}

TEST_CASE("server rejects a filtered name before any gate runs") {
    Rig rig;
    std::vector<Message> replies;
    const auto events = rig.connect([&](ByteStream& c) {
        send_message(c, NameMsg{"s1", "benz#428", kImei, kImsi});
        replies = drain(c);
    });
    REQUIRE(replies.size() == 1);
    CHECK(std::get<ResultMsg>(replies[0]).outcome == "access denied");
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::FilterReject);
}

TEST_CASE("server denies PASSWORD before NAME and closes") {
    Rig rig;
    std::vector<Message> replies;
    const auto events = rig.connect([&](ByteStream& c) {
        send_message(c, PasswordMsg{"s1", "dp7a3k", kImei, kImsi});
        replies = drain(c);
    });
    REQUIRE(replies.size() == 1);
    CHECK(std::get<ResultMsg>(replies[0]).outcome == "access denied");
    REQUIRE(events.size() == 1);
    CHECK(events[0].reason == DenyReason::StageOrder);
}

TEST_CASE("server treats garbage and server-only messages as protocol violations") {
    Rig rig;
    auto events = rig.connect([&](ByteStream& c) {
        const auto frame = frame_payload("{garbage");
        c.write_all(frame);
        drain(c);
    });
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::ProtocolViolation);

    events = rig.connect([&](ByteStream& c) {
        send_message(c, TokenMsg{"00"});
        drain(c);
    });
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::ProtocolViolation);
}

TEST_CASE("deny replies are byte-identical across causes") {
    Rig rig;
    std::set<std::vector<std::uint8_t>> frames;
    auto capture = [&](std::vector<Message> script) {
        rig.connect([&](ByteStream& c) {
            for (const Message& m : script) {
                send_message(c, m);
            }
            std::vector<std::uint8_t> raw;
            for (;;) {
                const Message m = receive_message(c, raw);
                if (std::holds_alternative<ResultMsg>(m) && std::get<ResultMsg>(m).outcome == "access denied") {
                    frames.insert(raw);
                    break;
                }
            }
        });
    };
    capture({NameMsg{"s", "nobody", kImei, kImsi}});
    capture({NameMsg{"s", "benz428", kImei, "310150123456788"}});
    capture({NameMsg{"s", "benz428", "490154203237519", kImsi}});
    capture({NameMsg{"s", "benz428", kImei, kImsi}, PasswordMsg{"s", "wrongpw", kImei, kImsi}});
    capture({NameMsg{"s", "benz428", kImei, kImsi}, PasswordMsg{"s", "dp7a3K", kImei, kImsi}});
    capture({PasswordMsg{"s", "dp7a3k", kImei, kImsi}});
    CHECK(frames.size() == 1);
}

TEST_CASE("SimClient enroll and login over a pipe") {
    AccountStore store;
    SystemEntropy rng;
    Gatekeeper gk(store, rng);
    Server server(gk);
    SystemEntropy crng;

    auto session = [&](auto&& body) {
        auto [c, s] = make_pipe();
        std::thread t([&, sp = s.get()] { server.serve_connection(*sp); });
        SimClient client(victim_device(), *c, crng);
        body(client);
        c->close();
        t.join();
        return client.transcript();
    };

    session([](SimClient& client) { CHECK(client.enroll("Alice.Smith@example.org", std::nullopt, "hunter22")); });
    const Transcript t = session([](SimClient& client) {
        const LoginOutcome o = client.login("alice.smith@example.org", "hunter22");
        CHECK(o.authenticated());
        CHECK(o.results == std::vector<std::string>{"proceed", "proceed"});
    });
    CHECK(t.entries().size() == 5);
    session([](SimClient& client) { CHECK_FALSE(client.login("alicesmith", "hunter23").authenticated()); });

    const std::string dump = t.to_hex_dump();
    CHECK(dump.rfind("C2S ", 0) == 0);
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 5);
    CHECK(dump.find("\nS2C ") != std::string::npos);
}

TEST_CASE("TCP loopback with concurrent clients") {
    AccountStore store;
    SystemEntropy rng;
    Gatekeeper gk(store, rng);
    Server server(gk);
    TcpListener listener(0);
    std::atomic<bool> stop{false};
    std::thread server_thread([&] { server.run(listener, stop); });

    std::mt19937_64 gen(12);
    std::vector<RegistrationRequest> requests;
    for (int i = 0; i < 8; ++i) {
        requests.push_back(test::random_request(gen));
    }
    std::atomic<int> authenticated{0};
    std::vector<std::thread> clients;
    for (const RegistrationRequest& req : requests) {
        clients.emplace_back([&, req] {
            SystemEntropy crng;
            const SimDevice device(req.imei, req.imsi, "handset");
            {
                auto conn = connect_tcp("127.0.0.1", listener.port());
                SimClient client(device, *conn, crng);
                if (!client.enroll(req.login_name_raw, std::nullopt, req.login_password)) {
                    return;
                }
            }
            auto conn = connect_tcp("127.0.0.1", listener.port());
            SimClient client(device, *conn, crng);
            if (client.login(req.login_name_raw, req.login_password).authenticated()) {
                ++authenticated;
            }
        });
    }
    for (std::thread& t : clients) {
        t.join();
    }
    stop = true;
    server_thread.join();
    CHECK(authenticated.load() == 8);
    CHECK(store.size() == 8);
}

TEST_CASE("scenario names parse both spellings") {
    CHECK(parse_scenario("sim-swap") == Scenario::SimSwap);
    CHECK(parse_scenario("SIM_SWAP") == Scenario::SimSwap);
    CHECK(error_of([] { parse_scenario("teleport"); }) == Errc::UnknownScenario);
}

TEST_CASE("scenario verdicts") {
    ScenarioHarness harness(default_fixtures());
    for (Scenario s : kAllScenarios) {
        CAPTURE(scenario_name(s));
        const ScenarioRun run = harness.run(s);
        CHECK(run.verdict == expected_verdict(s));
    }
    const ScenarioRun happy = harness.run(Scenario::HappyPath);
    CHECK(happy.outcome.authenticated());
    const ScenarioRun swap = harness.run(Scenario::SimSwap);
    CHECK_FALSE(swap.outcome.authenticated());
    REQUIRE_FALSE(swap.events.empty());
    CHECK(swap.events.back().reason == DenyReason::WrongDevice);
}

TEST_CASE("no server secret appears on the wire") {
    const Fixtures fx = default_fixtures();
    ScenarioHarness harness(fx);
    const std::vector<std::string> secrets = harness.wire_secrets();
    REQUIRE(secrets.size() > 5);
    for (const std::string& secret : secrets) {
        CAPTURE(secret);
        CHECK_FALSE(harness.registration_transcript().contains(secret));
    }
    for (Scenario s : kAllScenarios) {
        const ScenarioRun run = harness.run(s);
        for (const TranscriptEntry& e : run.transcript.entries()) {
            // The replay attacker types the captured AP; that keystroke payload
            // is the attack input, not something the system emitted.
            if (s == Scenario::ReplayAp && e.direction == FrameDirection::ClientToServer) {
                const Message m = decode_frame(e.frame).message;
                if (const auto* pw = std::get_if<PasswordMsg>(&m); pw && pw->credential == fx.captured_ap) {
                    continue;
                }
            }
            const std::string bytes(e.frame.begin(), e.frame.end());
            for (const std::string& secret : secrets) {
                CAPTURE(scenario_name(s));
                CAPTURE(secret);
                CHECK(bytes.find(secret) == std::string::npos);
            }
        }
    }
}
