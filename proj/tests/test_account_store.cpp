#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "trident/account_store.hpp"
#include "trident/error.hpp"
#include "trident/fixtures.hpp"

using namespace trident;

namespace {

struct Crash {};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::IoError;
}

AccountRecord fig1_record() {
    ReplayEntropy rng(fixtures::fig1_registration_entropy());
    return register_account({"Benz428@woxinet.com", "+1 415 555 0133", "dp7a3k", Imei::parse("490154203237518"),
                             Imsi::parse("310150123456789")},
                            rng);
}

}  // namespace

TEST_CASE("constant_time_equal") {
    CHECK(constant_time_equal("abc", "abc"));
    CHECK_FALSE(constant_time_equal("abc", "abd"));
    CHECK_FALSE(constant_time_equal("abc", "ab"));
    CHECK_FALSE(constant_time_equal("", "a"));
    CHECK(constant_time_equal("", ""));
}

TEST_CASE("save then load returns an equal record") {
    test::TempDir dir;
    const AccountRecord r = fig1_record();
    {
        AccountStore store(dir / "s.ndjson");
        store.save_account(r);
        CHECK(store.load_account("benz428") == r);
        CHECK(store.load_account("14155550133") == r);
    }
    AccountStore reopened(dir / "s.ndjson");
    CHECK(reopened.size() == 1);
    CHECK(reopened.load_account("benz428") == r);
    CHECK(error_of([&] { reopened.load_account("nobody"); }) == Errc::NotFound);
    CHECK(error_of([&] { reopened.save_account(r); }) == Errc::DuplicateAccount);
}

TEST_CASE("records serialize with a fixed key order") {
    const std::string line = serialize_record(fig1_record());
    const char* keys[] = {"\"account_id\"", "\"login_name\"", "\"imei\"", "\"imsi\"", "\"salt_hex\"",
                          "\"un\"",         "\"pn\"",         "\"lp\"",   "\"ap\""};
    std::size_t last = 0;
    for (const char* k : keys) {
        const std::size_t pos = line.find(k);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= last);
        last = pos;
    }
    CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("serialization round-trips random records") {
    std::mt19937_64 gen(4);
    SystemEntropy rng;
    for (int i = 0; i < 200; ++i) {
        const AccountRecord r = register_account(test::random_request(gen, i % 3 == 0), rng);
        const std::string line = serialize_record(r);
        const AccountRecord back = parse_record(line);
        CHECK(back == r);
        CHECK(serialize_record(back) == line);
    }
}

TEST_CASE("a bit-flipped identifier on disk is reported as corrupt") {
    test::TempDir dir;
    const auto path = dir / "s.ndjson";
    AccountRecord r = fig1_record();
    r.un.identifier[1] = static_cast<char>(r.un.identifier[1] ^ 0x02);
    {
        std::ofstream out(path, std::ios::binary);
        out << serialize_record(r) << '\n';
    }
    AccountStore store(path);
    CHECK(error_of([&] { store.load_account("benz428"); }) == Errc::CorruptRecord);
    const auto findings = store.audit();
    REQUIRE(findings.size() == 1);
    CHECK_FALSE(findings[0].violations.empty());
}

TEST_CASE("a malformed line fails at open") {
    test::TempDir dir;
    const auto path = dir / "s.ndjson";
    {
        AccountStore store(path);
        store.save_account(fig1_record());
    }
    for (const std::string junk : {"{not json", "{}", "[1,2,3]", "{\"account_id\":5}"}) {
        std::ofstream(path, std::ios::app) << junk << '\n';
        CHECK(error_of([&] { AccountStore s(path); }) == Errc::CorruptRecord);
        // Drop the junk line again for the next case.
        std::string text = read_file(path);
        text.erase(text.find('\n') + 1);
        std::ofstream(path, std::ios::trunc) << text;
    }
    CHECK(AccountStore(path).size() == 1);
}

TEST_CASE("parse_record rejects wrong-sized binary fields and bad plans") {
    const std::string line = serialize_record(fig1_record());
    std::string bad = line;
    const auto salt = bad.find("\"salt_hex\":\"") + 12;
    bad.erase(salt, 2);
    CHECK(error_of([&] { parse_record(bad); }) == Errc::CorruptRecord);

    bad = line;
    const auto col = bad.find("\"STRING\"");
    REQUIRE(col != std::string::npos);
    bad.replace(col, 8, "\"MIDDLE\"");
    CHECK(error_of([&] { parse_record(bad); }) == Errc::CorruptRecord);
}

TEST_CASE("an interrupted save leaves either the old or the new file") {
    std::mt19937_64 gen(17);
    SystemEntropy rng;
    for (FaultPoint point : kAllFaultPoints) {
        CAPTURE(fault_point_name(point));
        test::TempDir dir;
        const auto path = dir / "s.ndjson";
        const AccountRecord first = register_account(test::random_request(gen), rng);
        const AccountRecord second = register_account(test::random_request(gen), rng);
        std::string old_text;
        {
            AccountStore store(path);
            store.save_account(first);
            old_text = read_file(path);
        }
        std::string new_text;
        {
            AccountStore store(path);
            store.set_fault_hook([point](FaultPoint p) {
                if (p == point) {
                    throw Crash{};
                }
            });
            CHECK_THROWS_AS(store.save_account(second), Crash);
            // The in-memory view is unchanged by a failed save.
            CHECK(store.size() == 1);
        }
        {
            AccountStore reference;
            reference.save_account(first);
            reference.save_account(second);
            new_text = reference.serialize();
        }
        const std::string on_disk = read_file(path);
        CHECK((on_disk == old_text || on_disk == new_text));
        if (point == FaultPoint::AfterRename) {
            CHECK(on_disk == new_text);
        } else {
            CHECK(on_disk == old_text);
        }
        AccountStore reopened(path);
        CHECK(reopened.load_account(first.account_id) == first);
    }
}

TEST_CASE("resolve_store_path precedence") {
    ::unsetenv(std::string(kStorePathEnv).c_str());
    CHECK(resolve_store_path(std::nullopt) == std::filesystem::path(kDefaultStorePath));
    ::setenv(std::string(kStorePathEnv).c_str(), "/tmp/from-env.ndjson", 1);
    CHECK(resolve_store_path(std::nullopt) == "/tmp/from-env.ndjson");
    CHECK(resolve_store_path(std::string("/tmp/flag.ndjson")) == "/tmp/flag.ndjson");
    ::unsetenv(std::string(kStorePathEnv).c_str());
}

TEST_CASE("in-memory store never touches disk") {
    AccountStore store;
    store.save_account(fig1_record());
    CHECK_FALSE(store.path().has_value());
    CHECK(store.account_ids() == std::vector<std::string>{"benz428"});
}
