#include "trident/account_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trident/error.hpp"

namespace trident {

using json = nlohmann::ordered_json;

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept {
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    volatile std::uint8_t diff = a.size() == b.size() ? 0 : 1;
    for (std::size_t i = 0; i < n; ++i) {
        diff = diff | static_cast<std::uint8_t>(a[i] ^ b[i]);
    }
    return diff == 0;
}

std::string_view fault_point_name(FaultPoint point) noexcept {
    switch (point) {
        case FaultPoint::BeforeTempWrite: return "before-temp-write";
        case FaultPoint::MidTempWrite: return "mid-temp-write";
        case FaultPoint::BeforeFsync: return "before-fsync";
        case FaultPoint::BeforeRename: return "before-rename";
        case FaultPoint::AfterRename: return "after-rename";
    }
    return "?";
}

namespace {

json plan_to_json(const SelectionPlan& plan) {
    json cells = json::array();
    for (const Cell& c : plan.cells) {
        cells.push_back(json::array({c.row, column_name(c.column)}));
    }
    return cells;
}

SelectionPlan plan_from_json(const json& j) {
    SelectionPlan plan;
    for (const json& cell : j) {
        const auto column = parse_column(cell.at(1).get<std::string>());
        if (!column || cell.size() != 2) {
            throw Error(Errc::CorruptRecord, "bad selection plan cell");
        }
        plan.cells.push_back({cell.at(0).get<std::uint32_t>(), *column});
    }
    if (plan.cells.empty()) {
        throw Error(Errc::CorruptRecord, "empty selection plan");
    }
    return plan;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const json& j) {
    const auto bytes = from_hex(j.get<std::string>());
    if (bytes.size() != N) {
        throw Error(Errc::CorruptRecord, "binary field has wrong size");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

json field_to_json(const CredentialField& f) {
    json codebook = json::object();
    for (char c : kLoginAlphabet) {
        const CodebookEntry& e = f.codebook.at(c);
        codebook[std::string(1, c)] = json::array({e.digit, e.converted});
    }
    json labels = json::array();
    for (const ShuffleLabel& l : f.labels) {
        labels.push_back(l.render());
    }
    json j;
    j["credential"] = f.credential;
    j["length"] = f.registered_length();
    j["codebook"] = std::move(codebook);
    j["labels"] = std::move(labels);
    j["plan"] = plan_to_json(f.plan);
    j["identifier"] = f.identifier;
    j["digest_hex"] = to_hex(f.digest);
    return j;
}

CredentialField field_from_json(const json& j) {
    CredentialField f;
    f.credential = j.at("credential").get<std::string>();
    if (j.at("length").get<std::size_t>() != f.credential.size()) {
        throw Error(Errc::CorruptRecord, "registered length disagrees with credential");
    }
    const json& codebook = j.at("codebook");
    if (codebook.size() != kLoginAlphabet.size()) {
        throw Error(Errc::CorruptRecord, "codebook must cover 36 characters");
    }
    for (char c : kLoginAlphabet) {
        const json& e = codebook.at(std::string(1, c));
        f.codebook.set(c, CodebookEntry{e.at(0).get<int>(), e.at(1).get<std::string>()});
    }
    for (const json& l : j.at("labels")) {
        f.labels.push_back(ShuffleLabel::parse(l.get<std::string>()));
    }
    f.plan = plan_from_json(j.at("plan"));
    f.identifier = j.at("identifier").get<std::string>();
    f.digest = fixed_from_hex<32>(j.at("digest_hex"));
    return f;
}

}  // namespace

std::string serialize_record(const AccountRecord& r) {
    json j;
    j["account_id"] = r.account_id;
    j["login_name"] = {{"normalized", r.login_name.normalized},
                       {"kind", r.login_name.kind == LoginNameKind::PhoneNumber ? "PHONE_NUMBER" : "USERNAME"}};
    j["imei"] = r.imei.digits();
    j["imsi"] = r.imsi.digits();
    j["salt_hex"] = to_hex(r.salt);
    j["un"] = field_to_json(r.un);
    j["pn"] = r.pn ? field_to_json(*r.pn) : json(nullptr);
    j["lp"] = field_to_json(r.lp);
    j["ap"] = {{"plan", plan_to_json(r.ap.plan)}, {"identifier", r.ap.identifier}, {"digest_hex", to_hex(r.ap.digest)}};
    return j.dump();
}

AccountRecord parse_record(std::string_view line) {
    try {
        const json j = json::parse(line);
        const json& name = j.at("login_name");
        const std::string kind = name.at("kind").get<std::string>();
        if (kind != "USERNAME" && kind != "PHONE_NUMBER") {
            throw Error(Errc::CorruptRecord, "unknown login name kind");
        }
        AccountRecord r{
            .account_id = j.at("account_id").get<std::string>(),
            .login_name = {name.at("normalized").get<std::string>(),
                           kind == "PHONE_NUMBER" ? LoginNameKind::PhoneNumber : LoginNameKind::Username},
            .imei = Imei::parse(j.at("imei").get<std::string>(), false),
            .imsi = Imsi::parse(j.at("imsi").get<std::string>()),
            .salt = fixed_from_hex<16>(j.at("salt_hex")),
            .un = field_from_json(j.at("un")),
            .pn = std::nullopt,
            .lp = field_from_json(j.at("lp")),
            .ap = {},
        };
        if (!j.at("pn").is_null()) {
            r.pn = field_from_json(j.at("pn"));
        }
        const json& ap = j.at("ap");
        r.ap.plan = plan_from_json(ap.at("plan"));
        r.ap.identifier = ap.at("identifier").get<std::string>();
        r.ap.digest = fixed_from_hex<32>(ap.at("digest_hex"));
        return r;
    } catch (const Error& e) {
        throw Error(Errc::CorruptRecord, e.what());
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptRecord, e.what());
    }
}

std::filesystem::path resolve_store_path(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) {
        return *flag;
    }
    if (const char* env = std::getenv(std::string(kStorePathEnv).c_str()); env && *env) {
        return env;
    }
    return std::string(kDefaultStorePath);
}

AccountStore::AccountStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    if (!in) {
        if (std::filesystem::exists(*path_)) {
            throw Error(Errc::IoError, "cannot read " + path_->string());
        }
        return;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            records_.push_back(parse_record(line));
        } catch (const Error& e) {
            throw Error(Errc::CorruptRecord, path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

const AccountRecord* AccountStore::find_locked(std::string_view key) const {
    for (const AccountRecord& r : records_) {
        if (r.account_id == key || r.login_name.normalized == key || (r.pn && r.pn->credential == key)) {
            return &r;
        }
    }
    return nullptr;
}

void AccountStore::fault(FaultPoint point) const {
    if (fault_hook_) {
        fault_hook_(point);
    }
}

namespace {

class FileDescriptor {
public:
    explicit FileDescriptor(int fd) : fd_(fd) {}
    ~FileDescriptor() {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;

    int get() const noexcept { return fd_; }

private:
    int fd_;
};

[[noreturn]] void io_error(const std::string& what) {
    throw Error(Errc::IoError, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            io_error("write");
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::string serialize_all(const std::vector<AccountRecord>& records) {
    std::string out;
    for (const AccountRecord& r : records) {
        out += serialize_record(r);
        out.push_back('\n');
    }
    return out;
}

}  // namespace

void AccountStore::persist_locked(const std::vector<AccountRecord>& records) {
    if (!path_) {
        return;
    }
    const std::string content = serialize_all(records);
    const std::filesystem::path tmp = path_->string() + ".tmp";
    const std::filesystem::path lockfile = path_->string() + ".lock";

    FileDescriptor lock(::open(lockfile.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600));
    if (lock.get() < 0 || ::flock(lock.get(), LOCK_EX) != 0) {
        io_error("lock " + lockfile.string());
    }

    fault(FaultPoint::BeforeTempWrite);
    {
        FileDescriptor fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600));
        if (fd.get() < 0) {
            io_error("open " + tmp.string());
        }
        const std::string_view view = content;
        write_all(fd.get(), view.substr(0, view.size() / 2));
        fault(FaultPoint::MidTempWrite);
        write_all(fd.get(), view.substr(view.size() / 2));
        fault(FaultPoint::BeforeFsync);
        if (::fsync(fd.get()) != 0) {
            io_error("fsync " + tmp.string());
        }
    }
    fault(FaultPoint::BeforeRename);
    if (::rename(tmp.c_str(), path_->c_str()) != 0) {
        io_error("rename " + tmp.string());
    }
    std::filesystem::path dir = path_->parent_path();
    if (dir.empty()) {
        dir = ".";
    }
    FileDescriptor dirfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
    if (dirfd.get() >= 0) {
        ::fsync(dirfd.get());
    }
    fault(FaultPoint::AfterRename);
}

void AccountStore::save_account(const AccountRecord& record) {
    std::unique_lock lock(mutex_);
    if (find_locked(record.account_id) || find_locked(record.login_name.normalized) ||
        (record.pn && find_locked(record.pn->credential))) {
        throw Error(Errc::DuplicateAccount, record.account_id);
    }
    std::vector<AccountRecord> next = records_;
    next.push_back(record);
    persist_locked(next);
    records_ = std::move(next);
}

AccountRecord AccountStore::load_account(std::string_view key) const {
    std::shared_lock lock(mutex_);
    const AccountRecord* r = find_locked(key);
    if (!r) {
        throw Error(Errc::NotFound, std::string(key));
    }
    if (const auto violations = integrity_violations(*r); !violations.empty()) {
        throw Error(Errc::CorruptRecord, r->account_id + ": " + violations.front());
    }
    return *r;
}

std::vector<AuditFinding> AccountStore::audit() const {
    std::shared_lock lock(mutex_);
    std::vector<AuditFinding> out;
    for (const AccountRecord& r : records_) {
        out.push_back({r.account_id, integrity_violations(r)});
    }
    return out;
}

std::vector<std::string> AccountStore::account_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const AccountRecord& r : records_) {
        out.push_back(r.account_id);
    }
    return out;
}

std::size_t AccountStore::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::string AccountStore::serialize() const {
    std::shared_lock lock(mutex_);
    return serialize_all(records_);
}

}  // namespace trident
