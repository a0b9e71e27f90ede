#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trident/gatekeeper.hpp"

namespace trident {

inline constexpr std::string_view kStorePathEnv = "TRIDENT_STORE_PATH";
inline constexpr std::string_view kDefaultStorePath = "trident_store.ndjson";

/// True iff equal length and equal bytes. Every byte of the shorter input is
/// inspected regardless of where the first mismatch is.
bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;

inline bool constant_time_equal(std::string_view a, std::string_view b) noexcept {
    return constant_time_equal(as_bytes(a), as_bytes(b));
}

/// Points at which a save can be interrupted; used by crash-injection tests.
enum class FaultPoint { BeforeTempWrite, MidTempWrite, BeforeFsync, BeforeRename, AfterRename };

inline constexpr FaultPoint kAllFaultPoints[] = {FaultPoint::BeforeTempWrite, FaultPoint::MidTempWrite,
                                                  FaultPoint::BeforeFsync, FaultPoint::BeforeRename,
                                                  FaultPoint::AfterRename};

std::string_view fault_point_name(FaultPoint point) noexcept;

/// One JSON object per line, keys in fixed order.
std::string serialize_record(const AccountRecord& record);

/// Throws CorruptRecord on malformed or invariant-violating input.
AccountRecord parse_record(std::string_view line);

struct AuditFinding {
    std::string account_id;
    std::vector<std::string> violations;
};

/// Flag > TRIDENT_STORE_PATH > default.
std::filesystem::path resolve_store_path(const std::optional<std::string>& flag);

/// Newline-delimited JSON account store. Saves rewrite the whole file through
/// a temp file which is fsynced and renamed over the original. A store
/// constructed without a path keeps records in memory only.
class AccountStore {
public:
    AccountStore() = default;

    /// Loads `path` if it exists. Throws CorruptRecord on a malformed line.
    explicit AccountStore(std::filesystem::path path);

    AccountStore(const AccountStore&) = delete;
    AccountStore& operator=(const AccountStore&) = delete;

    /// Throws DuplicateAccount if the id, login name or phone number is taken;
    /// IoError on write failure.
    void save_account(const AccountRecord& record);

    /// Lookup by account id, normalized login name, or registered phone number.
    /// Throws NotFound, or CorruptRecord if the record fails its integrity recheck.
    AccountRecord load_account(std::string_view key) const;

    std::vector<AuditFinding> audit() const;

    std::vector<std::string> account_ids() const;
    std::size_t size() const;

    /// Canonical serialization of every record in insertion order.
    std::string serialize() const;

    const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

    /// Called at each FaultPoint during save; throwing from it simulates a crash.
    void set_fault_hook(std::function<void(FaultPoint)> hook) { fault_hook_ = std::move(hook); }

private:
    const AccountRecord* find_locked(std::string_view key) const;
    void persist_locked(const std::vector<AccountRecord>& records);
    void fault(FaultPoint point) const;

    std::optional<std::filesystem::path> path_;
    std::vector<AccountRecord> records_;
    mutable std::shared_mutex mutex_;
    std::function<void(FaultPoint)> fault_hook_;
};

}  // namespace trident
