#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trident {

enum class Errc {
    // matrix_hash
    InvalidCharacter,
    LabelCountMismatch,
    PlanOutOfBounds,
    BadLabel,
    EntropyFailure,
    // identity
    BadLength,
    BadChar,
    BadChecksum,
    EmptyAfterNormalization,
    TooShort,
    TooLong,
    // gatekeeper / store
    PolicyExhausted,
    DuplicateAccount,
    NotFound,
    CorruptRecord,
    IoError,
    // wire
    Oversize,
    MalformedJson,
    UnknownType,
    ShortRead,
    UnknownScenario,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace trident
