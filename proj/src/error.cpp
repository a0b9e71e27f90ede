#include "trident/error.hpp"

namespace trident {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidCharacter: return "INVALID_CHARACTER";
        case Errc::LabelCountMismatch: return "LABEL_COUNT_MISMATCH";
        case Errc::PlanOutOfBounds: return "PLAN_OUT_OF_BOUNDS";
        case Errc::BadLabel: return "BAD_LABEL";
        case Errc::EntropyFailure: return "ENTROPY_FAILURE";
        case Errc::BadLength: return "BAD_LENGTH";
        case Errc::BadChar: return "BAD_CHAR";
        case Errc::BadChecksum: return "BAD_CHECKSUM";
        case Errc::EmptyAfterNormalization: return "EMPTY_AFTER_NORMALIZATION";
        case Errc::TooShort: return "TOO_SHORT";
        case Errc::TooLong: return "TOO_LONG";
        case Errc::PolicyExhausted: return "POLICY_EXHAUSTED";
        case Errc::DuplicateAccount: return "DUPLICATE_ACCOUNT";
        case Errc::NotFound: return "NOT_FOUND";
        case Errc::CorruptRecord: return "CORRUPT_RECORD";
        case Errc::IoError: return "IO_ERROR";
        case Errc::Oversize: return "OVERSIZE";
        case Errc::MalformedJson: return "MALFORMED_JSON";
        case Errc::UnknownType: return "UNKNOWN_TYPE";
        case Errc::ShortRead: return "SHORT_READ";
        case Errc::UnknownScenario: return "UNKNOWN_SCENARIO";
    }
    return "UNKNOWN";
}

}  // namespace trident
