#include "defix/error.hpp"

namespace defix {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::BadDate: return "BadDate";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InterestOutOfRange: return "InterestOutOfRange";
    case ErrorCode::InsufficientEligible: return "InsufficientEligible";
    case ErrorCode::ZeroCapitalization: return "ZeroCapitalization";
    case ErrorCode::MissingPrice: return "MissingPrice";
    case ErrorCode::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewEntities: return "TooFewEntities";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> row) {
    std::string out(to_string(code));
    if (row) {
        out += " at row " + std::to_string(*row);
    }
    out += ": ";
    out += message;
    return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row)
    : std::runtime_error(decorate(code, message, row)), code_(code), row_(row) {}

}  // namespace defix
