#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace defix {

enum class ErrorCode {
    // ingestion
    MissingColumn,
    DuplicateKey,
    NegativeValue,
    BadDate,
    BadNumber,
    SchemaMismatch,
    InterestOutOfRange,
    // index construction
    InsufficientEligible,
    ZeroCapitalization,
    MissingPrice,
    // statistics / estimation
    NonPositiveLevel,
    TooFewObservations,
    ZeroVariance,
    RankDeficient,
    TooFewEntities,
    SeriesTooShort,
    // configuration and I/O
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. The code is stable and machine
/// readable; the message carries file/row context when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> row = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// 1-based physical line number in the source stream, header = line 1.
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> row_;
};

}  // namespace defix
