#pragma once

// Minimal RFC-4180-ish reader/writer for the fixed input schemas.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace defix::csv {

class Reader {
public:
    /// Reads the header line and checks that every required column exists.
    /// Throws Error{MissingColumn} / Error{SchemaMismatch}.
    Reader(std::istream& in, const std::vector<std::string>& required);

    /// Advances to the next non-blank record. False at end of stream.
    bool next();

    /// Field by column name; the name must be one of the required columns.
    std::string_view field(std::string_view column) const;
    /// Physical line number of the current record (header is line 1).
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::vector<std::string> header_;
    std::vector<std::size_t> required_index_;
    std::vector<std::string> required_;
    std::vector<std::string> fields_;
    std::size_t line_ = 0;
};

std::vector<std::string> split_line(std::string_view line);

/// Strict double parse; empty string yields nullopt, garbage throws
/// Error{BadNumber} tagged with `row`.
std::optional<double> parse_optional_number(std::string_view text, std::string_view column,
                                            std::size_t row);

/// Shortest text that parses back to the identical double.
std::string format_exact(double v);
/// Fixed decimals; missing values render as an empty string.
std::string format_fixed(double v, int decimals);

std::string quote_if_needed(std::string_view s);

}  // namespace defix::csv
