#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "defix/error.hpp"

namespace defix::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

Reader::Reader(std::istream& in, const std::vector<std::string>& required)
    : in_(in), required_(required) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) {
        throw Error(ErrorCode::SchemaMismatch, "empty input: header row missing");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    header_ = split_line(line);
    for (const auto& name : required_) {
        const auto it = std::find(header_.begin(), header_.end(), name);
        if (it == header_.end()) {
            throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header", line_);
        }
        required_index_.push_back(static_cast<std::size_t>(it - header_.begin()));
    }
}

bool Reader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (trim(line).empty()) continue;
        fields_ = split_line(line);
        if (fields_.size() != header_.size()) {
            throw Error(ErrorCode::SchemaMismatch,
                        "expected " + std::to_string(header_.size()) + " fields, found " +
                            std::to_string(fields_.size()),
                        line_);
        }
        return true;
    }
    return false;
}

std::string_view Reader::field(std::string_view column) const {
    for (std::size_t i = 0; i < required_.size(); ++i) {
        if (required_[i] == column) return fields_[required_index_[i]];
    }
    throw Error(ErrorCode::MissingColumn, "column '" + std::string(column) + "' not requested");
}

std::optional<double> parse_optional_number(std::string_view text, std::string_view column,
                                            std::size_t row) {
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = text.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::BadNumber,
                    "column '" + std::string(column) + "': cannot parse '" + std::string(text) + "'",
                    row);
    }
    return v;
}

std::string format_exact(double v) {
    if (std::isnan(v)) return {};
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
    if (std::isnan(v)) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);  // no "-0.000"
    }
    return s;
}

std::string quote_if_needed(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace defix::csv
