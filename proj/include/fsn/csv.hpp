#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsn {

/// Delimiter-separated record reader. Handles RFC 4180 quoting, including
/// quoted fields that span lines, and strips a UTF-8 byte-order mark.
class CsvReader {
public:
    explicit CsvReader(std::istream& in, char delimiter = ',');

    /// Reads the next record. Returns false at end of input. Blank lines are
    /// skipped.
    bool next(std::vector<std::string>& fields);

    /// 1-based physical line on which the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
    bool first_ = true;
};

std::vector<std::string> split_record(std::string_view line, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote, or a newline.
std::string csv_field(std::string_view value, char delimiter = ',');

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

std::optional<double> parse_number(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::string to_upper(std::string_view text);
std::string to_lower(std::string_view text);

/// Parses `key = value` lines. `#` starts a comment; blank lines are ignored.
/// Lines of the form `[section]` prefix following keys with `section.`.
/// Throws ParseError for a line without '='.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in,
                                                                 const std::string& source_name);

}  // namespace fsn
