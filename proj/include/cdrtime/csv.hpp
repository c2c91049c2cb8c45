#pragma once

// Minimal CSV helpers shared by the readers and writers. Fields are quoted
// only when they contain a comma, a quote or a line break.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdrtime::csv {

/// Splits one record. Returns nullopt on an unterminated quoted field.
std::optional<std::vector<std::string>> split(std::string_view line);

std::string quote(std::string_view field);

/// Joins fields with commas, quoting where needed. No trailing newline.
std::string join(const std::vector<std::string>& fields);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Strips a trailing '\r' (CRLF input).
std::string_view chomp(std::string_view line);

}  // namespace cdrtime::csv
