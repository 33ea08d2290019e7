#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace libexpert {

// RFC-4180 quoting: fields containing comma, quote, CR or LF are wrapped in
// double quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

void csv_write_row(std::ostream& out, const std::vector<std::string>& fields);
std::string csv_write_row(const std::vector<std::string>& fields);

// Parses a full CSV document. Handles quoted fields, doubled quotes,
// CRLF/LF line ends and a missing final newline. Throws ParseError on
// malformed quoting.
std::vector<std::vector<std::string>> csv_parse(std::string_view text);

std::vector<std::vector<std::string>> csv_read_file(const std::filesystem::path& path);

void csv_write_file(const std::filesystem::path& path,
                    const std::vector<std::vector<std::string>>& rows);

}  // namespace libexpert
