// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chipdse {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name, or -1.
    [[nodiscard]] int column(std::string_view name) const;
};

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);
std::string csv_line(const std::vector<std::string>& fields);

CsvTable parse_csv(std::string_view text);
/// Throws ParseError when the file cannot be read.
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// "2026-01-31T12:00:00Z".
std::string utc_timestamp();

}  // namespace chipdse
