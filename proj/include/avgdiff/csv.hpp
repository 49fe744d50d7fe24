#pragma once

#include <string>
#include <variant>
#include <vector>

#include "avgdiff/vec.hpp"

namespace avgdiff {

using CsvCell = std::variant<Index, double, std::string>;
using CsvRow = std::vector<CsvCell>;

/// Shortest-faithful decimal for a double: %.17g round-trips bit-exactly and
/// keeps short values short ("1.5" stays "1.5").
std::string format_double(double v);

std::string format_cell(const CsvCell& cell);

/// RFC-4180-style serialization: comma separated, LF endings, quoting only
/// when a value needs it. Byte-identical for identical inputs.
std::string csv_to_string(const std::vector<std::string>& header, const std::vector<CsvRow>& rows);

/// Writes the CSV, creating parent directories. Throws IoError on failure.
void write_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
               const std::string& path);

/// Writes arbitrary text (summaries); same IoError contract.
void write_text(const std::string& text, const std::string& path);

}  // namespace avgdiff
