#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mltrust {

// Version stamped on every file this library emits.
inline constexpr int kSchemaVersion = 1;

// A parsed CSV file. A leading "#schema_version=N" line is optional; when
// present N must equal kSchemaVersion.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Index of a header column; throws MissingColumn.
  std::size_t column(std::string_view name, std::string_view source) const;
};

// RFC 4180 quoting, CRLF tolerant, blank lines skipped. Rows whose field
// count differs from the header raise MalformedRow.
CsvTable read_csv(std::istream& in, std::string_view source);

void write_schema_preamble(std::ostream& out);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
// Fixed significant-digit form, e.g. for edge tables.
std::string format_double(double value, int significant_digits);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace mltrust
