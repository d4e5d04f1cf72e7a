#include "mltrust/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

constexpr std::string_view kPreamble = "#schema_version=";

// Splits one logical record. Returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                 std::string_view source) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  const std::size_t start_line = line;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // tolerated before '\n'
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field += c;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedRow, std::string(source) + ":" +
                                              std::to_string(start_line) +
                                              ": unterminated quoted field");
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line;
  return true;
}

bool is_blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

std::size_t CsvTable::column(std::string_view name, std::string_view source) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kMissingColumn,
              std::string(source) + ": missing column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in, std::string_view source) {
  CsvTable table;
  std::vector<std::string> fields;
  std::size_t line = 1;
  bool have_header = false;
  while (true) {
    const std::size_t record_line = line;
    if (!next_record(in, fields, line, source)) break;
    if (is_blank(fields)) continue;
    if (!have_header) {
      if (record_line == 1 && fields.size() == 1 && fields[0].starts_with(kPreamble)) {
        auto version = parse_integer(std::string_view(fields[0]).substr(kPreamble.size()));
        if (!version || *version != kSchemaVersion) {
          throw Error(ErrorCode::kSchemaVersion,
                      std::string(source) + ": unsupported " + fields[0]);
        }
        continue;
      }
      for (auto& f : fields) f = std::string(trim(f));
      table.header = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  std::string(source) + ":" + std::to_string(record_line) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
    table.line_numbers.push_back(record_line);
  }
  if (!have_header) {
    throw Error(ErrorCode::kMissingColumn, std::string(source) + ": header row required");
  }
  return table;
}

void write_schema_preamble(std::ostream& out) {
  out << kPreamble << kSchemaVersion << '\n';
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_double(double value, int significant_digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*g", significant_digits, value);
  return buf.data();
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace mltrust
