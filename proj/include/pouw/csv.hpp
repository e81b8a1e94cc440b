#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pouw {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Shortest round-trip decimal form with '.' as separator, independent of
/// the global locale.
std::string csv_number(double v);
std::string csv_number(std::uint64_t v);
std::string csv_number(std::int64_t v);

/// RFC 4180 quoting: fields containing a comma, quote, CR or LF are quoted
/// and embedded quotes doubled. Rows end in '\n'.
std::string csv_escape(std::string_view field);
void write_csv(std::ostream& out, const CsvTable& table);
/// Writes the table, creating parent directories. Throws std::runtime_error
/// on I/O failure.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
/// Parses what write_csv produces. Throws Error(Malformed).
CsvTable read_csv(std::string_view text);

}  // namespace pouw
