#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odscale::csv {

struct Cell {
  std::string text;
  std::size_t column = 0;  // 1-based character column of the field start
};

struct Row {
  std::size_t line = 0;  // 1-based
  std::vector<Cell> cells;
};

/// Header-first CSV file. Fields may be double-quoted with "" escapes;
/// blank lines are skipped and CRLF line ends accepted.
class Table {
public:
  /// Throws ParseError (file:line:column) on malformed input, IoError when
  /// the file cannot be opened.
  static Table read(const std::filesystem::path& file);
  static Table parse(std::string_view text, std::string source);

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  std::optional<std::size_t> column_index(std::string_view name) const;

  /// Checks that every required column is present and every other column is
  /// one of the optional ones. Throws SchemaError otherwise.
  void require_columns(std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional = {}) const;

  const Cell& cell(const Row& row, std::string_view column) const;
  std::string text(const Row& row, std::string_view column) const;
  double number(const Row& row, std::string_view column) const;
  long long integer(const Row& row, std::string_view column) const;

  /// "file:line:column" for error messages.
  std::string where(const Row& row, std::string_view column) const;

private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Shortest text that parses back to the same double.
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

/// Writes one CSV line (fields escaped, '\n' terminated).
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace odscale::csv
