#include "odscale/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "odscale/error.hpp"

namespace odscale::csv {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, std::size_t column,
                              const std::string& message) {
  throw Error(ErrorCode::ParseError,
              source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message);
}

// Splits one logical line. Quoted fields may not span lines.
std::vector<Cell> split_line(std::string_view line, const std::string& source, std::size_t line_no) {
  std::vector<Cell> cells;
  std::size_t pos = 0;
  while (true) {
    Cell cell;
    cell.column = pos + 1;
    if (pos < line.size() && line[pos] == '"') {
      ++pos;
      bool closed = false;
      while (pos < line.size()) {
        if (line[pos] == '"') {
          if (pos + 1 < line.size() && line[pos + 1] == '"') {
            cell.text.push_back('"');
            pos += 2;
            continue;
          }
          closed = true;
          ++pos;
          break;
        }
        cell.text.push_back(line[pos++]);
      }
      if (!closed) parse_error(source, line_no, cell.column, "unterminated quoted field");
      if (pos < line.size() && line[pos] != ',') parse_error(source, line_no, pos + 1, "expected ',' after quoted field");
    } else {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      cell.text.assign(line.substr(pos, end - pos));
      if (cell.text.find('"') != std::string::npos) {
        parse_error(source, line_no, cell.column, "stray quote in unquoted field");
      }
      pos = end;
    }
    cells.push_back(std::move(cell));
    if (pos >= line.size()) break;
    ++pos;  // skip ','
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Table Table::read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), file.string());
}

Table Table::parse(std::string_view text, std::string source) {
  Table table;
  table.source_ = std::move(source);
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::size_t line_no = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) {
      auto cells = split_line(line, table.source_, line_no);
      if (!have_header) {
        for (const auto& c : cells) {
          std::string name(trim(c.text));
          if (name.empty()) parse_error(table.source_, line_no, c.column, "empty column name");
          if (std::find(table.header_.begin(), table.header_.end(), name) != table.header_.end()) {
            parse_error(table.source_, line_no, c.column, "duplicate column '" + name + "'");
          }
          table.header_.push_back(std::move(name));
        }
        have_header = true;
      } else {
        if (cells.size() != table.header_.size()) {
          parse_error(table.source_, line_no, 1,
                      "expected " + std::to_string(table.header_.size()) + " fields, found " +
                          std::to_string(cells.size()));
        }
        table.rows_.push_back({line_no, std::move(cells)});
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!have_header) parse_error(table.source_, 1, 1, "missing header row");
  return table;
}

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header_.begin());
}

void Table::require_columns(std::initializer_list<std::string_view> required,
                            std::initializer_list<std::string_view> optional) const {
  for (auto name : required) {
    if (!column_index(name)) {
      throw Error(ErrorCode::SchemaError, source_ + ": missing required column '" + std::string(name) + "'");
    }
  }
  for (const auto& name : header_) {
    const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                       std::find(optional.begin(), optional.end(), name) != optional.end();
    if (!known) throw Error(ErrorCode::SchemaError, source_ + ": unexpected column '" + name + "'");
  }
}

const Cell& Table::cell(const Row& row, std::string_view column) const {
  auto index = column_index(column);
  if (!index) throw Error(ErrorCode::SchemaError, source_ + ": missing column '" + std::string(column) + "'");
  return row.cells[*index];
}

std::string Table::where(const Row& row, std::string_view column) const {
  return source_ + ":" + std::to_string(row.line) + ":" + std::to_string(cell(row, column).column);
}

std::string Table::text(const Row& row, std::string_view column) const {
  return std::string(trim(cell(row, column).text));
}

double Table::number(const Row& row, std::string_view column) const {
  const auto& c = cell(row, column);
  const auto s = trim(c.text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    parse_error(source_, row.line, c.column, "'" + std::string(column) + "' is not a number: '" + c.text + "'");
  }
  return value;
}

long long Table::integer(const Row& row, std::string_view column) const {
  const auto& c = cell(row, column);
  const auto s = trim(c.text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    parse_error(source_, row.line, c.column, "'" + std::string(column) + "' is not an integer: '" + c.text + "'");
  }
  return value;
}

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out << ',';
    out << escape(f);
    first = false;
  }
  out << '\n';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace odscale::csv
