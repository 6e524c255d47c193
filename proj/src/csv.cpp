#include "svasym/csv.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "svasym/errors.hpp"

namespace svasym {

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw Error(fmt::format("csv row has {} cells, header has {}", cells.size(), header_.size()));
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::save(const std::filesystem::path& path) const { write_text_file(path, str()); }

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  std::size_t line = 1;
  std::size_t i = 0;
  bool quoted = false;
  bool was_quoted = false;
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\r')
          throw ParseError(line, "characters after closing quote");
        continue;
      }
      if (c == '\n') ++line;
      cell += c;
      ++i;
      continue;
    }
    if (c == '"') {
      if (!cell.empty() || was_quoted) throw ParseError(line, "quote inside unquoted field");
      quoted = true;
      was_quoted = true;
      ++i;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      was_quoted = false;
      ++i;
    } else if (c == '\r') {
      if (i + 1 >= text.size() || text[i + 1] != '\n') throw ParseError(line, "bare CR");
      row.push_back(std::move(cell));
      cell.clear();
      was_quoted = false;
      rows.push_back(std::move(row));
      row.clear();
      i += 2;
      ++line;
    } else if (c == '\n') {
      throw ParseError(line, "bare LF line ending");
    } else {
      cell += c;
      ++i;
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (!cell.empty() || !row.empty() || was_quoted) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error(fmt::format("write to '{}' failed", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace svasym
