#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace svasym {

/// In-memory RFC 4180 table: header row, CRLF line endings, quoting on demand.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Full-precision numeric cell.
std::string csv_number(double v);
std::string csv_escape(std::string_view cell);

/// Strict RFC 4180 reader; throws ParseError on malformed quoting.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace svasym
