#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ensemble {

/// Delimiter-separated text with a required header row. The delimiter is a
/// tab when the header contains one, otherwise a comma. Fields are trimmed;
/// blank lines and lines starting with '#' are skipped. Quoting is not
/// supported, so fields cannot contain the delimiter.
class DelimitedTable {
 public:
  struct Row {
    std::size_t line = 0;  ///< 1-based source line
    std::vector<std::string> fields;
  };

  static DelimitedTable read(const std::filesystem::path& path);
  static DelimitedTable parse(const std::string& text, const std::string& source);

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  std::optional<std::size_t> find_column(const std::string& name) const;
  /// Throws ParseError naming the missing column.
  std::size_t column(const std::string& name) const;

  /// "source:line: message"
  std::string where(const Row& row) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Parses a signed decimal integer; nullopt on any trailing garbage.
std::optional<long long> parse_int(const std::string& s);
/// Parses a finite decimal or hex double; nullopt otherwise.
std::optional<double> parse_real(const std::string& s);

}  // namespace ensemble
