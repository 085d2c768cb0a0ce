#include "ensemble/table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ensemble/error.hpp"

namespace ensemble {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

DelimitedTable DelimitedTable::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

DelimitedTable DelimitedTable::parse(const std::string& text, const std::string& source) {
  DelimitedTable t;
  t.source_ = source;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  char delim = ',';
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!have_header) {
      delim = line.find('\t') != std::string::npos ? '\t' : ',';
      t.header_ = split(line, delim);
      have_header = true;
      continue;
    }
    Row row{lineno, split(line, delim)};
    if (row.fields.size() != t.header_.size()) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header_.size()) + " fields, found " +
                       std::to_string(row.fields.size()));
    }
    t.rows_.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source + ": missing header row");
  return t;
}

std::optional<std::size_t> DelimitedTable::find_column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t DelimitedTable::column(const std::string& name) const {
  if (auto c = find_column(name)) return *c;
  throw ParseError(source_ + ": header lacks required column '" + name + "'");
}

std::string DelimitedTable::where(const Row& row) const {
  return source_ + ":" + std::to_string(row.line);
}

std::optional<long long> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || *end != '\0') return std::nullopt;
  return v;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (*end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace ensemble
