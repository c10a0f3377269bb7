#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "candy/error.hpp"

namespace candy::tsv {

// Field escaping: backslash, tab, newline and carriage return become
// \\, \t, \n and \r. Unknown escape sequences are kept verbatim on read.
inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      switch (s[i + 1]) {
        case '\\': out.push_back('\\'); ++i; continue;
        case 't': out.push_back('\t'); ++i; continue;
        case 'n': out.push_back('\n'); ++i; continue;
        case 'r': out.push_back('\r'); ++i; continue;
        default: break;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

template <typename Int>
std::optional<Int> parse_uint(std::string_view s) {
  Int value{};
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Row-oriented reader that checks the header and tracks line numbers for
// error messages. Blank lines are skipped; a trailing '\r' is stripped.
class Reader {
public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  // Reads the header row; it must match `expected` column for column, or
  // `alternative` when given.
  std::size_t expect_header(const std::vector<std::string_view>& expected,
                            const std::vector<std::string_view>& alternative = {}) {
    if (!next_line()) throw DataError(name_, 1, "missing header row");
    const auto fields = split(line_);
    if (fields == expected) return expected.size();
    if (!alternative.empty() && fields == alternative) return alternative.size();
    std::string want;
    for (auto f : expected) want += (want.empty() ? "" : "<TAB>") + std::string(f);
    throw DataError(name_, line_no_, "unexpected header, expected " + want);
  }

  // Next data row with exactly `columns` fields; nullopt at end of input.
  std::optional<std::vector<std::string_view>> row(std::size_t columns) {
    while (next_line()) {
      if (line_.empty()) continue;
      auto fields = split(line_);
      if (fields.size() != columns)
        fail("expected " + std::to_string(columns) + " columns, found " +
             std::to_string(fields.size()));
      return fields;
    }
    return std::nullopt;
  }

  [[noreturn]] void fail(const std::string& what) const { throw DataError(name_, line_no_, what); }

  std::size_t line() const noexcept { return line_no_; }
  const std::string& name() const noexcept { return name_; }

private:
  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return true;
  }

  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t line_no_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace candy::tsv
