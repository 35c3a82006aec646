#pragma once

// Small text helpers shared by the table and dataset readers.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chf/errors.hpp"

namespace chf::text {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Splits on whitespace and, optionally, commas.
inline std::vector<std::string_view> split(std::string_view s, bool commas = false) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto sep = [&](char c) { return is_space(c) || (commas && c == ','); };
  while (i < s.size()) {
    while (i < s.size() && sep(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !sep(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Parses a whole token as a double; accepts "nan". Returns nullopt on junk.
inline std::optional<double> to_double(std::string_view token) {
  if (token == "nan" || token == "NaN" || token == "NAN") return std::nan("");
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline std::optional<long long> to_integer(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Line iterator yielding (1-based line number, trimmed content), skipping
/// blank lines and '#' comments.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  long line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') fn(line_no, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace chf::text
