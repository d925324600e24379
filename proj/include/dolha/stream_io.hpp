#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dolha/types.hpp"

namespace dolha {

// Edge-stream text format: `src dst t w` per line, fields separated by any
// run of spaces or tabs. Lines starting with `#` (after leading blanks) and
// blank lines are skipped. Timestamp ordering is checked by the stores.

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses one record. Returns nullopt for blank and comment lines.
inline std::optional<StreamEdge> parse_stream_record(std::string_view line,
                                                     std::size_t line_no = 1) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = detail::split_fields(line);
  if (fields.empty() || fields.front().front() == '#') return std::nullopt;
  if (fields.size() != 4)
    throw ParseError(line_no, "expected 4 fields `src dst t w`, got " +
                                  std::to_string(fields.size()));
  StreamEdge e;
  e.key.src = std::string(fields[0]);
  e.key.dst = std::string(fields[1]);
  if (!detail::parse_number(fields[2], e.t))
    throw ParseError(line_no, "bad timestamp `" + std::string(fields[2]) + "`");
  if (!detail::parse_number(fields[3], e.w))
    throw ParseError(line_no, "bad weight `" + std::string(fields[3]) + "`");
  return e;
}

/// A parsed record plus the source line it came from, for error reporting.
struct NumberedEdge {
  StreamEdge edge;
  std::size_t line = 0;
};

inline std::vector<NumberedEdge> read_stream(std::istream& in) {
  std::vector<NumberedEdge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto e = parse_stream_record(line, line_no))
      out.push_back({std::move(*e), line_no});
  }
  return out;
}

inline std::vector<NumberedEdge> read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open stream file " + path);
  return read_stream(in);
}

inline void write_stream_record(std::ostream& os, const StreamEdge& e) {
  os << e.key.src << ' ' << e.key.dst << ' ' << e.t << ' ' << e.w << '\n';
}

}  // namespace dolha
