#include "text.hpp"

#include <cctype>
#include <cstdio>

namespace gifpo::text {

std::vector<Line> tokenize(std::string_view source) {
  std::vector<Line> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= source.size()) {
    size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view raw = source.substr(pos, end - pos);
    ++number;
    Line line{number, {}};
    size_t i = 0;
    while (i < raw.size()) {
      unsigned char c = static_cast<unsigned char>(raw[i]);
      if (c == '#') break;
      if (std::isspace(c)) {
        ++i;
        continue;
      }
      Token tok;
      tok.column = static_cast<int>(i) + 1;
      bool quoted = false;
      while (i < raw.size()) {
        char ch = raw[i];
        if (ch == '"') quoted = !quoted;
        if (!quoted && (std::isspace(static_cast<unsigned char>(ch)) || ch == '#')) break;
        tok.text.push_back(ch);
        ++i;
      }
      line.tokens.push_back(std::move(tok));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == source.size()) break;
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string> split_lines(std::string_view source) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < source.size()) {
    size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view l = source.substr(pos, end - pos);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out.emplace_back(l);
    pos = end + 1;
  }
  return out;
}

bool parse_hex(std::string_view s, unsigned long long& out, bool allow_bare) {
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
  } else if (!allow_bare) {
    return false;
  }
  if (s.empty() || s.size() > 16) return false;
  unsigned long long v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return false;
    v = (v << 4) | static_cast<unsigned>(d);
  }
  out = v;
  return true;
}

std::string to_hex(unsigned long long v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llx", v);
  return buf;
}

}  // namespace gifpo::text
