#pragma once

// Line tokenizer shared by the text readers.

#include <string>
#include <string_view>
#include <vector>

namespace gifpo::text {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

struct Line {
  int number = 0;  // 1-based
  std::vector<Token> tokens;
};

/// Splits on whitespace and drops `#` comments. Quoted strings ("...") are
/// kept intact inside a token, so `reason="a b"` is one token.
std::vector<Line> tokenize(std::string_view source);

std::vector<std::string> split_lines(std::string_view source);

/// Parses `0x<hex>` (or plain hex when `allow_bare`) into a 64-bit value.
bool parse_hex(std::string_view s, unsigned long long& out, bool allow_bare = false);

std::string to_hex(unsigned long long v);

}  // namespace gifpo::text
