#include "lexer.hpp"

#include <array>
#include <cstdlib>

#include "facet/parser.hpp"

namespace facet::detail {

namespace {

// Longest first. `>` is never glued here; the parser joins `>>`, `>=` etc.
// so that nested type arguments close correctly.
constexpr std::array<std::string_view, 45> kPunctuators{
    "...", "===", "!==", "**=", "<<=", "&&=", "||=", "?\?=",
    "=>",  "==",  "!=",  "<=",  "&&",  "||",  "??",  "?.",
    "++",  "--",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=",
    "|=",  "^=",  "**",  "<<",  "{",   "}",   "(",   ")",
    "[",   "]",   ";",   ",",   "<",   ">",   "+",   "-",
    "*",   "/",   "%",   "&",   "|",
};
constexpr std::string_view kSingles = "^!~?:=.@";

std::string trim_comment(std::string_view text, bool line) {
  std::string out;
  if (line) {
    out = std::string(text);
  } else {
    // Strip leading `*` decoration of block / JSDoc comments.
    std::size_t i = 0;
    bool line_start = true;
    while (i < text.size()) {
      char c = text[i];
      if (line_start && (c == ' ' || c == '\t')) { ++i; continue; }
      if (line_start && c == '*') { ++i; line_start = false; continue; }
      line_start = false;
      if (c == '\n') { out.push_back(' '); line_start = true; ++i; continue; }
      out.push_back(c);
      ++i;
    }
  }
  std::size_t b = out.find_first_not_of(" \t\r\n*");
  if (b == std::string::npos) return {};
  std::size_t e = out.find_last_not_of(" \t\r\n*");
  std::string trimmed = out.substr(b, e - b + 1);
  std::string collapsed;
  bool space = false;
  for (char c : trimmed) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed.push_back(' ');
    space = false;
    collapsed.push_back(c);
  }
  return collapsed;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

bool is_identifier_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_identifier_part(unsigned char c) {
  return is_identifier_start(c) || (c >= '0' && c <= '9');
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

void Lexer::fail(const std::string& message, std::size_t offset) const {
  throw SyntaxError(message, position_of(src_, offset));
}

void Lexer::record_comment(std::size_t start, std::size_t end, bool line) {
  if (!seen_comments_.insert(start).second) return;
  std::string_view body = line ? src_.substr(start + 2, end - start - 2)
                               : src_.substr(start + 2, end - start - 4);
  comments_.push_back({{start, end}, trim_comment(body, line), line});
}

bool Lexer::skip_trivia() {
  bool newline = false;
  while (pos_ < src_.size()) {
    char c = src_[pos_];
    if (c == '\n') {
      newline = true;
      ++pos_;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++pos_;
    } else if (static_cast<unsigned char>(c) == 0xEF && peek(1) == '\xBB' && peek(2) == '\xBF') {
      pos_ += 3;  // BOM
    } else if (c == '/' && peek(1) == '/') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      record_comment(start, pos_, true);
    } else if (c == '/' && peek(1) == '*') {
      std::size_t start = pos_;
      std::size_t close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) fail("unterminated comment", start);
      for (std::size_t i = pos_; i < close; ++i) {
        if (src_[i] == '\n') newline = true;
      }
      pos_ = close + 2;
      record_comment(start, pos_, false);
    } else if (c == '#' && pos_ == 0 && peek(1) == '!') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
  return newline;
}

Token Lexer::next() {
  Token tok;
  tok.newline_before = skip_trivia();
  tok.start = pos_;
  if (pos_ >= src_.size()) {
    tok.type = Tok::Eof;
    tok.end = pos_;
    return tok;
  }
  const auto c = static_cast<unsigned char>(src_[pos_]);
  if (is_identifier_start(c) || (c == '\\' && peek(1) == 'u')) {
    while (pos_ < src_.size()) {
      const auto d = static_cast<unsigned char>(src_[pos_]);
      if (is_identifier_part(d)) {
        tok.value.push_back(static_cast<char>(d));
        ++pos_;
      } else if (d == '\\' && peek(1) == 'u') {
        ++pos_;
        tok.value += read_escape();
      } else {
        break;
      }
    }
    tok.type = Tok::Identifier;
    tok.end = pos_;
    return tok;
  }
  if (c == '#' && pos_ + 1 < src_.size() &&
      is_identifier_start(static_cast<unsigned char>(src_[pos_ + 1]))) {
    ++pos_;
    while (pos_ < src_.size() && is_identifier_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok.type = Tok::PrivateName;
    tok.value = std::string(src_.substr(tok.start, pos_ - tok.start));
    tok.end = pos_;
    return tok;
  }
  if ((c >= '0' && c <= '9') || (c == '.' && peek(1) >= '0' && peek(1) <= '9')) {
    Token t = scan_number(pos_);
    t.newline_before = tok.newline_before;
    return t;
  }
  if (c == '"' || c == '\'') {
    Token t = scan_string(pos_);
    t.newline_before = tok.newline_before;
    return t;
  }
  if (c == '`') {
    ++pos_;
    tok.type = Tok::Template;
    tok.value = "`";
    tok.end = pos_;
    return tok;
  }
  for (std::string_view p : kPunctuators) {
    if (src_.substr(pos_, p.size()) == p) {
      // `?.5` is a conditional followed by a number.
      if (p == "?." && peek(2) >= '0' && peek(2) <= '9') continue;
      pos_ += p.size();
      tok.type = Tok::Punct;
      tok.value = std::string(p);
      tok.end = pos_;
      return tok;
    }
  }
  if (kSingles.find(static_cast<char>(c)) != std::string_view::npos) {
    ++pos_;
    tok.type = Tok::Punct;
    tok.value = std::string(1, static_cast<char>(c));
    tok.end = pos_;
    return tok;
  }
  fail(std::string("unexpected character '") + static_cast<char>(c) + "'", pos_);
}

Token Lexer::scan_number(std::size_t start) {
  Token tok;
  tok.type = Tok::Number;
  tok.start = start;
  pos_ = start;
  std::string digits;
  auto take_digits = [&](auto pred) {
    while (pos_ < src_.size() && (pred(src_[pos_]) || src_[pos_] == '_')) {
      if (src_[pos_] != '_') digits.push_back(src_[pos_]);
      ++pos_;
    }
  };
  auto is_dec = [](char ch) { return ch >= '0' && ch <= '9'; };
  if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B' ||
                        peek(1) == 'o' || peek(1) == 'O')) {
    char radix_char = static_cast<char>(peek(1) | 0x20);
    int radix = radix_char == 'x' ? 16 : radix_char == 'b' ? 2 : 8;
    pos_ += 2;
    take_digits([](char ch) { return hex_value(ch) >= 0; });
    tok.number = static_cast<double>(std::strtoull(digits.c_str(), nullptr, radix));
    tok.is_integer = true;
  } else {
    bool integer = true;
    take_digits(is_dec);
    if (peek() == '.') {
      integer = false;
      digits.push_back('.');
      ++pos_;
      take_digits(is_dec);
    }
    if (peek() == 'e' || peek() == 'E') {
      integer = false;
      digits.push_back('e');
      ++pos_;
      if (peek() == '+' || peek() == '-') {
        digits.push_back(peek());
        ++pos_;
      }
      take_digits(is_dec);
    }
    tok.number = std::strtod(digits.c_str(), nullptr);
    tok.is_integer = integer;
  }
  if (peek() == 'n') ++pos_;  // bigint
  if (pos_ < src_.size() && is_identifier_start(static_cast<unsigned char>(src_[pos_]))) {
    fail("identifier directly after number", pos_);
  }
  tok.end = pos_;
  tok.value = std::string(src_.substr(start, pos_ - start));
  return tok;
}

std::string Lexer::read_escape() {
  // pos_ is just past the backslash.
  std::string out;
  char c = peek();
  ++pos_;
  switch (c) {
    case 'n': return "\n";
    case 't': return "\t";
    case 'r': return "\r";
    case 'b': return "\b";
    case 'f': return "\f";
    case 'v': return "\v";
    case '0':
      if (!(peek() >= '0' && peek() <= '9')) return std::string(1, '\0');
      return "0";
    case '\r':
      if (peek() == '\n') ++pos_;
      return {};
    case '\n': return {};
    case 'x': {
      int hi = hex_value(peek());
      int lo = hex_value(peek(1));
      if (hi < 0 || lo < 0) fail("invalid hex escape", pos_);
      pos_ += 2;
      append_utf8(out, static_cast<unsigned long>(hi * 16 + lo));
      return out;
    }
    case 'u': {
      auto read_unit = [&]() -> unsigned long {
        unsigned long cp = 0;
        if (peek() == '{') {
          ++pos_;
          while (peek() != '}') {
            int h = hex_value(peek());
            if (h < 0) fail("invalid unicode escape", pos_);
            cp = cp * 16 + static_cast<unsigned long>(h);
            ++pos_;
          }
          ++pos_;
          return cp;
        }
        for (int i = 0; i < 4; ++i) {
          int h = hex_value(peek());
          if (h < 0) fail("invalid unicode escape", pos_);
          cp = cp * 16 + static_cast<unsigned long>(h);
          ++pos_;
        }
        return cp;
      };
      unsigned long cp = read_unit();
      if (cp >= 0xD800 && cp <= 0xDBFF && peek() == '\\' && peek(1) == 'u') {
        std::size_t save = pos_;
        pos_ += 2;
        unsigned long lo = read_unit();
        if (lo >= 0xDC00 && lo <= 0xDFFF) {
          cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
        } else {
          pos_ = save;
        }
      }
      append_utf8(out, cp);
      return out;
    }
    default:
      return std::string(1, c);
  }
}

Token Lexer::scan_string(std::size_t start) {
  Token tok;
  tok.type = Tok::String;
  tok.start = start;
  pos_ = start;
  const char quote = src_[pos_++];
  while (true) {
    if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string literal", start);
    char c = src_[pos_];
    if (c == quote) {
      ++pos_;
      break;
    }
    if (c == '\\') {
      ++pos_;
      tok.value += read_escape();
      continue;
    }
    tok.value.push_back(c);
    ++pos_;
  }
  tok.end = pos_;
  return tok;
}

TemplateChunk Lexer::scan_template_chunk() {
  TemplateChunk chunk;
  const std::size_t start = pos_;
  while (true) {
    if (pos_ >= src_.size()) fail("unterminated template literal", start);
    char c = src_[pos_];
    if (c == '`') {
      ++pos_;
      chunk.tail = true;
      break;
    }
    if (c == '$' && peek(1) == '{') {
      pos_ += 2;
      break;
    }
    if (c == '\\') {
      ++pos_;
      chunk.cooked += read_escape();
      continue;
    }
    if (c == '\r') {  // normalized line endings
      ++pos_;
      if (peek() == '\n') ++pos_;
      chunk.cooked.push_back('\n');
      continue;
    }
    chunk.cooked.push_back(c);
    ++pos_;
  }
  chunk.end = pos_;
  return chunk;
}

Token Lexer::scan_regex(std::size_t start) {
  Token tok;
  tok.type = Tok::String;
  tok.start = start;
  pos_ = start + 1;
  bool in_class = false;
  while (true) {
    if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated regular expression", start);
    char c = src_[pos_];
    if (c == '\\') {
      pos_ += 2;
      continue;
    }
    if (c == '[') in_class = true;
    if (c == ']') in_class = false;
    ++pos_;
    if (c == '/' && !in_class) break;
  }
  while (pos_ < src_.size() && is_identifier_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  tok.end = pos_;
  tok.value = std::string(src_.substr(start, pos_ - start));
  return tok;
}

Token Lexer::scan_jsx_text() {
  Token tok;
  tok.type = Tok::String;
  tok.start = pos_;
  while (pos_ < src_.size() && src_[pos_] != '{' && src_[pos_] != '<') ++pos_;
  tok.end = pos_;
  tok.value = std::string(src_.substr(tok.start, pos_ - tok.start));
  return tok;
}

Token Lexer::scan_jsx_identifier(std::size_t start) {
  Token tok;
  tok.type = Tok::Identifier;
  tok.start = start;
  pos_ = start;
  while (pos_ < src_.size() &&
         (is_identifier_part(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-')) {
    ++pos_;
  }
  tok.end = pos_;
  tok.value = std::string(src_.substr(start, pos_ - start));
  return tok;
}

Token Lexer::scan_jsx_string(std::size_t start) {
  Token tok;
  tok.type = Tok::String;
  tok.start = start;
  const char quote = src_[start];
  std::size_t close = src_.find(quote, start + 1);
  if (close == std::string_view::npos) fail("unterminated JSX attribute string", start);
  tok.value = std::string(src_.substr(start + 1, close - start - 1));
  pos_ = close + 1;
  tok.end = pos_;
  return tok;
}

}  // namespace facet::detail
