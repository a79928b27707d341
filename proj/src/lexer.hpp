#pragma once

// Context-free token scanner. The parser drives rescans for JSX text, template
// chunks and regular expressions, so the lexer never guesses context.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>

#include "facet/ast.hpp"
#include "facet/errors.hpp"

namespace facet::detail {

enum class Tok {
  Eof,
  Identifier,
  PrivateName,
  Number,
  String,
  Template,  // opening backtick; chunks are read with scan_template_chunk
  Punct,
};

struct Token {
  Tok type = Tok::Eof;
  std::string value;  // identifier name, decoded string, punctuator, number spelling
  std::size_t start = 0;
  std::size_t end = 0;
  bool newline_before = false;
  double number = 0.0;
  bool is_integer = false;
};

struct TemplateChunk {
  std::string cooked;
  bool tail = false;  // ended at the closing backtick (else at "${")
  std::size_t end = 0;
};

class Lexer {
 public:
  Lexer(std::string_view source, std::vector<ast::Comment>& comments)
      : src_(source), comments_(comments) {}

  Token next();
  std::size_t pos() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  std::string_view source() const { return src_; }

  TemplateChunk scan_template_chunk();
  /// Re-reads a regex literal starting at the `/` at `start`.
  Token scan_regex(std::size_t start);
  /// JSX text from the current position up to `{` or `<`.
  Token scan_jsx_text();
  /// Extends an identifier token with `-` segments (`aria-label`).
  Token scan_jsx_identifier(std::size_t start);
  /// JSX attribute strings have no escape sequences.
  Token scan_jsx_string(std::size_t start);

  [[noreturn]] void fail(const std::string& message, std::size_t offset) const;

 private:
  bool skip_trivia();
  void record_comment(std::size_t start, std::size_t end, bool line);
  Token scan_number(std::size_t start);
  Token scan_string(std::size_t start);
  std::string read_escape();
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<ast::Comment>& comments_;
  std::set<std::size_t> seen_comments_;
};

bool is_identifier_start(unsigned char c);
bool is_identifier_part(unsigned char c);
void append_utf8(std::string& out, unsigned long cp);

}  // namespace facet::detail
