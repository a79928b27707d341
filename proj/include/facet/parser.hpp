#pragma once

#include <string_view>

#include "facet/ast.hpp"
#include "facet/errors.hpp"

namespace facet {

struct ParseOptions {
  /// When false, `<T>expr` is a type assertion instead of JSX (plain .ts).
  bool jsx = true;
};

/// Parses a TSX/JSX/TS module. Throws SyntaxError with line/column.
ast::Ast parse_program(std::string_view source, ParseOptions options = {});

/// Options appropriate for a file name (`.ts` disables JSX).
ParseOptions options_for_filename(std::string_view filename);

SourcePosition position_of(std::string_view source, std::size_t offset);

}  // namespace facet
