#pragma once

#include <vector>

#include "scim/ast.hpp"
#include "scim/token.hpp"

namespace scim {

struct ParseResult {
  std::vector<Definition> definitions;
  std::vector<Diagnostic> diagnostics;
};

// Parses a token stream into top-level definitions. Parsing is total: on
// error a diagnostic is recorded and parsing resumes at the next
// top-level declaration keyword.
ParseResult parse_program(const std::vector<Token>& tokens);

// tokenize + parse in one step; lexer diagnostics are merged in.
ParseResult parse_source(const std::string& source);

}  // namespace scim
