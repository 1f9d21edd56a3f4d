#pragma once

#include <string>
#include <vector>

#include "scim/diagnostics.hpp"

namespace scim {

enum class TokenKind { Keyword, Identifier, Symbol, Literal, Error, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // source characters as written
  SourceLoc loc;

  enum class Lit { None, Int, Float, String, Bool };
  Lit lit = Lit::None;
  long long int_val = 0;
  double float_val = 0.0;
  bool bool_val = false;
  std::string str_val;  // decoded string literal
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<Diagnostic> diagnostics;
};

// Splits a program text into tokens. `//` comments and whitespace are
// skipped. Unknown characters produce an Error token plus a diagnostic;
// lexing continues after them.
LexResult tokenize(const std::string& source);

bool is_keyword(const std::string& text);

}  // namespace scim
