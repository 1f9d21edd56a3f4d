#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scim {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

// A located, coded problem report from the frontend (lexer, parser,
// validator). Frontends collect these instead of throwing.
struct Diagnostic {
  std::string code;  // "SyntaxError", "UnknownType", ...
  std::string message;
  SourceLoc loc;
};

std::string format(const Diagnostic& d);

// Contract violation in the runtime layers (working memory, constraint
// engine, production engine). The code matches the error names of the
// operation contracts ("TypeMismatch", "PlaceKindMismatch", ...).
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace scim
