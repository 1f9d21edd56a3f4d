#include <array>
#include <cctype>
#include <cstdlib>
#include <unordered_set>

#include "scim/token.hpp"

namespace scim {

std::string format(const Diagnostic& d) {
  return std::to_string(d.loc.line) + ":" + std::to_string(d.loc.column) +
         ": " + d.code + ": " + d.message;
}

namespace {

const std::unordered_set<std::string>& keyword_table() {
  static const std::unordered_set<std::string> kws = {
      "schema",     "context",    "s-construction", "inherits",
      "roles",      "constraints", "places",        "relations",
      "operations", "constructional", "constituents",
      "OUT",        "self",       "not",            "and",
      "or",         "nand",       "enum",           "confidence"};
  return kws;
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;
  LexResult out;

  explicit Lexer(const std::string& s) : src(s) {}

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  void advance() {
    if (pos < src.size()) {
      if (src[pos] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
      pos++;
    }
  }
  SourceLoc here() const { return {line, col}; }

  void push(TokenKind kind, std::string text, SourceLoc loc) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.loc = loc;
    out.tokens.push_back(std::move(t));
  }

  void error(const std::string& code, const std::string& msg, SourceLoc loc) {
    out.diagnostics.push_back({code, msg, loc});
    Token t;
    t.kind = TokenKind::Error;
    t.loc = loc;
    out.tokens.push_back(std::move(t));
  }

  void skip_ws_and_comments() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else {
        return;
      }
    }
  }

  void lex_string() {
    SourceLoc loc = here();
    advance();  // opening quote
    std::string val;
    for (;;) {
      char c = peek();
      if (c == '\0' || c == '\n') {
        error("UnterminatedLiteral", "string literal is not terminated", loc);
        return;
      }
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case 'n': val += '\n'; break;
          case 't': val += '\t'; break;
          case '"': val += '"'; break;
          case '\\': val += '\\'; break;
          default: val += e; break;
        }
        advance();
      } else {
        val += c;
        advance();
      }
    }
    Token t;
    t.kind = TokenKind::Literal;
    t.lit = Token::Lit::String;
    t.str_val = val;
    t.text = "\"" + val + "\"";
    t.loc = loc;
    out.tokens.push_back(std::move(t));
  }

  void lex_number() {
    SourceLoc loc = here();
    std::string text;
    if (peek() == '-') {
      text += '-';
      advance();
    }
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      text += peek();
      advance();
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      text += '.';
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        text += peek();
        advance();
      }
    }
    Token t;
    t.kind = TokenKind::Literal;
    t.text = text;
    t.loc = loc;
    if (is_float) {
      t.lit = Token::Lit::Float;
      t.float_val = std::strtod(text.c_str(), nullptr);
    } else {
      t.lit = Token::Lit::Int;
      t.int_val = std::strtoll(text.c_str(), nullptr, 10);
    }
    out.tokens.push_back(std::move(t));
  }

  void lex_ident() {
    SourceLoc loc = here();
    std::string text;
    text += peek();
    advance();
    while (ident_cont(peek())) {
      text += peek();
      advance();
    }
    if (text == "true" || text == "false") {
      Token t;
      t.kind = TokenKind::Literal;
      t.lit = Token::Lit::Bool;
      t.bool_val = (text == "true");
      t.text = text;
      t.loc = loc;
      out.tokens.push_back(std::move(t));
      return;
    }
    TokenKind k = is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier;
    push(k, std::move(text), loc);
  }

  void run() {
    for (;;) {
      skip_ws_and_comments();
      char c = peek();
      if (c == '\0') break;
      SourceLoc loc = here();
      if (c == '"') {
        lex_string();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lex_number();
        continue;
      }
      if (ident_start(c)) {
        lex_ident();
        continue;
      }
      // multi-character symbols, longest match first
      static const std::array<const char*, 3> three = {"<->", "|->", "/IO"};
      static const std::array<const char*, 3> two = {"<-", "/I", "/O"};
      bool matched = false;
      for (const char* s : three) {
        if (src.compare(pos, 3, s) == 0) {
          push(TokenKind::Symbol, s, loc);
          advance(); advance(); advance();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      for (const char* s : two) {
        if (src.compare(pos, 2, s) == 0) {
          push(TokenKind::Symbol, s, loc);
          advance(); advance();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      switch (c) {
        case '(': case ')': case '{': case '}': case ',': case ':':
        case '=': case '?': case '@': case '*': case '.':
          push(TokenKind::Symbol, std::string(1, c), loc);
          advance();
          break;
        default:
          error("IllegalCharacter",
                std::string("unexpected character '") + c + "'", loc);
          advance();
          break;
      }
    }
    Token end;
    end.kind = TokenKind::End;
    end.loc = here();
    out.tokens.push_back(std::move(end));
  }
};

}  // namespace

bool is_keyword(const std::string& text) {
  return keyword_table().count(text) > 0;
}

LexResult tokenize(const std::string& source) {
  Lexer lx(source);
  lx.run();
  return std::move(lx.out);
}

}  // namespace scim
