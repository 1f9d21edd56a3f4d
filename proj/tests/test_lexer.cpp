#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "scim/token.hpp"

using namespace scim;

TEST_CASE("keywords and identifiers are told apart") {
  auto r = tokenize("schema context s-construction enum roles OUT mySchema enumX");
  REQUIRE(r.diagnostics.empty());
  REQUIRE(r.tokens.size() == 9);  // 8 words + End
  for (int i = 0; i < 6; ++i) CHECK(r.tokens[i].kind == TokenKind::Keyword);
  CHECK(r.tokens[6].kind == TokenKind::Identifier);
  CHECK(r.tokens[6].text == "mySchema");
  CHECK(r.tokens[7].kind == TokenKind::Identifier);  // prefix of a keyword
  CHECK(r.tokens.back().kind == TokenKind::End);
}

TEST_CASE("s-construction lexes as one keyword, not subtraction") {
  auto r = tokenize("s-construction Cx");
  CHECK(r.tokens[0].kind == TokenKind::Keyword);
  CHECK(r.tokens[0].text == "s-construction");
  CHECK(r.tokens[1].text == "Cx");
}

TEST_CASE("literals") {
  auto r = tokenize(R"(42 -7 3.5 -0.25 true false "hi\nthere" "")");
  REQUIRE(r.diagnostics.empty());
  CHECK(r.tokens[0].lit == Token::Lit::Int);
  CHECK(r.tokens[0].int_val == 42);
  CHECK(r.tokens[1].int_val == -7);
  CHECK(r.tokens[2].lit == Token::Lit::Float);
  CHECK(r.tokens[2].float_val == doctest::Approx(3.5));
  CHECK(r.tokens[3].float_val == doctest::Approx(-0.25));
  CHECK(r.tokens[4].lit == Token::Lit::Bool);
  CHECK(r.tokens[4].bool_val);
  CHECK_FALSE(r.tokens[5].bool_val);
  CHECK(r.tokens[6].lit == Token::Lit::String);
  CHECK(r.tokens[6].str_val == "hi\nthere");
  CHECK(r.tokens[7].str_val.empty());
}

TEST_CASE("multi-character symbols are maximal-munch") {
  auto r = tokenize("<- <-> |-> = ? @ . , ( ) : *");
  REQUIRE(r.diagnostics.empty());
  CHECK(r.tokens[0].text == "<-");
  CHECK(r.tokens[1].text == "<->");
  CHECK(r.tokens[2].text == "|->");
  for (size_t i = 0; i + 1 < r.tokens.size(); ++i)
    CHECK(r.tokens[i].kind == TokenKind::Symbol);
}

TEST_CASE("comments and whitespace are skipped, locations tracked") {
  auto r = tokenize("a // trailing\n  b");
  REQUIRE(r.tokens.size() == 3);
  CHECK(r.tokens[0].text == "a");
  CHECK(r.tokens[1].text == "b");
  CHECK(r.tokens[1].loc.line == 2);
  CHECK(r.tokens[1].loc.column == 3);
}

TEST_CASE("unknown characters produce an Error token and lexing continues") {
  auto r = tokenize("a $ b");
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.tokens[1].kind == TokenKind::Error);
  CHECK(r.tokens[2].text == "b");
}

TEST_CASE("empty input yields just the End token") {
  auto r = tokenize("");
  REQUIRE(r.tokens.size() == 1);
  CHECK(r.tokens[0].kind == TokenKind::End);
}
