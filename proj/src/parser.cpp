#include <map>

#include "scim/parser.hpp"

namespace scim {

namespace {

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  ParseResult out;

  explicit Parser(const std::vector<Token>& t) : toks(t) {}

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t off = 1) const {
    size_t i = pos + off;
    return i < toks.size() ? toks[i] : toks.back();
  }
  void next() {
    if (pos + 1 < toks.size()) pos++;
  }
  bool at_end() const { return cur().kind == TokenKind::End; }

  bool is_kw(const char* kw) const {
    return cur().kind == TokenKind::Keyword && cur().text == kw;
  }
  bool is_sym(const char* s) const {
    return cur().kind == TokenKind::Symbol && cur().text == s;
  }
  bool is_decl_kw() const {
    return is_kw("schema") || is_kw("context") || is_kw("s-construction") ||
           is_kw("enum");
  }
  bool is_block_kw() const {
    return cur().kind == TokenKind::Keyword &&
           (cur().text == "inherits" || cur().text == "roles" ||
            cur().text == "constraints" || cur().text == "places" ||
            cur().text == "relations" || cur().text == "operations" ||
            cur().text == "constructional" || cur().text == "constituents" ||
            cur().text == "confidence");
  }

  struct ParseError {};

  [[noreturn]] void fail(const std::string& expected) {
    std::string got = at_end() ? "end of input" : "'" + cur().text + "'";
    if (cur().kind == TokenKind::Error) got = "invalid token";
    out.diagnostics.push_back(
        {"SyntaxError", "expected " + expected + ", got " + got, cur().loc});
    throw ParseError{};
  }

  std::string expect_ident(const std::string& what) {
    if (cur().kind != TokenKind::Identifier) fail(what + " (identifier)");
    std::string name = cur().text;
    next();
    return name;
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("'") + s + "'");
    next();
  }

  // skip to the next top-level declaration keyword
  void recover() {
    while (!at_end() && !is_decl_kw()) next();
  }

  bool item_boundary() const {
    return at_end() || is_decl_kw() || is_block_kw() ||
           cur().kind == TokenKind::Error;
  }

  Atom parse_atom() {
    const Token& t = cur();
    if (t.kind == TokenKind::Literal) {
      Atom a;
      switch (t.lit) {
        case Token::Lit::Int: a = static_cast<long long>(t.int_val); break;
        case Token::Lit::Float: a = t.float_val; break;
        case Token::Lit::Bool: a = t.bool_val; break;
        case Token::Lit::String: a = t.str_val; break;
        default: fail("atomic value");
      }
      next();
      return a;
    }
    if (t.kind == TokenKind::Identifier) {
      Sym s{t.text};
      next();
      return Atom{s};
    }
    fail("atomic value");
  }

  RolePath parse_path() {
    RolePath p;
    if (is_sym("?")) {
      p.muted = true;
      next();
    }
    if (is_kw("self")) {
      p.self = true;
      next();
    } else {
      RolePath::Seg s;
      s.sep = RolePath::Sep::First;
      s.name = expect_ident("role path");
      p.segs.push_back(std::move(s));
    }
    while (is_sym("*") || is_sym(".")) {
      // a trailing ".name(" belongs to a context relation, not the path
      if (is_sym(".") && peek().kind == TokenKind::Identifier &&
          peek(2).kind == TokenKind::Symbol && peek(2).text == "(") {
        break;
      }
      RolePath::Seg s;
      s.sep = is_sym("*") ? RolePath::Sep::Star : RolePath::Sep::Dot;
      next();
      s.name = expect_ident("path segment");
      p.segs.push_back(std::move(s));
    }
    return p;
  }

  PlaceExpr parse_place_expr() {
    PlaceExpr pe;
    pe.loc = cur().loc;
    pe.label = expect_ident("place expression");
    if (is_sym(".")) {
      next();
      pe.is_op = true;
      pe.op_name = expect_ident("context operation name");
      expect_sym("(");
      if (!is_sym(")")) {
        pe.args.push_back(parse_place_expr());
        while (is_sym(",")) {
          next();
          pe.args.push_back(parse_place_expr());
        }
      }
      expect_sym(")");
    }
    return pe;
  }

  Operand parse_operand() {
    if (cur().kind == TokenKind::Literal) return Operand::make_atom(parse_atom());
    if (cur().kind == TokenKind::Identifier || is_kw("self") || is_sym("?"))
      return Operand::make_path(parse_path());
    fail("constraint operand");
  }

  ConstraintExpr parse_constraint() {
    ConstraintExpr c;
    c.loc = cur().loc;
    if (is_kw("OUT")) {
      next();
      c.form = ConstraintExpr::Form::Out;
      expect_sym("(");
      RolePath p;
      p.segs.push_back({RolePath::Sep::First, expect_ident("constituent")});
      c.args.push_back(Operand::make_path(std::move(p)));
      expect_sym(")");
      return c;
    }
    if (is_kw("and") || is_kw("or") || is_kw("not") || is_kw("nand")) {
      c.form = ConstraintExpr::Form::BoolOp;
      c.name = cur().text;
      next();
      expect_sym("(");
      c.children.push_back(parse_constraint());
      while (is_sym(",")) {
        next();
        c.children.push_back(parse_constraint());
      }
      expect_sym(")");
      return c;
    }
    // predicate: bare identifier directly followed by '('
    if (cur().kind == TokenKind::Identifier && peek().kind == TokenKind::Symbol &&
        peek().text == "(") {
      c.form = ConstraintExpr::Form::Predicate;
      c.name = cur().text;
      next();
      next();  // '('
      if (!is_sym(")")) {
        c.args.push_back(parse_operand());
        while (is_sym(",")) {
          next();
          c.args.push_back(parse_operand());
        }
      }
      expect_sym(")");
      return c;
    }
    RolePath lhs = parse_path();
    if (is_sym("<-")) {
      next();
      c.form = ConstraintExpr::Form::Filler;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      if (cur().kind == TokenKind::Identifier &&
          peek().kind == TokenKind::Symbol && peek().text == "(") {
        c.name = cur().text;
        next();
        next();
        c.args.push_back(Operand::make_atom(parse_atom()));
        while (is_sym(",")) {
          next();
          c.args.push_back(Operand::make_atom(parse_atom()));
        }
        expect_sym(")");
      } else {
        c.args.push_back(Operand::make_atom(parse_atom()));
      }
      return c;
    }
    if (is_sym("<->")) {
      next();
      c.form = ConstraintExpr::Form::Identification;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      if (cur().kind == TokenKind::Identifier &&
          peek().kind == TokenKind::Symbol && peek().text == "(") {
        c.name = cur().text;  // C-function
        next();
        next();
        c.args.push_back(Operand::make_path(parse_path()));
        expect_sym(")");
      } else {
        c.args.push_back(Operand::make_path(parse_path()));
      }
      return c;
    }
    if (is_sym("=")) {
      next();
      c.form = ConstraintExpr::Form::Equality;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      c.args.push_back(Operand::make_path(parse_path()));
      return c;
    }
    if (cur().kind == TokenKind::Identifier && cur().text == "C") {
      next();
      c.form = ConstraintExpr::Form::Parent;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      c.args.push_back(Operand::make_path(parse_path()));
      return c;
    }
    if (is_sym("@")) {
      next();
      c.form = ConstraintExpr::Form::Placement;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      c.places.push_back(parse_place_expr());
      return c;
    }
    if (is_sym(".")) {
      // context relation: <ctx-path>.<relation>(<place-exprs>)
      next();
      c.form = ConstraintExpr::Form::ContextRelation;
      c.args.push_back(Operand::make_path(std::move(lhs)));
      c.name = expect_ident("relation name");
      expect_sym("(");
      if (!is_sym(")")) {
        c.places.push_back(parse_place_expr());
        while (is_sym(",")) {
          next();
          c.places.push_back(parse_place_expr());
        }
      }
      expect_sym(")");
      return c;
    }
    fail("constraint operator ('<-', '<->', '=', 'C', '@' or relation call)");
  }

  RoleDecl parse_role() {
    RoleDecl r;
    r.loc = cur().loc;
    if (is_sym("?")) {
      r.mutable_flag = true;
      next();
    }
    r.name = expect_ident("role name");
    expect_sym(":");
    r.type_name = expect_ident("role type");
    if (is_sym("@")) {
      next();
      r.situated_in = expect_ident("situating context");
    }
    return r;
  }

  RelationSig parse_sig() {
    RelationSig s;
    s.loc = cur().loc;
    s.name = expect_ident("relation name");
    expect_sym("(");
    if (!is_sym(")")) {
      s.param_places.push_back(expect_ident("place kind"));
      while (is_sym(",")) {
        next();
        s.param_places.push_back(expect_ident("place kind"));
      }
    }
    expect_sym(")");
    expect_sym("|->");
    s.result = expect_ident("result type");
    return s;
  }

  ConstituentDecl parse_constituent() {
    ConstituentDecl c;
    c.loc = cur().loc;
    c.label = expect_ident("constituent label");
    expect_sym(":");
    c.type_name = expect_ident("constituent type");
    if (is_sym("@")) {
      next();
      c.context_label = expect_ident("situating context label");
    }
    if (is_sym("/I")) {
      c.dir = Direction::In;
      next();
    } else if (is_sym("/O")) {
      c.dir = Direction::Out;
      next();
    } else if (is_sym("/IO")) {
      c.dir = Direction::InOut;
      next();
    } else {
      fail("'/I', '/O' or '/IO'");
    }
    return c;
  }

  ConstructionalDecl parse_constructional() {
    ConstructionalDecl c;
    c.loc = cur().loc;
    if (is_kw("not")) {
      c.negative = true;
      next();
    }
    c.label = expect_ident("constructional label");
    expect_sym(":");
    c.type_name = expect_ident("s-construction type");
    return c;
  }

  Definition parse_enum() {
    Definition d;
    d.kind = DefKind::Enum;
    d.loc = cur().loc;
    next();  // enum
    d.name = expect_ident("enum name");
    expect_sym("{");
    if (!is_sym("}")) {
      d.enumerators.push_back(expect_ident("enumerator"));
      while (is_sym(",")) {
        next();
        d.enumerators.push_back(expect_ident("enumerator"));
      }
    }
    expect_sym("}");
    return d;
  }

  // Block order as printed in the declaration figures. Each block is
  // optional and non-repeatable.
  int block_order(DefKind kind, const std::string& block) {
    static const std::map<std::string, int> schema_order = {
        {"inherits", 0}, {"roles", 1}, {"constraints", 2}};
    static const std::map<std::string, int> context_order = {
        {"inherits", 0}, {"roles", 1},     {"constraints", 2},
        {"places", 3},   {"relations", 4}, {"operations", 5}};
    static const std::map<std::string, int> sconstr_order = {
        {"inherits", 0},     {"roles", 1},       {"constructional", 2},
        {"constituents", 3}, {"constraints", 4}};
    const std::map<std::string, int>* table = nullptr;
    switch (kind) {
      case DefKind::Schema: table = &schema_order; break;
      case DefKind::Context: table = &context_order; break;
      case DefKind::SConstruction: table = &sconstr_order; break;
      default: return -1;
    }
    auto it = table->find(block);
    return it == table->end() ? -1 : it->second;
  }

  Definition parse_definition() {
    Definition d;
    d.loc = cur().loc;
    if (is_kw("enum")) return parse_enum();
    if (is_kw("schema")) d.kind = DefKind::Schema;
    else if (is_kw("context")) d.kind = DefKind::Context;
    else if (is_kw("s-construction")) d.kind = DefKind::SConstruction;
    else fail("declaration ('schema', 'context', 's-construction' or 'enum')");
    next();
    d.name = expect_ident("type name");
    if (is_kw("confidence")) {
      if (d.kind != DefKind::SConstruction)
        fail("block keyword ('confidence' only applies to s-constructions)");
      next();
      if (cur().kind != TokenKind::Literal ||
          (cur().lit != Token::Lit::Float && cur().lit != Token::Lit::Int))
        fail("confidence value");
      d.confidence = cur().lit == Token::Lit::Float
                         ? cur().float_val
                         : static_cast<double>(cur().int_val);
      next();
    }
    int last_order = -1;
    while (is_block_kw()) {
      std::string block = cur().text;
      SourceLoc bloc = cur().loc;
      int order = block_order(d.kind, block);
      if (order < 0)
        fail("a block valid in this declaration kind");
      if (order == last_order) {
        out.diagnostics.push_back(
            {"DuplicateBlock", "block '" + block + "' repeated", bloc});
        throw ParseError{};
      }
      if (order < last_order)
        fail("blocks in declaration order ('" + block + "' is out of order)");
      last_order = order;
      next();
      if (block == "inherits") {
        d.inherits.push_back(expect_ident("parent type"));
        while (is_sym(",")) {
          next();
          d.inherits.push_back(expect_ident("parent type"));
        }
      } else if (block == "roles") {
        d.has_roles = true;
        while (!item_boundary()) d.roles.push_back(parse_role());
      } else if (block == "constraints") {
        d.has_constraints = true;
        while (!item_boundary()) d.constraints.push_back(parse_constraint());
      } else if (block == "places") {
        d.has_places = true;
        while (!item_boundary()) d.places.push_back(expect_ident("place kind"));
      } else if (block == "relations") {
        d.has_relations = true;
        while (!item_boundary()) d.relations.push_back(parse_sig());
      } else if (block == "operations") {
        d.has_operations = true;
        while (!item_boundary()) d.operations.push_back(parse_sig());
      } else if (block == "constructional") {
        d.has_constructional = true;
        while (!item_boundary())
          d.constructional.push_back(parse_constructional());
      } else if (block == "constituents") {
        d.has_constituents = true;
        while (!item_boundary()) d.constituents.push_back(parse_constituent());
      }
    }
    return d;
  }

  void run() {
    while (!at_end()) {
      if (cur().kind == TokenKind::Error) {
        next();  // lexer already reported it
        continue;
      }
      try {
        out.definitions.push_back(parse_definition());
      } catch (const ParseError&) {
        // the failure may have been discovered at the next declaration
        // keyword itself; resume there rather than past it
        if (!at_end() && !is_decl_kw()) next();
        recover();
      }
    }
  }
};

}  // namespace

ParseResult parse_program(const std::vector<Token>& tokens) {
  Parser p(tokens);
  p.run();
  return std::move(p.out);
}

ParseResult parse_source(const std::string& source) {
  LexResult lex = tokenize(source);
  ParseResult res = parse_program(lex.tokens);
  res.diagnostics.insert(res.diagnostics.begin(), lex.diagnostics.begin(),
                         lex.diagnostics.end());
  return res;
}

}  // namespace scim
