#include <sstream>

#include "scim/ast.hpp"

namespace scim {

std::string atom_to_string(const Atom& a) {
  struct V {
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      std::ostringstream os;
      os << v;
      std::string s = os.str();
      if (s.find('.') == std::string::npos &&
          s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos &&
          s.find("nan") == std::string::npos) {
        s += ".0";
      }
      return s;
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const {
      std::string out = "\"";
      for (char c : v) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          default: out += c; break;
        }
      }
      out += "\"";
      return out;
    }
    std::string operator()(const Sym& v) const { return v.name; }
  };
  return std::visit(V{}, a);
}

std::string RolePath::to_string() const {
  std::string out;
  if (muted) out += "?";
  if (self) {
    out += "self";
    for (const auto& s : segs) {
      out += (s.sep == Sep::Star) ? "*" : ".";
      out += s.name;
    }
    return out;
  }
  for (size_t i = 0; i < segs.size(); i++) {
    if (i > 0) out += (segs[i].sep == Sep::Star) ? "*" : ".";
    out += segs[i].name;
  }
  return out;
}

std::string PlaceExpr::to_string() const {
  if (!is_op) return label;
  std::string out = label + "." + op_name + "(";
  for (size_t i = 0; i < args.size(); i++) {
    if (i > 0) out += ", ";
    out += args[i].to_string();
  }
  return out + ")";
}

std::string Operand::to_string() const {
  return is_path ? path.to_string() : atom_to_string(atom);
}

std::string ConstraintExpr::to_string() const {
  std::string out;
  switch (form) {
    case Form::BoolOp: {
      out = name + "(";
      for (size_t i = 0; i < children.size(); i++) {
        if (i > 0) out += ", ";
        out += children[i].to_string();
      }
      out += ")";
      break;
    }
    case Form::Filler: {
      out = args[0].to_string() + " <- ";
      if (!name.empty()) {
        out += name + "(";
        for (size_t i = 1; i < args.size(); i++) {
          if (i > 1) out += ", ";
          out += args[i].to_string();
        }
        out += ")";
      } else {
        out += args[1].to_string();
      }
      break;
    }
    case Form::Identification: {
      out = args[0].to_string() + " <-> ";
      if (!name.empty()) {
        out += name + "(" + args[1].to_string() + ")";
      } else {
        out += args[1].to_string();
      }
      break;
    }
    case Form::Equality:
      out = args[0].to_string() + " = " + args[1].to_string();
      break;
    case Form::Parent:
      out = args[0].to_string() + " C " + args[1].to_string();
      break;
    case Form::Predicate: {
      out = name + "(";
      for (size_t i = 0; i < args.size(); i++) {
        if (i > 0) out += ", ";
        out += args[i].to_string();
      }
      out += ")";
      break;
    }
    case Form::ContextRelation: {
      out = args[0].to_string() + "." + name + "(";
      for (size_t i = 0; i < places.size(); i++) {
        if (i > 0) out += ", ";
        out += places[i].to_string();
      }
      out += ")";
      break;
    }
    case Form::Out:
      out = "OUT(" + args[0].to_string() + ")";
      break;
    case Form::Placement:
      out = args[0].to_string() + " @ " + places[0].to_string();
      break;
  }
  return out;
}

namespace {

void print_role(std::ostringstream& os, const RoleDecl& r) {
  os << "    ";
  if (r.mutable_flag) os << "?";
  os << r.name << " : " << r.type_name;
  if (r.situated_in) os << " @" << *r.situated_in;
  os << "\n";
}

void print_sig(std::ostringstream& os, const RelationSig& s) {
  os << "    " << s.name << "(";
  for (size_t i = 0; i < s.param_places.size(); i++) {
    if (i > 0) os << ", ";
    os << s.param_places[i];
  }
  os << ") |-> " << s.result << "\n";
}

}  // namespace

std::string to_source(const Definition& def) {
  std::ostringstream os;
  if (def.kind == DefKind::Enum) {
    os << "enum " << def.name << " { ";
    for (size_t i = 0; i < def.enumerators.size(); i++) {
      if (i > 0) os << ", ";
      os << def.enumerators[i];
    }
    os << " }\n";
    return os.str();
  }
  switch (def.kind) {
    case DefKind::Schema: os << "schema "; break;
    case DefKind::Context: os << "context "; break;
    case DefKind::SConstruction: os << "s-construction "; break;
    default: break;
  }
  os << def.name << "\n";
  if (def.confidence) os << "  confidence " << atom_to_string(Atom{*def.confidence}) << "\n";
  if (!def.inherits.empty()) {
    os << "  inherits ";
    for (size_t i = 0; i < def.inherits.size(); i++) {
      if (i > 0) os << ", ";
      os << def.inherits[i];
    }
    os << "\n";
  }
  if (def.has_roles) {
    os << "  roles\n";
    for (const auto& r : def.roles) print_role(os, r);
  }
  if (def.has_constructional) {
    os << "  constructional\n";
    for (const auto& c : def.constructional) {
      os << "    ";
      if (c.negative) os << "not ";
      os << c.label << " : " << c.type_name << "\n";
    }
  }
  if (def.has_constituents) {
    os << "  constituents\n";
    for (const auto& c : def.constituents) {
      os << "    " << c.label << " : " << c.type_name;
      if (c.context_label) os << " @" << *c.context_label;
      switch (c.dir) {
        case Direction::In: os << " /I"; break;
        case Direction::Out: os << " /O"; break;
        case Direction::InOut: os << " /IO"; break;
      }
      os << "\n";
    }
  }
  if (def.has_constraints) {
    os << "  constraints\n";
    for (const auto& c : def.constraints) os << "    " << c.to_string() << "\n";
  }
  if (def.has_places) {
    os << "  places\n";
    for (const auto& p : def.places) os << "    " << p << "\n";
  }
  if (def.has_relations) {
    os << "  relations\n";
    for (const auto& r : def.relations) print_sig(os, r);
  }
  if (def.has_operations) {
    os << "  operations\n";
    for (const auto& o : def.operations) print_sig(os, o);
  }
  return os.str();
}

std::string to_source(const std::vector<Definition>& defs) {
  std::string out;
  for (const auto& d : defs) {
    out += to_source(d);
    out += "\n";
  }
  return out;
}

}  // namespace scim
