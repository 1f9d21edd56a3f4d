#include <algorithm>
#include <cmath>

#include "scim/diagnostics.hpp"
#include "scim/registry.hpp"

namespace scim {

std::optional<double> atom_number(const Atom& a) {
  if (const auto* i = std::get_if<long long>(&a)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&a)) return *d;
  return std::nullopt;
}

bool atoms_equal(const Atom& a, const Atom& b) {
  auto na = atom_number(a), nb = atom_number(b);
  if (na && nb) return *na == *nb;
  if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b))
    return std::get<bool>(a) == std::get<bool>(b);
  if (std::holds_alternative<std::string>(a) &&
      std::holds_alternative<std::string>(b))
    return std::get<std::string>(a) == std::get<std::string>(b);
  if (std::holds_alternative<Sym>(a) && std::holds_alternative<Sym>(b))
    return std::get<Sym>(a).name == std::get<Sym>(b).name;
  return false;
}

namespace {

[[noreturn]] void arity_error(const std::string& name, size_t want,
                              size_t got) {
  throw RuntimeError("ArityMismatch", "'" + name + "' takes " +
                                          std::to_string(want) +
                                          " arguments, got " +
                                          std::to_string(got));
}

double number_or_throw(const std::string& name, const Atom& a) {
  auto n = atom_number(a);
  if (!n)
    throw RuntimeError("TypeMismatch",
                       "'" + name + "' expects numeric arguments");
  return *n;
}

std::string text_of(const Atom& a) {
  if (const auto* s = std::get_if<std::string>(&a)) return *s;
  if (const auto* y = std::get_if<Sym>(&a)) return y->name;
  return atom_to_string(a);
}

bool atom_less(const std::string& name, const Atom& a, const Atom& b) {
  auto na = atom_number(a), nb = atom_number(b);
  if (na && nb) return *na < *nb;
  if (std::holds_alternative<std::string>(a) &&
      std::holds_alternative<std::string>(b))
    return std::get<std::string>(a) < std::get<std::string>(b);
  throw RuntimeError("TypeMismatch",
                     "'" + name + "' expects comparable arguments");
}

}  // namespace

bool predicate_exists(const std::string& name) {
  return name == "eq" || name == "neq" || name == "lt" || name == "le" ||
         name == "gt" || name == "ge" || name == "approx-square" ||
         name == "color-is";
}

bool eval_predicate(const std::string& name, const std::vector<Atom>& args) {
  if (name == "eq" || name == "neq") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    bool eq = atoms_equal(args[0], args[1]);
    return name == "eq" ? eq : !eq;
  }
  if (name == "lt" || name == "le" || name == "gt" || name == "ge") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    if (name == "lt") return atom_less(name, args[0], args[1]);
    if (name == "gt") return atom_less(name, args[1], args[0]);
    if (name == "le") return !atom_less(name, args[1], args[0]);
    return !atom_less(name, args[0], args[1]);
  }
  if (name == "approx-square") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    double w = number_or_throw(name, args[0]);
    double h = number_or_throw(name, args[1]);
    double m = std::max(std::abs(w), std::abs(h));
    if (m == 0) return true;
    return std::abs(w - h) / m <= 0.2;
  }
  if (name == "color-is") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    return text_of(args[0]) == text_of(args[1]);
  }
  throw RuntimeError("UnknownPredicate", "no predicate '" + name + "'");
}

bool transform_exists(const std::string& name) {
  return name == "identity" || name == "succ" || name == "lowercase";
}

Atom eval_transform(const std::string& name, const Atom& arg) {
  if (name == "identity") return arg;
  if (name == "succ") {
    if (const auto* i = std::get_if<long long>(&arg)) return Atom{*i + 1};
    if (const auto* d = std::get_if<double>(&arg)) return Atom{*d + 1.0};
    throw RuntimeError("TypeMismatch", "'succ' expects a numeric value");
  }
  if (name == "lowercase") {
    std::string s = text_of(arg);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return Atom{s};
  }
  throw RuntimeError("UnknownPredicate", "no transform '" + name + "'");
}

bool atomic_function_exists(const std::string& name) {
  return name == "plus" || name == "concat";
}

Atom eval_atomic_function(const std::string& name,
                          const std::vector<Atom>& args) {
  if (name == "plus") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    if (std::holds_alternative<long long>(args[0]) &&
        std::holds_alternative<long long>(args[1]))
      return Atom{std::get<long long>(args[0]) + std::get<long long>(args[1])};
    return Atom{number_or_throw(name, args[0]) +
                number_or_throw(name, args[1])};
  }
  if (name == "concat") {
    if (args.size() != 2) arity_error(name, 2, args.size());
    return Atom{text_of(args[0]) + text_of(args[1])};
  }
  throw RuntimeError("UnknownPredicate", "no function '" + name + "'");
}

}  // namespace scim
