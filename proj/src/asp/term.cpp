#include "ethmon/asp/term.hpp"

#include <algorithm>
#include <ostream>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

template <class T>
std::strong_ordering compare_ranges(const std::vector<T>& a, const std::vector<T>& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

void append_args(std::string& out, const std::vector<Term>& args) {
  if (args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(args[i]);
  }
  out += ')';
}

}  // namespace

Term::Term(TermKind kind, std::string name, std::vector<Term> args)
    : kind_(kind), name_(std::move(name)), args_(std::move(args)) {}

Term Term::variable(std::string name) { return Term(TermKind::Variable, std::move(name), {}); }

Term Term::constant(std::string symbol) { return Term(TermKind::Constant, std::move(symbol), {}); }

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) return constant(std::move(functor));
  return Term(TermKind::Compound, std::move(functor), std::move(args));
}

bool Term::is_ground() const {
  if (kind_ == TermKind::Variable) return false;
  return std::all_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_ground(); });
}

int Term::depth() const {
  int deepest = -1;
  for (const auto& a : args_) deepest = std::max(deepest, a.depth());
  return deepest + 1;
}

void Term::collect_variables(std::vector<std::string>& out) const {
  if (kind_ == TermKind::Variable) {
    if (std::find(out.begin(), out.end(), name_) == out.end()) out.push_back(name_);
    return;
  }
  for (const auto& a : args_) a.collect_variables(out);
}

bool operator==(const Term& a, const Term& b) {
  return a.kind_ == b.kind_ && a.name_ == b.name_ && a.args_ == b.args_;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.name_ <=> b.name_; c != 0) return c;
  return compare_ranges(a.args_, b.args_);
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

void Atom::collect_variables(std::vector<std::string>& out) const {
  for (const auto& a : args) a.collect_variables(out);
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  return compare_ranges(a.args, b.args);
}

std::strong_ordering operator<=>(const Literal& a, const Literal& b) {
  if (auto c = a.atom <=> b.atom; c != 0) return c;
  return a.sign <=> b.sign;
}

bool Rule::is_ground() const {
  if (!head.is_ground()) return false;
  return std::all_of(body.begin(), body.end(), [](const Literal& l) { return l.atom.is_ground(); });
}

std::strong_ordering operator<=>(const Rule& a, const Rule& b) {
  if (auto c = a.head <=> b.head; c != 0) return c;
  return compare_ranges(a.body, b.body);
}

Term atom_to_term(const Atom& a) { return Term::compound(a.predicate, a.args); }

Atom term_to_atom(const Term& t) {
  if (t.is_variable()) throw Error("cannot view variable " + t.name() + " as an atom");
  return Atom{t.name(), t.args()};
}

std::string to_string(const Term& t) {
  std::string out = t.name();
  append_args(out, t.args());
  return out;
}

std::string to_string(const Atom& a) {
  std::string out = a.predicate;
  append_args(out, a.args);
  return out;
}

std::string to_string(const Literal& l) {
  return l.negated() ? "not " + to_string(l.atom) : to_string(l.atom);
}

std::string to_string(const Rule& r) {
  std::string out = to_string(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += to_string(r.body[i]);
    }
  }
  out += '.';
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }
std::ostream& operator<<(std::ostream& os, const Atom& a) { return os << to_string(a); }
std::ostream& operator<<(std::ostream& os, const Literal& l) { return os << to_string(l); }
std::ostream& operator<<(std::ostream& os, const Rule& r) { return os << to_string(r); }

void sort_canonical(std::vector<Atom>& atoms) {
  std::vector<std::pair<std::string, Atom>> keyed;
  keyed.reserve(atoms.size());
  for (auto& a : atoms) keyed.emplace_back(to_string(a), std::move(a));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              keyed.end());
  atoms.clear();
  for (auto& [_, a] : keyed) atoms.push_back(std::move(a));
}

}  // namespace ethmon::asp
