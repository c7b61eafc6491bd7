#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ethmon::asp {

/// Deepest compound nesting accepted anywhere in a program:
/// `f(g(a))` has depth 2 and is the limit.
inline constexpr int kMaxTermDepth = 2;

enum class TermKind { Variable, Constant, Compound };

class Term {
 public:
  static Term variable(std::string name);
  static Term constant(std::string symbol);
  static Term compound(std::string functor, std::vector<Term> args);

  TermKind kind() const { return kind_; }
  bool is_variable() const { return kind_ == TermKind::Variable; }
  bool is_compound() const { return kind_ == TermKind::Compound; }
  /// Variable name, constant symbol or functor.
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }

  bool is_ground() const;
  /// Variables and constants have depth 0; a compound is one deeper than its deepest argument.
  int depth() const;
  void collect_variables(std::vector<std::string>& out) const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  Term(TermKind kind, std::string name, std::vector<Term> args);

  TermKind kind_;
  std::string name_;
  std::vector<Term> args_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  void collect_variables(std::vector<std::string>& out) const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

enum class Sign { Positive, DefaultNegated };

struct Literal {
  Atom atom;
  Sign sign = Sign::Positive;

  bool negated() const { return sign == Sign::DefaultNegated; }
  static Literal pos(Atom a) { return {std::move(a), Sign::Positive}; }
  static Literal neg(Atom a) { return {std::move(a), Sign::DefaultNegated}; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal& a, const Literal& b);
};

struct Rule {
  Atom head;
  std::vector<Literal> body;

  bool is_fact() const { return body.empty(); }
  bool is_ground() const;
  static Rule fact(Atom a) { return {std::move(a), {}}; }

  friend bool operator==(const Rule&, const Rule&) = default;
  friend std::strong_ordering operator<=>(const Rule& a, const Rule& b);
};

/// Reified view of an atom as a term: `p` becomes the constant `p`,
/// `p(a)` becomes the compound `p(a)`.
Term atom_to_term(const Atom& a);
/// Inverse of atom_to_term for constants and compounds; variables are rejected.
Atom term_to_atom(const Term& t);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
/// `head.` or `head :- l1, l2.`
std::string to_string(const Rule& r);

std::ostream& operator<<(std::ostream& os, const Term& t);
std::ostream& operator<<(std::ostream& os, const Atom& a);
std::ostream& operator<<(std::ostream& os, const Literal& l);
std::ostream& operator<<(std::ostream& os, const Rule& r);

/// Order by canonical rendering; every user-visible listing is sorted this way.
struct CanonicalLess {
  bool operator()(const Atom& a, const Atom& b) const { return to_string(a) < to_string(b); }
};

void sort_canonical(std::vector<Atom>& atoms);

}  // namespace ethmon::asp
