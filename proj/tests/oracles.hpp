#pragma once
// Test-only reference implementations and random program generators.
// Nothing here calls the grounder or the solver search under test.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ethmon/asp/justification.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/asp/solver.hpp"
#include "ethmon/asp/term.hpp"

namespace oracle {

using namespace ethmon::asp;

inline Atom prop(const std::string& name) { return Atom{name, {}}; }

inline std::vector<Atom> herbrand_base(const Program& g) {
  std::vector<Atom> atoms;
  for (const auto& r : g.rules()) {
    atoms.push_back(r.head);
    for (const auto& l : r.body) atoms.push_back(l.atom);
  }
  sort_canonical(atoms);
  return atoms;
}

/// Least model of the reduct g^S, by naive fixpoint over the rules whose
/// negated atoms are all outside S.
inline std::set<Atom> reduct_least_model(const Program& g, const std::set<Atom>& s) {
  std::set<Atom> m;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : g.rules()) {
      bool fires = std::all_of(r.body.begin(), r.body.end(), [&](const Literal& l) {
        return l.negated() ? s.count(l.atom) == 0 : m.count(l.atom) != 0;
      });
      if (fires && m.insert(r.head).second) grew = true;
    }
  }
  return m;
}

/// Every S subset of the Herbrand base with least_model(g^S) == S.
inline std::vector<AnswerSet> brute_force_stable_models(const Program& g) {
  auto base = herbrand_base(g);
  std::vector<AnswerSet> out;
  const std::size_t n = base.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Atom> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) members.push_back(base[i]);
    }
    if (reduct_least_model(g, std::set<Atom>(members.begin(), members.end())) ==
        std::set<Atom>(members.begin(), members.end())) {
      out.push_back(AnswerSet(members));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const AnswerSet& a, const AnswerSet& b) { return to_string(a) < to_string(b); });
  return out;
}

/// Minimal model of a positive program by subset search: the smallest closed set.
inline AnswerSet brute_force_minimal_model(const Program& g) {
  auto base = herbrand_base(g);
  const std::size_t n = base.size();
  std::vector<std::set<Atom>> closed;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::set<Atom> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.insert(base[i]);
    }
    bool is_model = std::all_of(g.rules().begin(), g.rules().end(), [&](const Rule& r) {
      bool body = std::all_of(r.body.begin(), r.body.end(),
                              [&](const Literal& l) { return s.count(l.atom) != 0; });
      return !body || s.count(r.head);
    });
    if (is_model) closed.push_back(std::move(s));
  }
  // The intersection of all models of a definite program is its least model.
  std::set<Atom> least = closed.front();
  for (const auto& s : closed) {
    std::set<Atom> keep;
    std::set_intersection(least.begin(), least.end(), s.begin(), s.end(),
                          std::inserter(keep, keep.begin()));
    least = std::move(keep);
  }
  return AnswerSet(std::vector<Atom>(least.begin(), least.end()));
}

struct GroundProgramShape {
  int max_atoms = 8;
  int max_rules = 12;
  int max_neg = 3;
  int max_pos = 3;
  bool allow_negation = true;
};

/// Random ground normal program over propositional atoms p0..p{n-1}.
inline Program random_ground_program(std::mt19937& rng, const GroundProgramShape& shape) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int atoms = pick(1, shape.max_atoms);
  const int rules = pick(0, shape.max_rules);
  auto atom = [&](int i) { return prop("p" + std::to_string(i)); };
  std::vector<Rule> out;
  for (int r = 0; r < rules; ++r) {
    Rule rule{atom(pick(0, atoms - 1)), {}};
    int pos = pick(0, shape.max_pos);
    int neg = shape.allow_negation ? pick(0, shape.max_neg) : 0;
    for (int k = 0; k < pos; ++k) rule.body.push_back(Literal::pos(atom(pick(0, atoms - 1))));
    for (int k = 0; k < neg; ++k) rule.body.push_back(Literal::neg(atom(pick(0, atoms - 1))));
    std::shuffle(rule.body.begin(), rule.body.end(), rng);
    out.push_back(std::move(rule));
  }
  return Program(std::move(out));
}

/// Stratified: atom i lives on stratum level[i]; positive bodies stay at or
/// below the head's stratum, negated atoms strictly below it.
inline Program random_stratified_program(std::mt19937& rng, int max_atoms = 8, int max_rules = 12) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int atoms = pick(1, max_atoms);
  std::vector<int> level(atoms);
  for (auto& l : level) l = pick(0, 3);
  auto atom = [&](int i) { return prop("p" + std::to_string(i)); };
  std::vector<Rule> out;
  const int rules = pick(0, max_rules);
  for (int r = 0; r < rules; ++r) {
    int head = pick(0, atoms - 1);
    Rule rule{atom(head), {}};
    std::vector<int> same_or_below, below;
    for (int i = 0; i < atoms; ++i) {
      if (level[i] <= level[head]) same_or_below.push_back(i);
      if (level[i] < level[head]) below.push_back(i);
    }
    int pos = pick(0, 3);
    for (int k = 0; k < pos; ++k) {
      rule.body.push_back(Literal::pos(atom(same_or_below[pick(0, int(same_or_below.size()) - 1)])));
    }
    if (!below.empty()) {
      int neg = pick(0, 3);
      for (int k = 0; k < neg; ++k) {
        rule.body.push_back(Literal::neg(atom(below[pick(0, int(below.size()) - 1)])));
      }
    }
    out.push_back(std::move(rule));
  }
  return Program(std::move(out));
}

/// Random safe non-ground program over p/1, q/1, r/2, s/0 and up to three constants.
inline Program random_nonground_program(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::vector<std::string> constants{"a", "b", "c"};
  const int nconst = pick(1, 3);
  auto constant = [&]() { return Term::constant(constants[pick(0, nconst - 1)]); };
  struct Pred {
    std::string name;
    int arity;
  };
  const std::vector<Pred> preds{{"p", 1}, {"q", 1}, {"r", 2}, {"s", 0}};
  auto ground_atom = [&]() {
    const Pred& p = preds[pick(0, 3)];
    Atom a{p.name, {}};
    for (int i = 0; i < p.arity; ++i) a.args.push_back(constant());
    return a;
  };
  const std::vector<std::string> vars{"X", "Y"};
  auto var_or_const = [&](const std::vector<std::string>& allowed) {
    if (!allowed.empty() && pick(0, 3) != 0) return Term::variable(allowed[pick(0, int(allowed.size()) - 1)]);
    return constant();
  };

  std::vector<Rule> out;
  const int facts = pick(1, 5);
  for (int i = 0; i < facts; ++i) out.push_back(Rule::fact(ground_atom()));
  const int rules = pick(0, 5);
  for (int i = 0; i < rules; ++i) {
    Rule rule;
    std::vector<std::string> bound;
    const int pos = pick(1, 2);
    for (int k = 0; k < pos; ++k) {
      const Pred& p = preds[pick(0, 3)];
      Atom a{p.name, {}};
      for (int j = 0; j < p.arity; ++j) a.args.push_back(var_or_const(vars));
      a.collect_variables(bound);
      rule.body.push_back(Literal::pos(std::move(a)));
    }
    const int neg = pick(0, 2);
    for (int k = 0; k < neg; ++k) {
      const Pred& p = preds[pick(0, 3)];
      Atom a{p.name, {}};
      for (int j = 0; j < p.arity; ++j) a.args.push_back(var_or_const(bound));
      rule.body.push_back(Literal::neg(std::move(a)));
    }
    const Pred& h = preds[pick(0, 3)];
    rule.head = Atom{h.name, {}};
    for (int j = 0; j < h.arity; ++j) rule.head.args.push_back(var_or_const(bound));
    out.push_back(std::move(rule));
  }
  return Program(std::move(out));
}

inline void collect_ground_terms(const Term& t, std::set<Term>& out) {
  if (!t.is_ground()) {
    for (const auto& a : t.args()) collect_ground_terms(a, out);
    return;
  }
  out.insert(t);
  for (const auto& a : t.args()) collect_ground_terms(a, out);
}

inline Term substitute(const Term& t, const std::map<std::string, Term>& s) {
  if (t.is_variable()) return s.at(t.name());
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(substitute(a, s));
  return Term::compound(t.name(), std::move(args));
}

inline Atom substitute(const Atom& a, const std::map<std::string, Term>& s) {
  Atom out{a.predicate, {}};
  for (const auto& t : a.args) out.args.push_back(substitute(t, s));
  return out;
}

/// Textbook instantiation: every rule under every assignment of its
/// variables to the program's ground terms.
inline Program naive_instantiation(const Program& p) {
  std::set<Term> universe;
  for (const auto& r : p.rules()) {
    for (const auto& t : r.head.args) collect_ground_terms(t, universe);
    for (const auto& l : r.body) {
      for (const auto& t : l.atom.args) collect_ground_terms(t, universe);
    }
  }
  std::vector<Term> terms(universe.begin(), universe.end());
  std::vector<Rule> out;
  for (const auto& r : p.rules()) {
    std::vector<std::string> vars;
    r.head.collect_variables(vars);
    for (const auto& l : r.body) l.atom.collect_variables(vars);
    std::map<std::string, Term> s;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == vars.size()) {
        Rule g{substitute(r.head, s), {}};
        for (const auto& l : r.body) g.body.push_back({substitute(l.atom, s), l.sign});
        out.push_back(std::move(g));
        return;
      }
      for (const auto& t : terms) {
        s.insert_or_assign(vars[i], t);
        assign(i + 1);
      }
    };
    assign(0);
  }
  return Program(std::move(out));
}

/// Re-derives the conclusion by applying the steps in order, checking each
/// against the answer set. Returns false on any failed check.
inline bool replay(const Justification& j, const AnswerSet& s, const Program& g) {
  std::set<Atom> derived;
  for (const auto& r : g.rules()) {
    if (r.is_fact()) derived.insert(r.head);
  }
  for (const auto& step : j.steps) {
    if (std::find(g.rules().begin(), g.rules().end(), step.rule) == g.rules().end()) return false;
    for (const auto& l : step.rule.body) {
      if (l.negated()) {
        if (s.contains(l.atom)) return false;
      } else if (!derived.count(l.atom) || !s.contains(l.atom)) {
        return false;
      }
    }
    derived.insert(step.rule.head);
  }
  return derived.count(j.conclusion) && s.contains(j.conclusion);
}

/// Random well-formed program with compounds, variables and negation.
inline Program random_printable_program(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::vector<std::string> functors{"f", "environmentally_friendly", "g2"};
  const std::vector<std::string> constants{"productX", "a", "b_1", "zeta"};
  struct Pred {
    std::string name;
    int arity;
  };
  const std::vector<Pred> preds{{"answer", 1}, {"sensitiveSlogan", 1}, {"relevant", 1},
                                {"edge", 2},   {"flag", 0},            {"unethical", 1}};
  std::function<Term(int, const std::vector<std::string>&)> term =
      [&](int depth, const std::vector<std::string>& vars) -> Term {
    int choice = pick(0, depth > 0 ? 2 : 1);
    if (choice == 0 && !vars.empty()) return Term::variable(vars[pick(0, int(vars.size()) - 1)]);
    if (choice == 2) {
      std::vector<Term> args;
      int n = pick(1, 2);
      for (int i = 0; i < n; ++i) args.push_back(term(depth - 1, vars));
      return Term::compound(functors[pick(0, 2)], std::move(args));
    }
    return Term::constant(constants[pick(0, 3)]);
  };
  auto atom = [&](const std::vector<std::string>& vars) {
    const Pred& p = preds[pick(0, int(preds.size()) - 1)];
    Atom a{p.name, {}};
    for (int i = 0; i < p.arity; ++i) a.args.push_back(term(2, vars));
    return a;
  };
  std::vector<Rule> rules;
  const int n = pick(0, 8);
  const std::vector<std::string> all_vars{"V1", "X", "Y_2"};
  for (int i = 0; i < n; ++i) {
    Rule r;
    std::vector<std::string> bound;
    int pos = pick(0, 3);
    for (int k = 0; k < pos; ++k) {
      Atom a = atom(all_vars);
      a.collect_variables(bound);
      r.body.push_back(Literal::pos(std::move(a)));
    }
    int neg = pick(0, 2);
    for (int k = 0; k < neg; ++k) r.body.push_back(Literal::neg(atom(bound)));
    r.head = atom(bound);
    rules.push_back(std::move(r));
  }
  return Program(std::move(rules));
}

}  // namespace oracle
