#pragma once

#include <string>
#include <vector>

#include "ethmon/asp/program.hpp"
#include "ethmon/asp/solver.hpp"

namespace ethmon::asp {

struct JustificationStep {
  Rule rule;                             // ground instance that fires
  std::vector<Atom> supporting_facts;    // positive body, all true
  std::vector<Atom> default_assumptions; // negated body, all false

  friend bool operator==(const JustificationStep&, const JustificationStep&) = default;
};

/// Derivation of `conclusion`, supports before the conclusions they feed.
/// Base facts are cited inside steps but get no step of their own unless
/// the conclusion itself is a fact.
struct Justification {
  Atom conclusion;
  std::vector<JustificationStep> steps;

  friend bool operator==(const Justification&, const Justification&) = default;
};

/// Throws NotDerived when `a` is not in `s` or has no well-founded
/// derivation from `g` under `s`.
Justification justify(const AnswerSet& s, const Program& g, const Atom& a);

/// Indented text block, one step per entry:
///
///   unethical(e) :- sensitiveSlogan(e), not relevant(e), answer(e).
///     because sensitiveSlogan(e), answer(e)
///     assuming not relevant(e)
std::string to_string(const Justification& j);

}  // namespace ethmon::asp
