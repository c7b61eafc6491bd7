#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "ethmon/asp/program.hpp"

namespace ethmon::asp {

/// A set of ground atoms, iterated in canonical order.
class AnswerSet {
 public:
  AnswerSet() = default;
  /// Throws Error if any atom is non-ground.
  explicit AnswerSet(std::vector<Atom> atoms);

  bool contains(const Atom& a) const { return members_.count(a) != 0; }
  const std::vector<Atom>& atoms() const { return ordered_; }
  std::size_t size() const { return ordered_.size(); }
  bool empty() const { return ordered_.empty(); }

  auto begin() const { return ordered_.begin(); }
  auto end() const { return ordered_.end(); }

  friend bool operator==(const AnswerSet& a, const AnswerSet& b) { return a.members_ == b.members_; }

 private:
  std::vector<Atom> ordered_;
  std::set<Atom> members_;
};

/// `{a, b, c}`
std::string to_string(const AnswerSet& s);

struct SolverLimits {
  /// Propagation calls allowed per solve.
  std::size_t max_search_nodes = 1'000'000;
};

/// Gelfond-Lifschitz reduct. Requires a ground program.
Program reduct(const Program& g, const AnswerSet& s);

/// Immediate-consequence fixpoint. Requires a ground, negation-free program.
AnswerSet least_model(const Program& g);

/// All stable models of a ground program, sorted by canonical rendering.
///
/// Branches only on atoms that occur under `not`. Each node brackets the
/// candidate model between a lower bound (rules whose negated atoms are all
/// assumed false) and an upper bound (rules not blocked by an atom assumed
/// true), forces the unassigned negated atoms the bounds decide, and prunes
/// when an assumption contradicts them. Throws CapacityError past the limit.
std::vector<AnswerSet> stable_models(const Program& g, const SolverLimits& limits = {});

}  // namespace ethmon::asp
