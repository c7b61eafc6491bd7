#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ethmon/asp/term.hpp"

namespace ethmon::asp {

using Signature = std::map<std::string, std::size_t>;

/// A validated normal logic program. Construction checks term depth, rule
/// safety and signature consistency, so every Program value in circulation
/// satisfies them.
class Program {
 public:
  Program() = default;

  /// Throws DepthError, SafetyError or ArityError.
  explicit Program(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  const Signature& signature() const { return signature_; }
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }
  bool is_ground() const;

  /// Body facts only, in program order.
  std::vector<Atom> facts() const;

  /// New program with `other`'s rules appended; revalidated.
  Program concat(const Program& other) const;
  Program with_rules(const std::vector<Rule>& extra) const;

  friend bool operator==(const Program& a, const Program& b) { return a.rules_ == b.rules_; }

 private:
  std::vector<Rule> rules_;
  Signature signature_;
};

/// Checks one rule in isolation: depth and safety. `index` is reported in SafetyError.
void check_rule(const Rule& r, std::size_t index);

/// Merges `a`'s arities into `sig`, throwing ArityError on conflict.
void extend_signature(Signature& sig, const Atom& a);

}  // namespace ethmon::asp
