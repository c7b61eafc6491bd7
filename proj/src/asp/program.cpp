#include "ethmon/asp/program.hpp"

#include <algorithm>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

void check_depth(const Atom& a) {
  for (const auto& t : a.args) {
    if (t.depth() > kMaxTermDepth) throw DepthError(to_string(t));
  }
}

}  // namespace

void check_rule(const Rule& r, std::size_t index) {
  check_depth(r.head);
  for (const auto& l : r.body) check_depth(l.atom);

  std::vector<std::string> bound;
  for (const auto& l : r.body) {
    if (!l.negated()) l.atom.collect_variables(bound);
  }
  std::vector<std::string> needed;
  r.head.collect_variables(needed);
  for (const auto& l : r.body) {
    if (l.negated()) l.atom.collect_variables(needed);
  }
  for (const auto& v : needed) {
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) throw SafetyError(index, v);
  }
}

void extend_signature(Signature& sig, const Atom& a) {
  auto [it, inserted] = sig.emplace(a.predicate, a.arity());
  if (!inserted && it->second != a.arity()) {
    std::vector<std::size_t> seen{it->second, a.arity()};
    std::sort(seen.begin(), seen.end());
    throw ArityError(a.predicate, seen);
  }
}

Program::Program(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    check_rule(rules_[i], i);
    extend_signature(signature_, rules_[i].head);
    for (const auto& l : rules_[i].body) extend_signature(signature_, l.atom);
  }
}

bool Program::is_ground() const {
  return std::all_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.is_ground(); });
}

std::vector<Atom> Program::facts() const {
  std::vector<Atom> out;
  for (const auto& r : rules_) {
    if (r.is_fact()) out.push_back(r.head);
  }
  return out;
}

Program Program::concat(const Program& other) const { return with_rules(other.rules_); }

Program Program::with_rules(const std::vector<Rule>& extra) const {
  std::vector<Rule> all = rules_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Program(std::move(all));
}

}  // namespace ethmon::asp
