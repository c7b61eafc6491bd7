#include "ethmon/asp/grounder.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

using Substitution = std::map<std::string, Term>;

bool match(const Term& pattern, const Term& ground, Substitution& subst) {
  if (pattern.is_variable()) {
    auto [it, inserted] = subst.emplace(pattern.name(), ground);
    return inserted || it->second == ground;
  }
  if (pattern.kind() != ground.kind() || pattern.name() != ground.name() ||
      pattern.args().size() != ground.args().size()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    if (!match(pattern.args()[i], ground.args()[i], subst)) return false;
  }
  return true;
}

Term apply(const Term& t, const Substitution& subst) {
  if (t.is_variable()) return subst.at(t.name());
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(apply(a, subst));
  return Term::compound(t.name(), std::move(args));
}

Atom apply(const Atom& a, const Substitution& subst) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(apply(t, subst));
  return out;
}

bool within_depth(const Atom& a) {
  return std::all_of(a.args.begin(), a.args.end(),
                     [](const Term& t) { return t.depth() <= kMaxTermDepth; });
}

class Grounder {
 public:
  Grounder(const Program& p, const GroundingLimits& limits) : program_(p), limits_(limits) {}

  Program run() {
    saturate();
    std::vector<Rule> out;
    std::size_t total = 0;
    for (const auto& rule : program_.rules()) {
      std::set<Rule> unique;
      for_each_instance(rule, [&](const Substitution& s) {
        Rule inst{apply(rule.head, s), {}};
        for (const auto& l : rule.body) inst.body.push_back({apply(l.atom, s), l.sign});
        if (!within_depth(inst.head)) return;
        for (const auto& l : inst.body) {
          if (!within_depth(l.atom)) return;
        }
        unique.insert(std::move(inst));
      });
      std::vector<std::pair<std::string, Rule>> keyed;
      for (auto& r : unique) keyed.emplace_back(to_string(r), r);
      std::sort(keyed.begin(), keyed.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      total += keyed.size();
      if (total > limits_.max_ground_atoms) {
        throw CapacityError("ground rule instances exceed limit of " +
                            std::to_string(limits_.max_ground_atoms));
      }
      for (auto& [_, r] : keyed) out.push_back(std::move(r));
    }
    return Program(std::move(out));
  }

 private:
  // Possible atoms: heads derivable when negation is ignored.
  void saturate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& rule : program_.rules()) {
        for_each_instance(rule, [&](const Substitution& s) {
          Atom head = apply(rule.head, s);
          if (!within_depth(head)) return;
          if (possible_.insert(head).second) {
            by_predicate_[head.predicate].push_back(std::move(head));
            changed = true;
            if (possible_.size() > limits_.max_ground_atoms) {
              throw CapacityError("ground atoms exceed limit of " +
                                  std::to_string(limits_.max_ground_atoms));
            }
          }
        });
      }
    }
  }

  void for_each_instance(const Rule& rule, const std::function<void(const Substitution&)>& emit) {
    std::vector<const Atom*> positives;
    for (const auto& l : rule.body) {
      if (!l.negated()) positives.push_back(&l.atom);
    }
    Substitution subst;
    join(positives, 0, subst, emit);
  }

  void join(const std::vector<const Atom*>& positives, std::size_t i, const Substitution& subst,
            const std::function<void(const Substitution&)>& emit) {
    if (i == positives.size()) {
      emit(subst);
      return;
    }
    const Atom& pattern = *positives[i];
    auto it = by_predicate_.find(pattern.predicate);
    if (it == by_predicate_.end()) return;
    // Index-based: the candidate list may grow while saturating.
    const auto& candidates = it->second;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const Atom& cand = candidates[k];
      if (cand.args.size() != pattern.args.size()) continue;
      Substitution next = subst;
      bool ok = true;
      for (std::size_t j = 0; j < pattern.args.size() && ok; ++j) {
        ok = match(pattern.args[j], cand.args[j], next);
      }
      if (ok) join(positives, i + 1, next, emit);
    }
  }

  const Program& program_;
  GroundingLimits limits_;
  std::set<Atom> possible_;
  std::map<std::string, std::vector<Atom>> by_predicate_;
};

}  // namespace

Program ground_program(const Program& p, const GroundingLimits& limits) {
  return Grounder(p, limits).run();
}

}  // namespace ethmon::asp
