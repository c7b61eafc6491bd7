#include "ethmon/asp/justification.hpp"

#include <map>
#include <set>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

// For every atom of s, the first rule (in program order) that derives it at
// the earliest round of the reduct's fixpoint.
std::map<Atom, const Rule*> first_derivations(const AnswerSet& s, const Program& g) {
  std::map<Atom, const Rule*> support;
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Atom, const Rule*> round;
    for (const auto& r : g.rules()) {
      if (support.count(r.head) || round.count(r.head) || !s.contains(r.head)) continue;
      bool fires = true;
      for (const auto& l : r.body) {
        if (l.negated() ? s.contains(l.atom) : support.count(l.atom) == 0) {
          fires = false;
          break;
        }
      }
      if (fires) round.emplace(r.head, &r);
    }
    if (!round.empty()) {
      support.merge(round);
      changed = true;
    }
  }
  return support;
}

void collect(const Atom& a, const std::map<Atom, const Rule*>& support, std::set<Atom>& done,
             std::vector<JustificationStep>& steps) {
  if (done.count(a)) return;
  done.insert(a);
  const Rule& r = *support.at(a);
  JustificationStep step{r, {}, {}};
  for (const auto& l : r.body) {
    if (l.negated()) {
      step.default_assumptions.push_back(l.atom);
      continue;
    }
    step.supporting_facts.push_back(l.atom);
    if (!support.at(l.atom)->is_fact()) collect(l.atom, support, done, steps);
  }
  sort_canonical(step.supporting_facts);
  sort_canonical(step.default_assumptions);
  steps.push_back(std::move(step));
}

}  // namespace

Justification justify(const AnswerSet& s, const Program& g, const Atom& a) {
  if (!s.contains(a)) throw NotDerived(to_string(a) + " is not in the answer set");
  auto support = first_derivations(s, g);
  if (!support.count(a)) throw NotDerived(to_string(a) + " has no derivation under the answer set");
  Justification j{a, {}};
  std::set<Atom> done;
  collect(a, support, done, j.steps);
  return j;
}

std::string to_string(const Justification& j) {
  auto join = [](const std::vector<Atom>& atoms, const char* prefix) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i) out += ", ";
      out += prefix + to_string(atoms[i]);
    }
    return out;
  };
  std::string out;
  for (const auto& step : j.steps) {
    out += "  " + to_string(step.rule) + "\n";
    if (!step.supporting_facts.empty()) out += "    because " + join(step.supporting_facts, "") + "\n";
    if (!step.default_assumptions.empty()) {
      out += "    assuming " + join(step.default_assumptions, "not ") + "\n";
    }
  }
  return out;
}

}  // namespace ethmon::asp
