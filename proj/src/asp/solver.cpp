#include "ethmon/asp/solver.hpp"

#include <algorithm>
#include <map>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

AnswerSet::AnswerSet(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!a.is_ground()) throw Error("answer set member is not ground: " + to_string(a));
  }
  sort_canonical(atoms);
  ordered_ = std::move(atoms);
  members_.insert(ordered_.begin(), ordered_.end());
}

std::string to_string(const AnswerSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ", ";
    first = false;
    out += to_string(a);
  }
  out += '}';
  return out;
}

namespace {

void require_ground(const Program& g, const char* what) {
  if (!g.is_ground()) throw Error(std::string(what) + " requires a ground program");
}

struct IndexedRule {
  int head;
  std::vector<int> pos;
  std::vector<int> neg;
};

enum class Value : char { Unknown, In, Out };

class Search {
 public:
  Search(const Program& g, const SolverLimits& limits) : limits_(limits) {
    std::vector<Atom> all;
    for (const auto& r : g.rules()) {
      all.push_back(r.head);
      for (const auto& l : r.body) all.push_back(l.atom);
    }
    sort_canonical(all);
    atoms_ = all;
    std::map<Atom, int> ids;
    for (std::size_t i = 0; i < atoms_.size(); ++i) ids.emplace(atoms_[i], static_cast<int>(i));

    std::vector<char> negated(atoms_.size(), 0);
    for (const auto& r : g.rules()) {
      IndexedRule ir{ids.at(r.head), {}, {}};
      for (const auto& l : r.body) {
        int id = ids.at(l.atom);
        auto& side = l.negated() ? ir.neg : ir.pos;
        if (std::find(side.begin(), side.end(), id) == side.end()) side.push_back(id);
        if (l.negated()) negated[id] = 1;
      }
      rules_.push_back(std::move(ir));
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (negated[i]) neg_atoms_.push_back(static_cast<int>(i));
    }
    watchers_.resize(atoms_.size());
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      for (int a : rules_[r].pos) watchers_[a].push_back(static_cast<int>(r));
    }
  }

  std::vector<AnswerSet> run() {
    std::vector<Value> assignment(atoms_.size(), Value::Unknown);
    branch(assignment);
    std::vector<std::pair<std::string, AnswerSet>> keyed;
    for (auto& m : models_) keyed.emplace_back(to_string(m), std::move(m));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<AnswerSet> out;
    for (auto& [_, m] : keyed) out.push_back(std::move(m));
    return out;
  }

 private:
  void branch(std::vector<Value>& assignment) {
    if (++nodes_ > limits_.max_search_nodes) {
      throw CapacityError("stable model search exceeded " + std::to_string(limits_.max_search_nodes) +
                          " nodes");
    }
    std::vector<char> lower;
    if (!propagate(assignment, lower)) return;
    auto open = std::find_if(neg_atoms_.begin(), neg_atoms_.end(),
                             [&](int a) { return assignment[a] == Value::Unknown; });
    if (open == neg_atoms_.end()) {
      std::vector<Atom> members;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (lower[i]) members.push_back(atoms_[i]);
      }
      models_.emplace_back(std::move(members));
      return;
    }
    for (Value v : {Value::Out, Value::In}) {
      std::vector<Value> next = assignment;
      next[*open] = v;
      branch(next);
    }
  }

  // Tightens the assignment until the bounds stop changing; false on conflict.
  bool propagate(std::vector<Value>& assignment, std::vector<char>& lower) {
    for (;;) {
      lower = fixpoint(assignment, /*optimistic=*/false);
      std::vector<char> upper = fixpoint(assignment, /*optimistic=*/true);
      bool changed = false;
      for (int a : neg_atoms_) {
        switch (assignment[a]) {
          case Value::In:
            if (!upper[a]) return false;
            break;
          case Value::Out:
            if (lower[a]) return false;
            break;
          case Value::Unknown:
            if (lower[a]) {
              assignment[a] = Value::In;
              changed = true;
            } else if (!upper[a]) {
              assignment[a] = Value::Out;
              changed = true;
            }
            break;
        }
      }
      if (!changed) return true;
    }
  }

  // Least model of the rules enabled under the assignment. Pessimistic mode
  // enables a rule only if every negated atom is assumed out; optimistic mode
  // disables it only if some negated atom is assumed in.
  std::vector<char> fixpoint(const std::vector<Value>& assignment, bool optimistic) const {
    std::vector<char> derived(atoms_.size(), 0);
    std::vector<int> remaining(rules_.size(), 0);
    std::vector<int> queue;
    auto enabled = [&](const IndexedRule& r) {
      for (int n : r.neg) {
        if (optimistic ? assignment[n] == Value::In : assignment[n] != Value::Out) return false;
      }
      return true;
    };
    auto derive = [&](int atom) {
      if (!derived[atom]) {
        derived[atom] = 1;
        queue.push_back(atom);
      }
    };
    std::vector<char> active(rules_.size(), 0);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      active[r] = enabled(rules_[r]);
      remaining[r] = static_cast<int>(rules_[r].pos.size());
      if (active[r] && remaining[r] == 0) derive(rules_[r].head);
    }
    while (!queue.empty()) {
      int atom = queue.back();
      queue.pop_back();
      for (int r : watchers_[atom]) {
        if (--remaining[r] == 0 && active[r]) derive(rules_[r].head);
      }
    }
    return derived;
  }

  SolverLimits limits_;
  std::vector<Atom> atoms_;
  std::vector<IndexedRule> rules_;
  std::vector<int> neg_atoms_;
  std::vector<std::vector<int>> watchers_;
  std::vector<AnswerSet> models_;
  std::size_t nodes_ = 0;
};

}  // namespace

Program reduct(const Program& g, const AnswerSet& s) {
  require_ground(g, "reduct");
  std::vector<Rule> out;
  for (const auto& r : g.rules()) {
    bool blocked = std::any_of(r.body.begin(), r.body.end(),
                               [&](const Literal& l) { return l.negated() && s.contains(l.atom); });
    if (blocked) continue;
    Rule kept{r.head, {}};
    for (const auto& l : r.body) {
      if (!l.negated()) kept.body.push_back(l);
    }
    out.push_back(std::move(kept));
  }
  return Program(std::move(out));
}

AnswerSet least_model(const Program& g) {
  require_ground(g, "least_model");
  for (const auto& r : g.rules()) {
    for (const auto& l : r.body) {
      if (l.negated()) throw Error("least_model requires a negation-free program");
    }
  }
  std::set<Atom> model;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules()) {
      if (model.count(r.head)) continue;
      bool fires = std::all_of(r.body.begin(), r.body.end(),
                               [&](const Literal& l) { return model.count(l.atom) != 0; });
      if (fires) {
        model.insert(r.head);
        changed = true;
      }
    }
  }
  return AnswerSet(std::vector<Atom>(model.begin(), model.end()));
}

std::vector<AnswerSet> stable_models(const Program& g, const SolverLimits& limits) {
  require_ground(g, "stable_models");
  return Search(g, limits).run();
}

}  // namespace ethmon::asp
