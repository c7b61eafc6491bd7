#include "ethmon/ilp/learner.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/parser.hpp"
#include "json.hpp"

namespace ethmon::ilp {

using asp::Atom;
using asp::Literal;
using asp::Program;
using asp::Rule;
using asp::Term;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Examples

std::string to_json_line(const LabeledExample& ex) {
  json facts = json::array();
  for (const auto& f : ex.case_facts) facts.push_back(asp::to_string(f));
  json j{{"facts", facts},
         {"target", asp::to_string(ex.target)},
         {"label", ex.label == Label::Positive ? "positive" : "negative"}};
  return j.dump();
}

LabeledExample example_from_json_line(std::string_view line) {
  try {
    json j = json::parse(line);
    LabeledExample ex;
    for (const auto& f : j.at("facts")) ex.case_facts.push_back(asp::parse_ground_atom(f.get<std::string>()));
    ex.target = asp::parse_ground_atom(j.at("target").get<std::string>());
    std::string label = j.at("label").get<std::string>();
    if (label == "positive") {
      ex.label = Label::Positive;
    } else if (label == "negative") {
      ex.label = Label::Negative;
    } else {
      throw Error("label must be \"positive\" or \"negative\", got \"" + label + "\"");
    }
    return ex;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed example record: ") + e.what());
  }
}

std::vector<LabeledExample> load_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read example archive " + path.string());
  std::vector<LabeledExample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(example_from_json_line(line));
  }
  return out;
}

std::string describe(const LabeledExample& ex) {
  std::string out = (ex.label == Label::Positive ? "positive " : "negative ") + asp::to_string(ex.target) + " given {";
  for (std::size_t i = 0; i < ex.case_facts.size(); ++i) {
    if (i) out += ", ";
    out += asp::to_string(ex.case_facts[i]);
  }
  return out + "}";
}

NoConsistentRule::NoConsistentRule(const LabeledExample& ex, const std::string& why)
    : Error("no consistent rule for " + describe(ex) + ": " + why), example_(ex) {}

NoConsistentRevision::NoConsistentRevision(const LabeledExample& ex, const std::string& why)
    : Error("no consistent revision for " + describe(ex) + ": " + why), example_(ex) {}

namespace {

std::vector<Rule> with_facts(const Program& kb, const std::vector<Atom>& facts) {
  std::vector<Rule> rules = kb.rules();
  for (const auto& f : facts) rules.push_back(Rule::fact(f));
  return rules;
}

// Atoms true in every stable model of the background (kb + case facts),
// ignoring rules that define the target predicate itself.
std::vector<Atom> background_truths(const LabeledExample& ex, const Program& kb, const LearnerOptions& options) {
  std::vector<Rule> rules;
  for (const auto& r : kb.rules()) {
    if (r.head.predicate != ex.target.predicate) rules.push_back(r);
  }
  for (const auto& f : ex.case_facts) rules.push_back(Rule::fact(f));
  Program g = asp::ground_program(Program(rules), options.grounding);
  auto models = asp::stable_models(g, options.solving);
  std::vector<Atom> out;
  if (models.empty()) {
    out = Program(rules).facts();
  } else {
    for (const auto& a : models.front()) {
      if (std::all_of(models.begin(), models.end(), [&](const asp::AnswerSet& m) { return m.contains(a); })) {
        out.push_back(a);
      }
    }
  }
  asp::sort_canonical(out);
  return out;
}

bool is_safe(const Rule& r) {
  try {
    asp::check_rule(r, 0);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Shortest-first search over subsets of `pool` appended to `base`.
std::optional<Rule> search_subsets(const Atom& head, const std::vector<Literal>& base,
                                   const std::vector<Literal>& pool, std::size_t cap,
                                   const std::vector<ModeDeclaration>& modes,
                                   const std::function<bool(const Rule&)>& accept) {
  const std::size_t n = pool.size();
  for (std::size_t k = 0; k <= std::min(cap, n); ++k) {
    std::vector<std::pair<std::string, Rule>> candidates;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      Rule r{head, base};
      for (std::size_t i : idx) r.body.push_back(pool[i]);
      if (is_safe(r) && conforms(r, modes)) candidates.emplace_back(asp::to_string(r), std::move(r));
      // next combination in lexicographic index order
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, r] : candidates) {
      if (accept(r)) return r;
    }
  }
  return std::nullopt;
}

bool covers_all(const std::vector<Rule>& rules, const std::vector<LabeledExample>& examples, const Program& kb,
                const LearnerOptions& options) {
  return std::all_of(examples.begin(), examples.end(),
                     [&](const LabeledExample& e) { return covers(rules, e, kb, options); });
}

bool covers_none(const std::vector<Rule>& rules, const std::vector<LabeledExample>& examples, const Program& kb,
                 const LearnerOptions& options) {
  return std::none_of(examples.begin(), examples.end(),
                      [&](const LabeledExample& e) { return covers(rules, e, kb, options); });
}

void split(const std::vector<LabeledExample>& all, std::vector<LabeledExample>& pos,
           std::vector<LabeledExample>& neg) {
  for (const auto& e : all) (e.label == Label::Positive ? pos : neg).push_back(e);
}

// Renames `r` so its head lines up with `head`; other variables get names
// that do not occur in bottom clauses (W1, W2, ...). nullopt if the heads differ.
std::optional<Rule> align_head(const Rule& r, const Atom& head) {
  if (r.head.predicate != head.predicate || r.head.arity() != head.arity()) return std::nullopt;
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < head.arity(); ++i) {
    const Term& mine = r.head.args[i];
    const Term& theirs = head.args[i];
    if (mine.is_variable() != theirs.is_variable()) return std::nullopt;
    if (!mine.is_variable()) {
      if (mine != theirs) return std::nullopt;
      continue;
    }
    auto [it, inserted] = names.emplace(mine.name(), theirs.name());
    if (!inserted && it->second != theirs.name()) return std::nullopt;
  }
  std::function<Term(const Term&)> rename = [&](const Term& t) -> Term {
    if (t.is_variable()) {
      auto it = names.find(t.name());
      if (it == names.end()) it = names.emplace(t.name(), "W" + std::to_string(names.size() + 1)).first;
      return Term::variable(it->second);
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename(a));
    return Term::compound(t.name(), std::move(args));
  };
  auto rename_atom = [&](const Atom& a) {
    Atom out{a.predicate, {}};
    for (const auto& t : a.args) out.args.push_back(rename(t));
    return out;
  };
  Rule out{rename_atom(r.head), {}};
  for (const auto& l : r.body) out.body.push_back({rename_atom(l.atom), l.sign});
  return out;
}

Hypothesis relearn_or_fail(const Hypothesis& h, const LabeledExample& new_example,
                           const std::vector<LabeledExample>& archive, const Program& kb,
                           const std::vector<ModeDeclaration>& modes, const LearnerOptions& options) {
  std::vector<LabeledExample> pos, neg;
  split(archive, pos, neg);
  (new_example.label == Label::Positive ? pos : neg).push_back(new_example);
  if (pos.empty()) {
    // Nothing to cover: the empty hypothesis is consistent with negatives only.
    return Hypothesis{{}, h.version + 1};
  }
  try {
    Hypothesis fresh = learn_rules(pos, neg, kb, modes, options);
    fresh.version = h.version + 1;
    return fresh;
  } catch (const NoConsistentRule& e) {
    throw NoConsistentRevision(new_example, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Bottom clause

Rule build_bottom_clause(const LabeledExample& ex, const Program& kb, const std::vector<ModeDeclaration>& modes,
                         int depth, const LearnerOptions& options) {
  const ModeDeclaration* head_mode = find_head_mode(modes, ex.target);
  if (!head_mode) throw NoHeadMode("no head mode for " + ex.target.predicate + "/" + std::to_string(ex.target.arity()));
  if (depth < 1) throw Error("bottom clause depth must be at least 1");

  std::map<Term, std::string> names;
  auto var_for = [&](const Term& t) {
    auto it = names.find(t);
    if (it == names.end()) it = names.emplace(t, "V" + std::to_string(names.size() + 1)).first;
    return Term::variable(it->second);
  };

  std::set<std::pair<Term, std::string>> known;
  Rule bottom{Atom{ex.target.predicate, {}}, {}};
  for (std::size_t i = 0; i < ex.target.arity(); ++i) {
    const Term& t = ex.target.args[i];
    const ArgMode& am = head_mode->args[i];
    if (am.placement == Placement::Constant) {
      bottom.head.args.push_back(t);
    } else {
      bottom.head.args.push_back(var_for(t));
      known.emplace(t, am.type);
    }
  }

  const std::vector<Atom> truths = background_truths(ex, kb, options);
  const std::set<Atom> truth_set(truths.begin(), truths.end());
  std::set<Literal> seen;

  for (int layer = 0; layer < depth; ++layer) {
    std::set<std::pair<Term, std::string>> fresh;
    for (const auto& m : modes) {
      if (m.kind != ModeKind::Body) continue;
      // (ground atom, negated) in canonical order, variabilized afterwards.
      std::vector<std::pair<Atom, bool>> found;
      for (const auto& a : truths) {
        if (a.predicate != m.predicate || a.arity() != m.args.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < a.arity() && ok; ++i) {
          if (m.args[i].placement == Placement::Input) ok = known.count({a.args[i], m.args[i].type}) != 0;
        }
        if (ok) found.emplace_back(a, false);
      }
      if (m.negatable) {
        std::vector<std::vector<Term>> choices(m.args.size());
        for (std::size_t i = 0; i < m.args.size(); ++i) {
          for (const auto& [t, type] : known) {
            if (type == m.args[i].type) choices[i].push_back(t);
          }
        }
        std::vector<Term> current;
        std::function<void(std::size_t)> expand = [&](std::size_t i) {
          if (i == choices.size()) {
            Atom a{m.predicate, current};
            if (!truth_set.count(a)) found.emplace_back(std::move(a), true);
            return;
          }
          for (const auto& t : choices[i]) {
            current.push_back(t);
            expand(i + 1);
            current.pop_back();
          }
        };
        expand(0);
      }
      std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        std::string xs = (x.second ? "not " : "") + asp::to_string(x.first);
        std::string ys = (y.second ? "not " : "") + asp::to_string(y.first);
        return xs < ys;
      });
      for (const auto& [a, negated] : found) {
        Atom lifted{a.predicate, {}};
        for (std::size_t i = 0; i < a.arity(); ++i) {
          if (m.args[i].placement == Placement::Constant) {
            lifted.args.push_back(a.args[i]);
          } else {
            lifted.args.push_back(var_for(a.args[i]));
            if (m.args[i].placement == Placement::Output) fresh.emplace(a.args[i], m.args[i].type);
          }
        }
        Literal lit{std::move(lifted), negated ? asp::Sign::DefaultNegated : asp::Sign::Positive};
        if (seen.insert(lit).second) bottom.body.push_back(std::move(lit));
      }
    }
    known.insert(fresh.begin(), fresh.end());
  }
  return bottom;
}

// ---------------------------------------------------------------------------
// Coverage

bool covers(const std::vector<Rule>& rules, const LabeledExample& ex, const Program& kb,
            const LearnerOptions& options) {
  std::vector<Rule> all = with_facts(kb, ex.case_facts);
  all.insert(all.end(), rules.begin(), rules.end());
  Program g = asp::ground_program(Program(std::move(all)), options.grounding);
  auto models = asp::stable_models(g, options.solving);
  return std::any_of(models.begin(), models.end(),
                     [&](const asp::AnswerSet& m) { return m.contains(ex.target); });
}

bool covers(const Rule& r, const LabeledExample& ex, const Program& kb, const LearnerOptions& options) {
  return covers(std::vector<Rule>{r}, ex, kb, options);
}

// ---------------------------------------------------------------------------
// Learning

Hypothesis learn_rules(const std::vector<LabeledExample>& positives, const std::vector<LabeledExample>& negatives,
                       const Program& kb, const std::vector<ModeDeclaration>& modes, const LearnerOptions& options) {
  if (positives.empty()) throw Error("learn_rules needs at least one positive example");
  std::vector<Rule> rules;
  if (covers_none(rules, negatives, kb, options) == false) {
    throw NoConsistentRule(negatives.front(), "background alone covers a negative example");
  }
  for (std::size_t round = 0; round <= positives.size(); ++round) {
    auto uncovered = std::find_if(positives.begin(), positives.end(),
                                  [&](const LabeledExample& p) { return !covers(rules, p, kb, options); });
    if (uncovered == positives.end()) return Hypothesis{rules, 1};

    std::vector<LabeledExample> kept;
    for (const auto& p : positives) {
      if (covers(rules, p, kb, options)) kept.push_back(p);
    }
    Rule bottom = build_bottom_clause(*uncovered, kb, modes, options.bottom_clause_depth, options);
    auto found = search_subsets(bottom.head, {}, bottom.body, options.body_length_cap, modes, [&](const Rule& r) {
      std::vector<Rule> next = rules;
      next.push_back(r);
      return covers(next, *uncovered, kb, options) && covers_all(next, kept, kb, options) &&
             covers_none(next, negatives, kb, options);
    });
    if (!found) {
      throw NoConsistentRule(*uncovered, "no subset of its bottom clause (" + asp::to_string(bottom) +
                                             ") separates it from the negatives");
    }
    rules.push_back(std::move(*found));
  }
  throw NoConsistentRule(positives.front(), "cover loop did not converge");
}

Hypothesis revise_hypothesis(const Hypothesis& h, const LabeledExample& new_example,
                             const std::vector<LabeledExample>& archive, const Program& kb,
                             const std::vector<ModeDeclaration>& modes, const LearnerOptions& options) {
  const bool positive = new_example.label == Label::Positive;
  if (covers(h.rules, new_example, kb, options) == positive) return h;

  std::vector<LabeledExample> pos, neg;
  split(archive, pos, neg);

  if (!positive) {
    for (std::size_t i = 0; i < h.rules.size(); ++i) {
      if (!covers(h.rules[i], new_example, kb, options)) continue;
      auto support = std::find_if(pos.begin(), pos.end(), [&](const LabeledExample& p) {
        return covers(h.rules[i], p, kb, options);
      });
      if (support == pos.end()) continue;
      Rule bottom = build_bottom_clause(*support, kb, modes, options.bottom_clause_depth, options);
      auto aligned = align_head(h.rules[i], bottom.head);
      if (!aligned) continue;
      std::vector<Literal> extras;
      for (const auto& l : bottom.body) {
        if (std::find(aligned->body.begin(), aligned->body.end(), l) == aligned->body.end()) extras.push_back(l);
      }
      std::vector<LabeledExample> all_neg = neg;
      all_neg.push_back(new_example);
      auto found = search_subsets(aligned->head, aligned->body, extras, options.body_length_cap, modes,
                                  [&](const Rule& r) {
                                    if (r.body.size() == aligned->body.size()) return false;
                                    std::vector<Rule> next = h.rules;
                                    next[i] = r;
                                    return covers_none(next, all_neg, kb, options) &&
                                           covers_all(next, pos, kb, options);
                                  });
      if (found) {
        Hypothesis revised = h;
        revised.rules[i] = std::move(*found);
        ++revised.version;
        return revised;
      }
    }
    return relearn_or_fail(h, new_example, archive, kb, modes, options);
  }

  Rule bottom = build_bottom_clause(new_example, kb, modes, options.bottom_clause_depth, options);
  auto found = search_subsets(bottom.head, {}, bottom.body, options.body_length_cap, modes, [&](const Rule& r) {
    std::vector<Rule> next = h.rules;
    next.push_back(r);
    return covers(next, new_example, kb, options) && covers_all(next, pos, kb, options) &&
           covers_none(next, neg, kb, options);
  });
  if (found) {
    Hypothesis revised = h;
    revised.rules.push_back(std::move(*found));
    ++revised.version;
    return revised;
  }
  return relearn_or_fail(h, new_example, archive, kb, modes, options);
}

}  // namespace ethmon::ilp
