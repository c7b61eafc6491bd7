#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ethmon/asp/grounder.hpp"
#include "ethmon/asp/program.hpp"
#include "ethmon/asp/solver.hpp"
#include "ethmon/errors.hpp"
#include "ethmon/ilp/modes.hpp"

namespace ethmon::ilp {

enum class Label { Positive, Negative };

struct LabeledExample {
  std::vector<asp::Atom> case_facts;
  asp::Atom target;
  Label label = Label::Positive;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// `{"facts":[...],"label":"positive","target":"unethical(...)"}`
std::string to_json_line(const LabeledExample& ex);
LabeledExample example_from_json_line(std::string_view line);
std::vector<LabeledExample> load_archive(const std::filesystem::path& path);
std::string describe(const LabeledExample& ex);

struct Hypothesis {
  std::vector<asp::Rule> rules;
  std::uint64_t version = 0;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct LearnerOptions {
  int bottom_clause_depth = 2;
  std::size_t body_length_cap = 4;
  asp::GroundingLimits grounding;
  asp::SolverLimits solving;
};

class NoHeadMode : public Error {
 public:
  using Error::Error;
};

class NoConsistentRule : public Error {
 public:
  NoConsistentRule(const LabeledExample& ex, const std::string& why);
  const LabeledExample& example() const { return example_; }

 private:
  LabeledExample example_;
};

class NoConsistentRevision : public Error {
 public:
  NoConsistentRevision(const LabeledExample& ex, const std::string& why);
  const LabeledExample& example() const { return example_; }

 private:
  LabeledExample example_;
};

/// Most specific mode-conforming clause for a positive example. Head terms
/// become V1, V2, ... in order of appearance; body literals are collected
/// layer by layer (each layer may use terms introduced by earlier ones),
/// ordered by mode declaration and then canonical text. Negatable modes
/// contribute `not p(...)` for every input combination absent from the
/// background truths.
asp::Rule build_bottom_clause(const LabeledExample& ex, const asp::Program& kb,
                              const std::vector<ModeDeclaration>& modes, int depth,
                              const LearnerOptions& options = {});

/// True iff ex.target is in some stable model of kb + ex.case_facts + rules.
bool covers(const std::vector<asp::Rule>& rules, const LabeledExample& ex, const asp::Program& kb,
            const LearnerOptions& options = {});
bool covers(const asp::Rule& r, const LabeledExample& ex, const asp::Program& kb,
            const LearnerOptions& options = {});

/// Cover loop with shortest-first search over bottom-clause subsets.
/// The result covers every positive and no negative; version is 1.
Hypothesis learn_rules(const std::vector<LabeledExample>& positives, const std::vector<LabeledExample>& negatives,
                       const asp::Program& kb, const std::vector<ModeDeclaration>& modes,
                       const LearnerOptions& options = {});

/// Incremental revision against one new example. Unchanged (same version)
/// when `h` already classifies it; otherwise specializes the offending rule
/// or adds a rule, falling back to relearning over archive + new example.
Hypothesis revise_hypothesis(const Hypothesis& h, const LabeledExample& new_example,
                             const std::vector<LabeledExample>& archive, const asp::Program& kb,
                             const std::vector<ModeDeclaration>& modes, const LearnerOptions& options = {});

}  // namespace ethmon::ilp
