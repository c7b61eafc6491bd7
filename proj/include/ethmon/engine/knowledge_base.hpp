#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ethmon/asp/program.hpp"
#include "ethmon/ilp/learner.hpp"

namespace ethmon::engine {

/// Immutable value. Every constructor validates that ontology + code rules +
/// learned rules form one signature-consistent Program.
class KnowledgeBase {
 public:
  KnowledgeBase();
  /// Throws ArityError on a signature clash, ConfigError if `ontology` holds a non-fact.
  KnowledgeBase(asp::Program ontology, asp::Program code_rules, ilp::Hypothesis learned, std::uint64_t version = 1);

  const asp::Program& ontology() const { return ontology_; }
  const asp::Program& code_rules() const { return code_rules_; }
  const ilp::Hypothesis& learned() const { return learned_; }
  std::uint64_t version() const { return version_; }

  /// ontology + code rules + learned rules.
  const asp::Program& program() const { return combined_; }
  /// ontology + code rules, what the learner sees as background.
  asp::Program background() const;

  bool has_fact(const asp::Atom& f) const;

  KnowledgeBase with_learned(ilp::Hypothesis h) const;
  KnowledgeBase bumped() const;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.version_ == b.version_ && a.ontology_ == b.ontology_ && a.code_rules_ == b.code_rules_ &&
           a.learned_ == b.learned_;
  }

 private:
  asp::Program ontology_;
  asp::Program code_rules_;
  ilp::Hypothesis learned_;
  std::uint64_t version_ = 1;
  asp::Program combined_;
};

/// Appends `f` to the ontology; returns `kb` itself when already present.
/// Throws ArityError, or Error if `f` is not ground.
KnowledgeBase assert_fact(const KnowledgeBase& kb, const asp::Atom& f);
/// No-op (same version) when `f` is absent.
KnowledgeBase retract_fact(const KnowledgeBase& kb, const asp::Atom& f);

/// File contents for one part: rules one per line, trailing newline when non-empty.
std::string render_part(const asp::Program& p);
std::string render_learned(const ilp::Hypothesis& h);

struct StoredState {
  KnowledgeBase kb;
  std::vector<ilp::LabeledExample> archive;
};

/// Reads `dir/CURRENT` -> `dir/gen-N/`, or flat files directly in `dir` when
/// there is no CURRENT. ontology.lp is required; code_rules.lp, learned.lp and
/// archive.jsonl are optional. Throws ConfigError.
StoredState load_state(const std::filesystem::path& dir);
bool has_saved_state(const std::filesystem::path& dir);

/// Writes a complete new generation, then flips CURRENT with one rename, so a
/// reader sees either the old or the new generation.
void save_state(const std::filesystem::path& dir, const KnowledgeBase& kb,
                const std::vector<ilp::LabeledExample>& archive);

}  // namespace ethmon::engine
