#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ethmon/asp/verdict.hpp"
#include "ethmon/engine/knowledge_base.hpp"
#include "ethmon/ilp/learner.hpp"
#include "json.hpp"

namespace ethmon::engine {

enum class CaseStatus { Evaluated, PendingLabel, Errored };
std::string_view to_string(CaseStatus s);

enum class SupervisorLabel { Ethical, Unethical };
std::string_view to_string(SupervisorLabel l);
/// "ethical" / "unethical", case-insensitive. Throws Error otherwise.
SupervisorLabel parse_label(std::string_view text);

struct CaseScenario {
  std::string case_id;
  std::string session_id;
  std::string question;
  std::string answer;
  std::vector<asp::Atom> facts;
  CaseStatus status = CaseStatus::Evaluated;
  std::optional<asp::Verdict> verdict;
  std::string error;
  std::string created_at;
  /// unethical(P) / ethical(P) for every answer(P) among the facts.
  std::vector<asp::Atom> candidate_targets;
  /// Pending without a reified answer to judge.
  bool flagged = false;
  /// A supervisor label was applied; Unknown re-evaluations do not requeue it.
  bool labeled = false;

  friend bool operator==(const CaseScenario&, const CaseScenario&) = default;
};

nlohmann::json to_json(const CaseScenario& c);
CaseScenario case_from_json(const nlohmann::json& j);

/// What the supervisor sees for a pending case: its facts plus the ontology
/// facts that mention one of its answers.
struct PendingEntry {
  std::string case_id;
  std::string session_id;
  std::vector<asp::Atom> facts;
  std::vector<asp::Atom> candidate_targets;
  bool flagged = false;
};

nlohmann::json to_json(const PendingEntry& p);

class UnknownCase : public Error {
 public:
  using Error::Error;
};

class NotPending : public Error {
 public:
  using Error::Error;
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

/// The learner refused; the case is now Errored with this diagnostic.
class LearningFailed : public Error {
 public:
  using Error::Error;
};

struct EvaluationLimits {
  asp::GroundingLimits grounding;
  asp::SolverLimits solving;
};

/// Grounds and solves kb ∪ facts and extracts the verdict. Pure.
/// Throws CapacityError, InconsistentVerdict, ArityError.
asp::Verdict evaluate_case(const std::vector<asp::Atom>& facts, const KnowledgeBase& kb,
                           const EvaluationLimits& limits = {});

/// kind is "verdict" or "kb_updated".
using EventSink = std::function<void(std::string_view kind, const nlohmann::json& body)>;

struct EngineOptions {
  ilp::LearnerOptions learner;
  /// Where generations and cases.jsonl are written; nothing is persisted when unset.
  std::optional<std::filesystem::path> state_dir;
};

struct LabelOutcome {
  CaseScenario case_after;
  KnowledgeBase kb;
  bool hypothesis_changed = false;
};

/// Single owner of the knowledge base, the case store and the example archive.
/// All methods are thread-safe; mutations are serialized.
class Engine {
 public:
  Engine(KnowledgeBase kb, std::vector<ilp::ModeDeclaration> modes, std::vector<ilp::LabeledExample> archive = {},
         EngineOptions options = {});

  /// Loads state_dir when it holds a saved generation, otherwise seeds from
  /// `seed_kb_dir`; restores state_dir/cases.jsonl if present.
  static std::unique_ptr<Engine> open(const std::filesystem::path& seed_kb_dir,
                                      std::vector<ilp::ModeDeclaration> modes, EngineOptions options);

  void set_event_sink(EventSink sink);

  KnowledgeBase kb() const;
  std::vector<ilp::LabeledExample> archive() const;
  const std::vector<ilp::ModeDeclaration>& modes() const { return modes_; }

  std::string allocate_case_id();

  /// Evaluates and stores a new case. Cases without facts stay Evaluated
  /// (Unknown); other Unknown cases enter the pending queue. Idempotent by case_id.
  CaseScenario submit_case(CaseScenario c);

  std::optional<CaseScenario> find_case(const std::string& case_id) const;
  std::vector<CaseScenario> cases() const;
  std::vector<PendingEntry> pending() const;

  /// Throws UnknownCase, NotPending, InvalidLabel, LearningFailed.
  LabelOutcome apply_supervisor_label(const std::string& case_id, SupervisorLabel label, const asp::Atom& target);

  /// Both re-evaluate every stored case when the KB actually changes.
  KnowledgeBase assert_fact(const asp::Atom& f);
  KnowledgeBase retract_fact(const asp::Atom& f);

 private:
  void evaluate_into(CaseScenario& c) const;
  void reevaluate_all();
  void persist_kb() const;
  void persist_cases() const;
  void emit_verdict(const CaseScenario& c) const;
  void emit_kb_updated(std::string_view reason, const nlohmann::json& detail) const;

  mutable std::mutex mu_;
  KnowledgeBase kb_;
  std::vector<ilp::ModeDeclaration> modes_;
  std::vector<ilp::LabeledExample> archive_;
  EngineOptions options_;
  std::vector<CaseScenario> cases_;
  std::map<std::string, std::size_t> index_;
  std::uint64_t next_case_ = 1;
  EventSink sink_;
};

}  // namespace ethmon::engine
