#include "ethmon/engine/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/grounder.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/engine/storage.hpp"

namespace ethmon::engine {

namespace fs = std::filesystem;
using asp::Atom;
using nlohmann::json;

namespace {

constexpr const char* kCasesFile = "cases.jsonl";

json atoms_json(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back(asp::to_string(a));
  return out;
}

std::vector<Atom> atoms_from(const json& j) {
  std::vector<Atom> out;
  for (const auto& item : j) out.push_back(asp::parse_ground_atom(item.get<std::string>()));
  return out;
}

CaseStatus status_from(std::string_view s) {
  if (s == "evaluated") return CaseStatus::Evaluated;
  if (s == "pending") return CaseStatus::PendingLabel;
  if (s == "errored") return CaseStatus::Errored;
  throw Error("unknown case status \"" + std::string(s) + "\"");
}

std::vector<Atom> answers_of(const std::vector<Atom>& facts) {
  std::vector<Atom> out;
  for (const auto& f : facts) {
    if (f.predicate == "answer" && f.arity() == 1) out.push_back(f);
  }
  return out;
}

std::vector<Atom> targets_for(const std::vector<Atom>& facts) {
  std::vector<Atom> out;
  for (const auto& a : answers_of(facts)) {
    out.push_back(Atom{std::string(asp::kUnethicalPredicate), {a.args[0]}});
    out.push_back(Atom{std::string(asp::kEthicalPredicate), {a.args[0]}});
  }
  return out;
}

bool mentions(const asp::Term& t, const asp::Term& needle) {
  if (t == needle) return true;
  return std::any_of(t.args().begin(), t.args().end(), [&](const asp::Term& a) { return mentions(a, needle); });
}

std::uint64_t case_number(const std::string& id) {
  if (id.rfind("case-", 0) != 0) return 0;
  try {
    return std::stoull(id.substr(5));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

std::string_view to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::Evaluated: return "evaluated";
    case CaseStatus::PendingLabel: return "pending";
    case CaseStatus::Errored: return "errored";
  }
  return "errored";
}

std::string_view to_string(SupervisorLabel l) { return l == SupervisorLabel::Ethical ? "ethical" : "unethical"; }

SupervisorLabel parse_label(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ethical") return SupervisorLabel::Ethical;
  if (lower == "unethical") return SupervisorLabel::Unethical;
  throw InvalidLabel("label must be \"ethical\" or \"unethical\", got \"" + std::string(text) + "\"");
}

json to_json(const CaseScenario& c) {
  json j{{"caseId", c.case_id},
         {"sessionId", c.session_id},
         {"question", c.question},
         {"answer", c.answer},
         {"facts", atoms_json(c.facts)},
         {"status", to_string(c.status)},
         {"createdAt", c.created_at},
         {"candidateTargets", atoms_json(c.candidate_targets)},
         {"flagged", c.flagged},
         {"labeled", c.labeled}};
  if (c.verdict) {
    j["verdict"] = asp::to_string(c.verdict->kind());
    j["record"] = asp::canonical_record(*c.verdict);
  } else {
    j["verdict"] = nullptr;
  }
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

CaseScenario case_from_json(const json& j) {
  try {
    CaseScenario c;
    c.case_id = j.at("caseId").get<std::string>();
    c.session_id = j.value("sessionId", "");
    c.question = j.value("question", "");
    c.answer = j.value("answer", "");
    c.facts = atoms_from(j.at("facts"));
    c.status = status_from(j.at("status").get<std::string>());
    c.created_at = j.value("createdAt", "");
    if (j.contains("candidateTargets")) c.candidate_targets = atoms_from(j.at("candidateTargets"));
    c.flagged = j.value("flagged", false);
    c.labeled = j.value("labeled", false);
    if (j.contains("record")) c.verdict = asp::verdict_from_record(j.at("record").get<std::string>());
    c.error = j.value("error", "");
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed case record: ") + e.what());
  }
}

json to_json(const PendingEntry& p) {
  return json{{"caseId", p.case_id},
              {"sessionId", p.session_id},
              {"facts", atoms_json(p.facts)},
              {"candidateTargets", atoms_json(p.candidate_targets)},
              {"flagged", p.flagged}};
}

asp::Verdict evaluate_case(const std::vector<Atom>& facts, const KnowledgeBase& kb, const EvaluationLimits& limits) {
  std::vector<asp::Rule> extra;
  for (const auto& f : facts) {
    if (!f.is_ground()) throw Error("case fact must be ground: " + asp::to_string(f));
    extra.push_back(asp::Rule::fact(f));
  }
  asp::Program g = asp::ground_program(kb.program().with_rules(extra), limits.grounding);
  return asp::extract_verdict(asp::stable_models(g, limits.solving), g);
}

Engine::Engine(KnowledgeBase kb, std::vector<ilp::ModeDeclaration> modes, std::vector<ilp::LabeledExample> archive,
               EngineOptions options)
    : kb_(std::move(kb)), modes_(std::move(modes)), archive_(std::move(archive)), options_(std::move(options)) {}

std::unique_ptr<Engine> Engine::open(const fs::path& seed_kb_dir, std::vector<ilp::ModeDeclaration> modes,
                                     EngineOptions options) {
  const bool saved = options.state_dir && has_saved_state(*options.state_dir);
  StoredState state = load_state(saved ? *options.state_dir : seed_kb_dir);
  auto engine = std::make_unique<Engine>(std::move(state.kb), std::move(modes), std::move(state.archive),
                                         std::move(options));
  if (!engine->options_.state_dir) return engine;
  const fs::path cases = *engine->options_.state_dir / kCasesFile;
  if (fs::exists(cases)) {
    std::istringstream in(read_file(cases));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      CaseScenario c;
      try {
        c = case_from_json(json::parse(line));
      } catch (const std::exception& e) {
        throw ConfigError(cases.string() + ": " + e.what());
      }
      engine->next_case_ = std::max(engine->next_case_, case_number(c.case_id) + 1);
      engine->index_[c.case_id] = engine->cases_.size();
      engine->cases_.push_back(std::move(c));
    }
    // The KB may be one generation ahead of the case file after a crash.
    for (auto& c : engine->cases_) engine->evaluate_into(c);
  }
  return engine;
}

void Engine::set_event_sink(EventSink sink) {
  std::lock_guard lock(mu_);
  sink_ = std::move(sink);
}

KnowledgeBase Engine::kb() const {
  std::lock_guard lock(mu_);
  return kb_;
}

std::vector<ilp::LabeledExample> Engine::archive() const {
  std::lock_guard lock(mu_);
  return archive_;
}

std::string Engine::allocate_case_id() {
  std::lock_guard lock(mu_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "case-%06llu", static_cast<unsigned long long>(next_case_++));
  return buf;
}

void Engine::evaluate_into(CaseScenario& c) const {
  EvaluationLimits limits{options_.learner.grounding, options_.learner.solving};
  c.candidate_targets = targets_for(c.facts);
  c.flagged = false;
  try {
    c.verdict = evaluate_case(c.facts, kb_, limits);
    c.error.clear();
  } catch (const Error& e) {
    c.verdict.reset();
    c.status = CaseStatus::Errored;
    c.error = e.what();
    return;
  }
  if (!c.verdict->is_unknown() || c.facts.empty() || c.labeled) {
    c.status = CaseStatus::Evaluated;
  } else {
    c.status = CaseStatus::PendingLabel;
    c.flagged = c.candidate_targets.empty();
  }
}

CaseScenario Engine::submit_case(CaseScenario c) {
  std::lock_guard lock(mu_);
  if (auto it = index_.find(c.case_id); it != index_.end()) return cases_[it->second];
  if (c.case_id.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "case-%06llu", static_cast<unsigned long long>(next_case_++));
    c.case_id = buf;
  }
  next_case_ = std::max(next_case_, case_number(c.case_id) + 1);
  if (c.created_at.empty()) c.created_at = iso_timestamp();
  asp::sort_canonical(c.facts);
  c.labeled = false;
  evaluate_into(c);
  index_[c.case_id] = cases_.size();
  cases_.push_back(c);
  persist_cases();
  emit_verdict(c);
  return c;
}

std::optional<CaseScenario> Engine::find_case(const std::string& case_id) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(case_id);
  if (it == index_.end()) return std::nullopt;
  return cases_[it->second];
}

std::vector<CaseScenario> Engine::cases() const {
  std::lock_guard lock(mu_);
  return cases_;
}

std::vector<PendingEntry> Engine::pending() const {
  std::lock_guard lock(mu_);
  std::vector<PendingEntry> out;
  for (const auto& c : cases_) {
    if (c.status != CaseStatus::PendingLabel) continue;
    PendingEntry p{c.case_id, c.session_id, c.facts, c.candidate_targets, c.flagged};
    for (const auto& answer : answers_of(c.facts)) {
      for (const auto& f : kb_.ontology().facts()) {
        bool related = std::any_of(f.args.begin(), f.args.end(),
                                   [&](const asp::Term& t) { return mentions(t, answer.args[0]); });
        if (related) p.facts.push_back(f);
      }
    }
    asp::sort_canonical(p.facts);
    out.push_back(std::move(p));
  }
  return out;
}

LabelOutcome Engine::apply_supervisor_label(const std::string& case_id, SupervisorLabel label, const Atom& target) {
  std::lock_guard lock(mu_);
  auto it = index_.find(case_id);
  if (it == index_.end()) throw UnknownCase("unknown case " + case_id);
  CaseScenario& c = cases_[it->second];
  if (c.status == CaseStatus::Evaluated) throw NotPending("case " + case_id + " is not awaiting a label");

  const bool verdict_target = target.arity() == 1 && (target.predicate == asp::kUnethicalPredicate ||
                                                      target.predicate == asp::kEthicalPredicate);
  if (!target.is_ground() || !verdict_target) {
    throw InvalidLabel("target must be a ground unethical(P) or ethical(P) atom, got " + asp::to_string(target));
  }
  const bool target_matches_label = target.predicate == to_string(label);
  ilp::LabeledExample ex{c.facts, target, target_matches_label ? ilp::Label::Positive : ilp::Label::Negative};

  ilp::Hypothesis next;
  try {
    if (!ilp::find_head_mode(modes_, target)) {
      throw ilp::NoHeadMode("no head mode for " + target.predicate + "/1");
    }
    next = ilp::revise_hypothesis(kb_.learned(), ex, archive_, kb_.background(), modes_, options_.learner);
  } catch (const Error& e) {
    c.status = CaseStatus::Errored;
    c.error = e.what();
    persist_cases();
    emit_verdict(c);
    throw LearningFailed(e.what());
  }

  const bool changed = next.rules != kb_.learned().rules;
  archive_.push_back(ex);
  kb_ = kb_.with_learned(std::move(next));
  c.labeled = true;
  persist_kb();
  emit_kb_updated("label", json{{"caseId", case_id}, {"label", to_string(label)}, {"target", asp::to_string(target)}});
  reevaluate_all();
  return LabelOutcome{cases_[index_.at(case_id)], kb_, changed};
}

KnowledgeBase Engine::assert_fact(const Atom& f) {
  std::lock_guard lock(mu_);
  KnowledgeBase next = engine::assert_fact(kb_, f);
  if (next.version() == kb_.version()) return kb_;
  kb_ = std::move(next);
  persist_kb();
  emit_kb_updated("assert", json{{"fact", asp::to_string(f)}});
  reevaluate_all();
  return kb_;
}

KnowledgeBase Engine::retract_fact(const Atom& f) {
  std::lock_guard lock(mu_);
  KnowledgeBase next = engine::retract_fact(kb_, f);
  if (next.version() == kb_.version()) return kb_;
  kb_ = std::move(next);
  persist_kb();
  emit_kb_updated("retract", json{{"fact", asp::to_string(f)}});
  reevaluate_all();
  return kb_;
}

void Engine::reevaluate_all() {
  for (auto& c : cases_) evaluate_into(c);
  persist_cases();
  for (const auto& c : cases_) emit_verdict(c);
}

void Engine::persist_kb() const {
  if (options_.state_dir) save_state(*options_.state_dir, kb_, archive_);
}

void Engine::persist_cases() const {
  if (!options_.state_dir) return;
  std::string lines;
  for (const auto& c : cases_) lines += to_json(c).dump() + "\n";
  fs::create_directories(*options_.state_dir);
  write_file_atomic(*options_.state_dir / kCasesFile, lines);
}

void Engine::emit_verdict(const CaseScenario& c) const {
  if (!sink_) return;
  json body{{"caseId", c.case_id},
            {"sessionId", c.session_id},
            {"status", to_string(c.status)},
            {"kbVersion", kb_.version()}};
  if (c.verdict) {
    body["verdict"] = asp::to_string(c.verdict->kind());
    body["record"] = asp::canonical_record(*c.verdict);
  } else {
    body["verdict"] = nullptr;
    body["error"] = c.error;
  }
  sink_("verdict", body);
}

void Engine::emit_kb_updated(std::string_view reason, const json& detail) const {
  if (!sink_) return;
  json body = detail;
  body["reason"] = reason;
  body["version"] = kb_.version();
  sink_("kb_updated", body);
}

}  // namespace ethmon::engine
