#include <random>
#include <set>

#include "doctest.h"
#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/engine/engine.hpp"
#include "temp_dir.hpp"

using namespace ethmon;
using namespace ethmon::engine;
using asp::Atom;
using asp::parse_ground_atom;
using asp::parse_program;
using asp::parse_rule;

namespace {

const char* kModes =
    "modeh(unethical(+answer)).\n"
    "modeb(sensitiveSlogan(+answer)).\n"
    "modeb(answer(+answer)).\n"
    "modeb(relevant(+answer), negatable).\n";
const char* kOntology = "sensitiveSlogan(environmentally_friendly(productX)).\n";
const char* kPaperRule = "unethical(V1) :- sensitiveSlogan(V1), not relevant(V1), answer(V1).";
const std::string E = "environmentally_friendly(productX)";

KnowledgeBase paper_kb(bool with_rule) {
  ilp::Hypothesis h;
  if (with_rule) h = ilp::Hypothesis{parse_program(kPaperRule).rules(), 1};
  return KnowledgeBase(parse_program(kOntology), asp::Program{}, h);
}

std::vector<Atom> scenario_facts() {
  return {parse_ground_atom(E), parse_ground_atom("answer(" + E + ")")};
}

// Earlier supervisor decisions that rule out every shorter rule.
std::vector<ilp::LabeledExample> prior_negatives() {
  auto neg = [](std::vector<std::string> facts, const std::string& target) {
    ilp::LabeledExample ex;
    for (const auto& f : facts) ex.case_facts.push_back(parse_ground_atom(f));
    ex.target = parse_ground_atom(target);
    ex.label = ilp::Label::Negative;
    return ex;
  };
  return {neg({"answer(" + E + ")", "relevant(" + E + ")"}, "unethical(" + E + ")"),
          neg({"answer(cheap(productX))"}, "unethical(cheap(productX))"),
          neg({"answer(cheap(productX))"}, "unethical(" + E + ")")};
}

CaseScenario make_case(std::vector<Atom> facts, std::string id = "") {
  CaseScenario c;
  c.case_id = std::move(id);
  c.session_id = "s1";
  c.question = "what are the features of ProductX?";
  c.answer = "ProductX is environmentally friendly";
  c.facts = std::move(facts);
  return c;
}

std::set<std::string> body_set(const asp::Rule& r) {
  std::set<std::string> out;
  for (const auto& l : r.body) out.insert(asp::to_string(l));
  return out;
}

struct Recorder {
  std::vector<std::pair<std::string, nlohmann::json>> events;
  EventSink sink() {
    return [this](std::string_view kind, const nlohmann::json& body) { events.emplace_back(kind, body); };
  }
  std::size_t count(const std::string& kind) const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.first == kind;
    return n;
  }
};

}  // namespace

TEST_CASE("scenario evaluates to the cited rule instance") {
  auto v = evaluate_case(scenario_facts(), paper_kb(true));
  REQUIRE(v.kind() == asp::VerdictKind::Unethical);
  CHECK(asp::to_string(v.subject()) == E);
  REQUIRE(v.justification().steps.size() == 1);
  const auto& step = v.justification().steps[0];
  CHECK(asp::to_string(step.rule) ==
        "unethical(" + E + ") :- sensitiveSlogan(" + E + "), not relevant(" + E + "), answer(" + E + ").");
  CHECK(step.default_assumptions == std::vector<Atom>{parse_ground_atom("relevant(" + E + ")")});
}

TEST_CASE("assert and retract flip the verdict") {
  auto kb = paper_kb(true);
  auto relevant = parse_ground_atom("relevant(" + E + ")");
  auto with = assert_fact(kb, relevant);
  CHECK(with.version() == kb.version() + 1);
  CHECK(with.has_fact(relevant));
  CHECK(evaluate_case(scenario_facts(), with).is_unknown());
  CHECK(evaluate_case(scenario_facts(), with).reason() == asp::kReasonNoVerdictLiteral);

  auto again = assert_fact(with, relevant);
  CHECK(again == with);

  auto without = retract_fact(with, relevant);
  CHECK(without.version() == with.version() + 1);
  CHECK(evaluate_case(scenario_facts(), without).kind() == asp::VerdictKind::Unethical);
  CHECK(render_part(without.ontology()) == render_part(kb.ontology()));
  CHECK(without.ontology() == kb.ontology());
  CHECK(retract_fact(without, relevant) == without);

  CHECK_THROWS_AS(assert_fact(kb, parse_ground_atom("relevant(x, y)")), asp::ArityError);
  CHECK_THROWS_AS(assert_fact(kb, parse_ground_atom("sensitiveSlogan(x, y)")), asp::ArityError);
}

TEST_CASE("kb without the learned rule cannot judge") {
  auto v = evaluate_case(scenario_facts(), paper_kb(false));
  CHECK(v.is_unknown());
  CHECK(v.reason() == asp::kReasonNoVerdictLiteral);
  CHECK(evaluate_case({}, paper_kb(true)).is_unknown());
}

TEST_CASE("evaluation does not depend on anything but facts and kb") {
  auto kb = paper_kb(true);
  auto first = evaluate_case(scenario_facts(), kb);
  auto reversed = scenario_facts();
  std::reverse(reversed.begin(), reversed.end());
  CHECK(evaluate_case(reversed, kb) == first);
  CHECK(canonical_record(evaluate_case(scenario_facts(), kb)) == canonical_record(first));
}

TEST_CASE("kb rejects non-facts in the ontology and signature clashes") {
  CHECK_THROWS_AS(KnowledgeBase(parse_program("p(X) :- q(X)."), asp::Program{}, {}), ConfigError);
  CHECK_THROWS_AS(KnowledgeBase(parse_program("answer(a, b)."), asp::Program{},
                                ilp::Hypothesis{parse_program(kPaperRule).rules(), 1}),
                  asp::ArityError);
}

TEST_CASE("unknown cases are queued for the supervisor") {
  Engine engine(paper_kb(false), ilp::parse_modes(kModes));
  Recorder rec;
  engine.set_event_sink(rec.sink());

  auto c = engine.submit_case(make_case(scenario_facts()));
  CHECK(c.status == CaseStatus::PendingLabel);
  CHECK(c.case_id == "case-000001");
  CHECK_FALSE(c.flagged);
  CHECK(c.candidate_targets ==
        std::vector<Atom>{parse_ground_atom("unethical(" + E + ")"), parse_ground_atom("ethical(" + E + ")")});

  auto queue = engine.pending();
  REQUIRE(queue.size() == 1);
  CHECK(queue[0].case_id == c.case_id);
  std::set<std::string> facts;
  for (const auto& f : queue[0].facts) facts.insert(asp::to_string(f));
  CHECK(facts == std::set<std::string>{"sensitiveSlogan(" + E + ")", "answer(" + E + ")", E});

  // Same id again: still one entry.
  engine.submit_case(make_case(scenario_facts(), c.case_id));
  CHECK(engine.pending().size() == 1);
  CHECK(engine.cases().size() == 1);

  auto flagged = engine.submit_case(make_case({parse_ground_atom("question(features, productX)")}));
  CHECK(flagged.status == CaseStatus::PendingLabel);
  CHECK(flagged.flagged);
  CHECK(flagged.candidate_targets.empty());

  auto chit_chat = engine.submit_case(make_case({}));
  CHECK(chit_chat.status == CaseStatus::Evaluated);
  CHECK(chit_chat.verdict->is_unknown());
  CHECK(engine.pending().size() == 2);
  CHECK(rec.count("verdict") == 3);
}

TEST_CASE("supervisor label learns the rule and re-evaluates") {
  Engine engine(paper_kb(false), ilp::parse_modes(kModes), prior_negatives());
  Recorder rec;
  engine.set_event_sink(rec.sink());
  auto c = engine.submit_case(make_case(scenario_facts()));
  const auto version = engine.kb().version();

  auto out = engine.apply_supervisor_label(c.case_id, SupervisorLabel::Unethical,
                                           parse_ground_atom("unethical(" + E + ")"));
  CHECK(out.hypothesis_changed);
  CHECK(out.kb.version() == version + 1);
  REQUIRE(out.kb.learned().rules.size() == 1);
  const auto& rule = out.kb.learned().rules[0];
  const auto paper = asp::parse_rule(kPaperRule);
  CHECK(rule.head == paper.head);
  CHECK(body_set(rule) == body_set(paper));
  CHECK(out.case_after.status == CaseStatus::Evaluated);
  REQUIRE(out.case_after.verdict);
  CHECK(out.case_after.verdict->kind() == asp::VerdictKind::Unethical);
  CHECK(engine.archive().size() == 4);
  CHECK(engine.pending().empty());
  CHECK(rec.count("kb_updated") == 1);

  CHECK_THROWS_AS(engine.apply_supervisor_label(c.case_id, SupervisorLabel::Unethical,
                                                parse_ground_atom("unethical(" + E + ")")),
                  NotPending);
  CHECK_THROWS_AS(engine.apply_supervisor_label("case-999", SupervisorLabel::Unethical,
                                                parse_ground_atom("unethical(" + E + ")")),
                  UnknownCase);
}

TEST_CASE("negative label on a pending case is a no-op for the hypothesis") {
  Engine engine(paper_kb(false), ilp::parse_modes(kModes));
  auto c = engine.submit_case(make_case(scenario_facts()));
  auto before = engine.kb();
  auto out = engine.apply_supervisor_label(c.case_id, SupervisorLabel::Ethical,
                                           parse_ground_atom("unethical(" + E + ")"));
  CHECK_FALSE(out.hypothesis_changed);
  CHECK(out.kb.version() == before.version() + 1);
  CHECK(out.kb.learned().rules == before.learned().rules);
  CHECK(engine.archive().size() == 1);
  CHECK(engine.archive()[0].label == ilp::Label::Negative);
  CHECK(out.case_after.status == CaseStatus::Evaluated);
  CHECK(out.case_after.verdict->is_unknown());
  CHECK(engine.pending().empty());
}

TEST_CASE("label without a head mode errors the case, which can be relabelled") {
  Engine engine(paper_kb(false), ilp::parse_modes(kModes));
  Recorder rec;
  engine.set_event_sink(rec.sink());
  auto c = engine.submit_case(make_case(scenario_facts()));
  CHECK_THROWS_AS(engine.apply_supervisor_label(c.case_id, SupervisorLabel::Ethical,
                                                parse_ground_atom("ethical(" + E + ")")),
                  LearningFailed);
  auto errored = engine.find_case(c.case_id);
  REQUIRE(errored);
  CHECK(errored->status == CaseStatus::Errored);
  CHECK(errored->error.find("no head mode") != std::string::npos);
  CHECK(engine.archive().empty());
  CHECK(rec.events.back().second["status"] == "errored");

  CHECK_THROWS_AS(engine.apply_supervisor_label(c.case_id, SupervisorLabel::Unethical, parse_ground_atom("p(a)")),
                  InvalidLabel);
  auto out = engine.apply_supervisor_label(c.case_id, SupervisorLabel::Unethical,
                                           parse_ground_atom("unethical(" + E + ")"));
  CHECK(out.case_after.verdict->kind() == asp::VerdictKind::Unethical);
}

TEST_CASE("engine facts re-evaluate stored cases") {
  Engine engine(paper_kb(true), ilp::parse_modes(kModes));
  Recorder rec;
  engine.set_event_sink(rec.sink());
  auto c = engine.submit_case(make_case(scenario_facts()));
  CHECK(c.verdict->kind() == asp::VerdictKind::Unethical);
  auto relevant = parse_ground_atom("relevant(" + E + ")");

  engine.assert_fact(relevant);
  auto after = engine.find_case(c.case_id);
  CHECK(after->verdict->is_unknown());
  CHECK(after->status == CaseStatus::PendingLabel);
  auto v = engine.kb().version();
  engine.assert_fact(relevant);
  CHECK(engine.kb().version() == v);

  engine.retract_fact(relevant);
  CHECK(engine.find_case(c.case_id)->verdict->kind() == asp::VerdictKind::Unethical);
  // verdict on submit, assert, retract; the duplicate assert changes nothing.
  CHECK(rec.count("verdict") == 3);
  CHECK(rec.count("kb_updated") == 2);
}

TEST_CASE("archive stays consistent across a labelling session") {
  // Labels come from the hand rule; each successful label must leave the
  // hypothesis covering every archived positive and no archived negative.
  Engine engine(KnowledgeBase(parse_program("sensitiveSlogan(environmentally_friendly(productX)).\n"
                                            "sensitiveSlogan(organic(productX)).\n"),
                              asp::Program{}, {}),
                ilp::parse_modes(kModes), prior_negatives());
  const auto oracle_kb = KnowledgeBase(engine.kb().ontology(), asp::Program{},
                                       ilp::Hypothesis{parse_program(kPaperRule).rules(), 1});
  const std::vector<std::string> answers{E, "organic(productX)", "cheap(productX)"};
  std::mt19937 rng(3);
  int labelled = 0;
  for (int i = 0; i < 25; ++i) {
    const std::string a = answers[rng() % answers.size()];
    std::vector<Atom> facts{parse_ground_atom("answer(" + a + ")")};
    if (rng() % 3 == 0) facts.push_back(parse_ground_atom("relevant(" + a + ")"));
    auto c = engine.submit_case(make_case(facts));
    if (c.status != CaseStatus::PendingLabel) continue;
    auto target = parse_ground_atom("unethical(" + a + ")");
    bool truth = evaluate_case(facts, oracle_kb).kind() == asp::VerdictKind::Unethical;
    auto out = engine.apply_supervisor_label(c.case_id, truth ? SupervisorLabel::Unethical : SupervisorLabel::Ethical,
                                             target);
    ++labelled;
    if (truth) REQUIRE_FALSE(out.case_after.verdict->is_unknown());
    auto kb = engine.kb();
    for (const auto& ex : engine.archive()) {
      bool covered = ilp::covers(kb.learned().rules, ex, kb.background());
      REQUIRE(covered == (ex.label == ilp::Label::Positive));
    }
  }
  CHECK(labelled >= 3);
}

TEST_CASE("engine state survives a restart") {
  testing_support::TempDir dir;
  testing_support::write_text(dir / "seed/ontology.lp", kOntology);
  EngineOptions options;
  options.state_dir = dir / "state";
  std::string case_id;
  KnowledgeBase saved;
  {
    auto engine = Engine::open(dir / "seed", ilp::parse_modes(kModes), options);
    auto c = engine->submit_case(make_case(scenario_facts()));
    case_id = c.case_id;
    engine->apply_supervisor_label(c.case_id, SupervisorLabel::Unethical, parse_ground_atom("unethical(" + E + ")"));
    engine->submit_case(make_case({}));
    saved = engine->kb();
  }
  auto engine = Engine::open(dir / "seed", ilp::parse_modes(kModes), options);
  CHECK(engine->kb() == saved);
  CHECK(engine->archive().size() == 1);
  REQUIRE(engine->cases().size() == 2);
  CHECK(engine->find_case(case_id)->verdict->kind() == asp::VerdictKind::Unethical);
  CHECK(engine->find_case(case_id)->labeled);
  CHECK(engine->allocate_case_id() == "case-000003");

  CHECK_THROWS_AS(Engine::open(dir / "nowhere", ilp::parse_modes(kModes), {}), ConfigError);
}

TEST_CASE("case records round trip through json") {
  Engine engine(paper_kb(true), ilp::parse_modes(kModes));
  auto c = engine.submit_case(make_case(scenario_facts()));
  CHECK(case_from_json(to_json(c)) == c);
  CHECK(parse_label("Unethical") == SupervisorLabel::Unethical);
  CHECK_THROWS_AS(parse_label("meh"), InvalidLabel);
}
