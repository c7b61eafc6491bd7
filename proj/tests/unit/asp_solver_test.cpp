#include <random>

#include "doctest.h"
#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/grounder.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/asp/solver.hpp"
#include "oracles.hpp"

using namespace ethmon::asp;

namespace {

AnswerSet set_of(std::initializer_list<const char*> atoms) {
  std::vector<Atom> v;
  for (const char* a : atoms) v.push_back(parse_ground_atom(a));
  return AnswerSet(v);
}

const char* kScenario =
    "sensitiveSlogan(environmentally_friendly(productX)).\n"
    "answer(environmentally_friendly(productX)).\n"
    "unethical(V) :- sensitiveSlogan(V), not relevant(V), answer(V).\n";

}  // namespace

TEST_CASE("reduct follows the definition") {
  Program g = parse_program("p :- not q.\nq :- not p.");
  CHECK(print_program(reduct(g, set_of({"p"}))) == "p.");
  CHECK(reduct(g, set_of({"p", "q"})).empty());
  CHECK(print_program(reduct(g, set_of({}))) == "p.\nq.");
}

TEST_CASE("reduct of the ground scenario strips the default assumption") {
  Program g = ground_program(parse_program(kScenario));
  auto s = set_of({"sensitiveSlogan(environmentally_friendly(productX))",
                   "answer(environmentally_friendly(productX))",
                   "unethical(environmentally_friendly(productX))"});
  CHECK(print_program(reduct(g, s)) ==
        "sensitiveSlogan(environmentally_friendly(productX)).\n"
        "answer(environmentally_friendly(productX)).\n"
        "unethical(environmentally_friendly(productX)) :- "
        "sensitiveSlogan(environmentally_friendly(productX)), answer(environmentally_friendly(productX)).");
}

TEST_CASE("least model") {
  CHECK(least_model(parse_program("p.\nq :- p.")) == set_of({"p", "q"}));
  CHECK(least_model(Program{}).empty());
  CHECK_THROWS_AS(least_model(parse_program("p :- not q.")), ethmon::Error);
  CHECK_THROWS_AS(least_model(parse_program("p(X) :- q(X).")), ethmon::Error);
}

TEST_CASE("least model agrees with subset-minimal search") {
  std::mt19937 rng(7);
  oracle::GroundProgramShape shape;
  shape.allow_negation = false;
  for (int i = 0; i < 300; ++i) {
    Program g = oracle::random_ground_program(rng, shape);
    REQUIRE_MESSAGE(least_model(g) == oracle::brute_force_minimal_model(g), print_program(g));
  }
}

TEST_CASE("scenario has a single model containing the violation") {
  Program g = ground_program(parse_program(kScenario));
  auto models = stable_models(g);
  REQUIRE(models.size() == 1);
  CHECK(models[0] == set_of({"sensitiveSlogan(environmentally_friendly(productX))",
                             "answer(environmentally_friendly(productX))",
                             "unethical(environmentally_friendly(productX))"}));
}

TEST_CASE("relevance fact withdraws the violation") {
  std::string text = std::string(kScenario) + "relevant(environmentally_friendly(productX)).\n";
  auto models = stable_models(ground_program(parse_program(text)));
  REQUIRE(models.size() == 1);
  CHECK_FALSE(models[0].contains(parse_ground_atom("unethical(environmentally_friendly(productX))")));
  CHECK(models[0].contains(parse_ground_atom("relevant(environmentally_friendly(productX))")));
}

TEST_CASE("even loop has two models, odd loop none") {
  auto models = stable_models(parse_program("p :- not q.\nq :- not p."));
  REQUIRE(models.size() == 2);
  CHECK(models[0] == set_of({"p"}));
  CHECK(models[1] == set_of({"q"}));
  CHECK(stable_models(parse_program("p :- not p.")).empty());
  CHECK(stable_models(Program{}).size() == 1);
}

TEST_CASE("stable models match brute force on random ground programs") {
  std::mt19937 rng(424242);
  for (int i = 0; i < 400; ++i) {
    Program g = oracle::random_ground_program(rng, {});
    REQUIRE_MESSAGE(stable_models(g) == oracle::brute_force_stable_models(g), print_program(g));
  }
}

TEST_CASE("every model atom is supported") {
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    Program g = oracle::random_ground_program(rng, {});
    for (const auto& m : stable_models(g)) {
      for (const auto& a : m) {
        bool supported = std::any_of(g.rules().begin(), g.rules().end(), [&](const Rule& r) {
          return r.head == a && std::all_of(r.body.begin(), r.body.end(), [&](const Literal& l) {
                   return l.negated() != m.contains(l.atom);
                 });
        });
        REQUIRE(supported);
      }
    }
  }
}

TEST_CASE("search limit raises CapacityError") {
  std::string text;
  for (int i = 0; i < 12; ++i) {
    text += "a" + std::to_string(i) + " :- not b" + std::to_string(i) + ".\n";
    text += "b" + std::to_string(i) + " :- not a" + std::to_string(i) + ".\n";
  }
  Program g = parse_program(text);
  CHECK(stable_models(g).size() == 4096);
  CHECK_THROWS_AS(stable_models(g, SolverLimits{100}), CapacityError);
}

TEST_CASE("non-ground input is refused") {
  CHECK_THROWS_AS(stable_models(parse_program("p(X) :- q(X).")), ethmon::Error);
  CHECK_THROWS_AS(AnswerSet({parse_atom("p(X)")}), ethmon::Error);
}
