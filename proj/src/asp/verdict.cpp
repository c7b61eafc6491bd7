#include "ethmon/asp/verdict.hpp"

#include <algorithm>

#include "json.hpp"

#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/parser.hpp"

namespace ethmon::asp {

using nlohmann::json;

namespace {

bool is_verdict_atom(const Atom& a, std::string_view predicate) {
  return a.predicate == predicate && a.arity() == 1;
}

json atoms_json(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back(to_string(a));
  return out;
}

std::vector<Atom> atoms_from(const json& j) {
  std::vector<Atom> out;
  for (const auto& item : j) out.push_back(parse_ground_atom(item.get<std::string>()));
  return out;
}

}  // namespace

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Unethical:
      return "unethical";
    case VerdictKind::Ethical:
      return "ethical";
    case VerdictKind::Unknown:
      break;
  }
  return "unknown";
}

Verdict::Verdict(VerdictKind kind, Atom subject, Justification j, std::string reason)
    : kind_(kind), subject_(std::move(subject)), justification_(std::move(j)), reason_(std::move(reason)) {}

Verdict Verdict::unethical(Atom subject, Justification j) {
  if (j.steps.empty()) throw Error("unethical verdict requires a justification");
  return Verdict(VerdictKind::Unethical, std::move(subject), std::move(j), {});
}

Verdict Verdict::ethical(Atom subject, Justification j) {
  if (j.steps.empty()) throw Error("ethical verdict requires a justification");
  return Verdict(VerdictKind::Ethical, std::move(subject), std::move(j), {});
}

Verdict Verdict::unknown(std::string reason) {
  return Verdict(VerdictKind::Unknown, {}, {}, std::move(reason));
}

Verdict extract_verdict(const std::vector<AnswerSet>& models, const Program& g) {
  if (models.empty()) return Verdict::unknown(std::string(kReasonNoAnswerSet));

  for (const auto& m : models) {
    for (const auto& a : m) {
      if (!is_verdict_atom(a, kUnethicalPredicate)) continue;
      Atom twin{std::string(kEthicalPredicate), a.args};
      if (m.contains(twin)) {
        throw InconsistentVerdict("model derives both " + to_string(a) + " and " + to_string(twin));
      }
    }
  }

  for (const auto& m : models) {
    for (const auto& a : m) {
      if (is_verdict_atom(a, kUnethicalPredicate)) {
        return Verdict::unethical(term_to_atom(a.args[0]), justify(m, g, a));
      }
    }
  }

  for (const auto& a : models.front()) {
    if (!is_verdict_atom(a, kEthicalPredicate)) continue;
    bool everywhere = std::all_of(models.begin(), models.end(),
                                  [&](const AnswerSet& m) { return m.contains(a); });
    if (everywhere) return Verdict::ethical(term_to_atom(a.args[0]), justify(models.front(), g, a));
  }
  return Verdict::unknown(std::string(kReasonNoVerdictLiteral));
}

std::string canonical_record(const Verdict& v) {
  json j;
  j["verdict"] = std::string(to_string(v.kind()));
  if (v.is_unknown()) {
    j["reason"] = v.reason();
    return j.dump();
  }
  j["subject"] = to_string(v.subject());
  j["conclusion"] = to_string(v.justification().conclusion);
  json steps = json::array();
  for (const auto& s : v.justification().steps) {
    steps.push_back({{"rule", to_string(s.rule)},
                     {"supports", atoms_json(s.supporting_facts)},
                     {"assumptions", atoms_json(s.default_assumptions)}});
  }
  j["justification"] = std::move(steps);
  return j.dump();
}

Verdict verdict_from_record(std::string_view text) {
  try {
    json j = json::parse(text);
    std::string kind = j.at("verdict").get<std::string>();
    if (kind == "unknown") return Verdict::unknown(j.at("reason").get<std::string>());
    Justification just{parse_ground_atom(j.at("conclusion").get<std::string>()), {}};
    for (const auto& s : j.at("justification")) {
      just.steps.push_back({parse_rule(s.at("rule").get<std::string>()), atoms_from(s.at("supports")),
                            atoms_from(s.at("assumptions"))});
    }
    Atom subject = parse_ground_atom(j.at("subject").get<std::string>());
    if (kind == "unethical") return Verdict::unethical(std::move(subject), std::move(just));
    if (kind == "ethical") return Verdict::ethical(std::move(subject), std::move(just));
    throw Error("unknown verdict kind: " + kind);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed verdict record: ") + e.what());
  }
}

std::string to_text(const Verdict& v) {
  if (v.is_unknown()) return "unknown: " + v.reason() + "\n";
  return to_string(v.justification().conclusion) + "\njustification:\n" + to_string(v.justification());
}

}  // namespace ethmon::asp
