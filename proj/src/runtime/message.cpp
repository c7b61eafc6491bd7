#include "ethmon/runtime/message.hpp"

#include <array>

namespace ethmon::runtime {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json atoms_json(const std::vector<asp::Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back(asp::to_string(a));
  return out;
}

struct Route {
  AgentRole sender;
  AgentRole recipient;
  std::string_view kind;
};

constexpr std::array<Route, 8> kRoutes{{
    {AgentRole::CA, AgentRole::ChA, "UserUtterance"},
    {AgentRole::ChA, AgentRole::CA, "AgentAnswer"},
    {AgentRole::ChA, AgentRole::TEA, "AgentAnswer"},
    {AgentRole::TEA, AgentRole::TATA, "ExtractedText"},
    {AgentRole::TATA, AgentRole::EEA, "TranslatedFacts"},
    {AgentRole::EEA, AgentRole::MA, "EvaluationResult"},
    {AgentRole::MA, AgentRole::ChA, "ViolationAlert"},
    {AgentRole::MA, AgentRole::Supervisor, "ViolationAlert"},
}};

}  // namespace

std::string_view to_string(AgentRole r) {
  switch (r) {
    case AgentRole::CA: return "CA";
    case AgentRole::ChA: return "ChA";
    case AgentRole::TEA: return "TEA";
    case AgentRole::TATA: return "TATA";
    case AgentRole::EEA: return "EEA";
    case AgentRole::MA: return "MA";
    case AgentRole::Supervisor: return "Supervisor";
  }
  return "Supervisor";
}

AgentRole parse_role(std::string_view s) {
  for (auto r : {AgentRole::CA, AgentRole::ChA, AgentRole::TEA, AgentRole::TATA, AgentRole::EEA, AgentRole::MA,
                 AgentRole::Supervisor}) {
    if (to_string(r) == s) return r;
  }
  throw Error("unknown agent role \"" + std::string(s) + "\"");
}

std::string_view payload_kind(const Payload& p) {
  static constexpr std::array<std::string_view, 7> kNames{"UserUtterance",    "AgentAnswer",    "ExtractedText",
                                                          "TranslatedFacts",  "EvaluationResult", "ViolationAlert",
                                                          "LabelRequest"};
  return kNames[p.index()];
}

bool is_routable(AgentRole sender, AgentRole recipient, std::string_view kind) {
  if (sender == AgentRole::MA && recipient == AgentRole::Supervisor && kind == "LabelRequest") return true;
  for (const auto& r : kRoutes) {
    if (r.sender == sender && r.recipient == recipient && r.kind == kind) return true;
  }
  return false;
}

json to_json(const Payload& p) {
  return std::visit(
      overloaded{
          [](const UserUtterance& u) { return json{{"text", u.text}}; },
          [](const AgentAnswer& a) { return json{{"text", a.text}, {"question", a.question}}; },
          [](const ExtractedText& e) {
            return json{{"turnRef", {{"caseId", e.turn.case_id}, {"question", e.turn.question}, {"answer", e.turn.answer}}},
                        {"text", e.text}};
          },
          [](const TranslatedFacts& t) {
            return json{{"caseId", t.case_id}, {"atoms", atoms_json(t.atoms)}, {"question", t.question},
                        {"answer", t.answer}};
          },
          [](const EvaluationResult& r) {
            json j{{"caseId", r.case_id}, {"status", r.status}};
            if (r.verdict) {
              j["verdict"] = asp::to_string(r.verdict->kind());
              j["record"] = asp::canonical_record(*r.verdict);
            } else {
              j["verdict"] = nullptr;
              j["error"] = r.error;
            }
            return j;
          },
          [](const ViolationAlert& a) {
            return json{{"caseId", a.case_id}, {"subject", asp::to_string(a.subject)},
                        {"justification", a.justification_text}};
          },
          [](const LabelRequest& l) {
            return json{{"caseId", l.case_id}, {"candidateTargets", atoms_json(l.candidate_targets)}};
          },
      },
      p);
}

json to_json(const AgentMessage& m) {
  return json{{"msgId", m.msg_id},
              {"sender", to_string(m.sender)},
              {"recipient", to_string(m.recipient)},
              {"sessionId", m.session_id},
              {"turnId", m.turn_id},
              {"kind", payload_kind(m.payload)},
              {"payload", to_json(m.payload)}};
}

}  // namespace ethmon::runtime
