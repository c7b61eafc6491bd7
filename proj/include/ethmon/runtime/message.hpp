#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ethmon/asp/verdict.hpp"
#include "ethmon/errors.hpp"
#include "json.hpp"

namespace ethmon::runtime {

/// The six pipeline agents. Supervisor is the feed endpoint that receives
/// alerts and label requests; it is not an agent and has no mailbox thread.
enum class AgentRole { CA, ChA, TEA, TATA, EEA, MA, Supervisor };

std::string_view to_string(AgentRole r);
AgentRole parse_role(std::string_view s);

struct UserUtterance {
  std::string text;
};

struct AgentAnswer {
  std::string text;
  std::string question;  // the utterance being answered, for the extractor
};

struct TurnRef {
  std::string case_id;
  std::string question;
  std::string answer;
};

struct ExtractedText {
  TurnRef turn;
  std::string text;
};

struct TranslatedFacts {
  std::string case_id;
  std::vector<asp::Atom> atoms;
  std::string question;
  std::string answer;
};

struct EvaluationResult {
  std::string case_id;
  std::optional<asp::Verdict> verdict;
  std::string status;  // evaluated | pending | errored
  std::string error;
};

struct ViolationAlert {
  std::string case_id;
  asp::Atom subject;
  std::string justification_text;
};

struct LabelRequest {
  std::string case_id;
  std::vector<asp::Atom> candidate_targets;
};

using Payload = std::variant<UserUtterance, AgentAnswer, ExtractedText, TranslatedFacts, EvaluationResult,
                             ViolationAlert, LabelRequest>;

std::string_view payload_kind(const Payload& p);

struct AgentMessage {
  std::string msg_id;
  AgentRole sender;
  AgentRole recipient;
  std::string session_id;
  /// msg_id of the UserUtterance that started the turn.
  std::string turn_id;
  Payload payload;
};

nlohmann::json to_json(const Payload& p);
/// Envelope as written to the event log; `ts` is added by the log.
nlohmann::json to_json(const AgentMessage& m);

/// Whether (sender, recipient, payload kind) appears in the routing table.
bool is_routable(AgentRole sender, AgentRole recipient, std::string_view kind);

class RoutingError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace ethmon::runtime
