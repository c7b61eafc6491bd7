#pragma once
// Reads an event log back and checks the per-case message order.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace log_checks {

struct CaseTrace {
  long extracted = -1;
  long translated = -1;
  long evaluated = -1;
  std::vector<long> alerts;
  std::string verdict;
  std::string session;
};

inline std::map<std::string, CaseTrace> traces(const std::vector<nlohmann::json>& entries) {
  std::map<std::string, CaseTrace> out;
  for (const auto& e : entries) {
    if (e.value("entry", "") != "message") continue;
    const std::string kind = e.at("kind");
    const auto& p = e.at("payload");
    long seq = e.at("logSeq").get<long>();
    if (kind == "ExtractedText") {
      auto& t = out[p.at("turnRef").at("caseId").get<std::string>()];
      if (t.extracted < 0) t.extracted = seq;
      t.session = e.at("sessionId");
    } else if (kind == "TranslatedFacts") {
      auto& t = out[p.at("caseId").get<std::string>()];
      if (t.translated < 0) t.translated = seq;
    } else if (kind == "EvaluationResult") {
      auto& t = out[p.at("caseId").get<std::string>()];
      if (t.evaluated < 0) t.evaluated = seq;
      t.verdict = p.at("verdict").is_null() ? "none" : p.at("verdict").get<std::string>();
    } else if (kind == "ViolationAlert") {
      out[p.at("caseId").get<std::string>()].alerts.push_back(seq);
    }
  }
  return out;
}

/// Empty when every case runs ExtractedText < TranslatedFacts <
/// EvaluationResult < each ViolationAlert, and every unethical result has an alert.
inline std::vector<std::string> causality_problems(const std::vector<nlohmann::json>& entries) {
  std::vector<std::string> problems;
  for (const auto& [id, t] : traces(entries)) {
    if (t.extracted < 0 || t.translated < 0 || t.evaluated < 0) {
      problems.push_back(id + ": missing pipeline stage");
      continue;
    }
    if (!(t.extracted < t.translated && t.translated < t.evaluated)) problems.push_back(id + ": stages out of order");
    for (long a : t.alerts) {
      if (a < t.evaluated) problems.push_back(id + ": alert before evaluation");
    }
    if (t.verdict == "unethical" && t.alerts.empty()) problems.push_back(id + ": lost alert");
    if (t.verdict != "unethical" && !t.alerts.empty()) problems.push_back(id + ": alert without violation");
  }
  return problems;
}

}  // namespace log_checks
