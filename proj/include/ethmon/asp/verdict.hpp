#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ethmon/asp/justification.hpp"
#include "ethmon/asp/solver.hpp"

namespace ethmon::asp {

inline constexpr std::string_view kUnethicalPredicate = "unethical";
inline constexpr std::string_view kEthicalPredicate = "ethical";
inline constexpr std::string_view kReasonNoAnswerSet = "no answer set";
inline constexpr std::string_view kReasonNoVerdictLiteral = "no ethical/unethical literal derived";

enum class VerdictKind { Unethical, Ethical, Unknown };

std::string_view to_string(VerdictKind k);

class Verdict {
 public:
  static Verdict unethical(Atom subject, Justification j);
  static Verdict ethical(Atom subject, Justification j);
  static Verdict unknown(std::string reason);

  VerdictKind kind() const { return kind_; }
  bool is_unknown() const { return kind_ == VerdictKind::Unknown; }
  /// The judged answer, e.g. environmentally_friendly(productX). Empty for Unknown.
  const Atom& subject() const { return subject_; }
  const Justification& justification() const { return justification_; }
  const std::string& reason() const { return reason_; }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  Verdict(VerdictKind kind, Atom subject, Justification j, std::string reason);

  VerdictKind kind_ = VerdictKind::Unknown;
  Atom subject_;
  Justification justification_;
  std::string reason_;
};

/// Credulous for unethical (any model), skeptical for ethical (every model).
/// Throws InconsistentVerdict when one model holds both ethical(A) and unethical(A).
Verdict extract_verdict(const std::vector<AnswerSet>& models, const Program& g);

/// Compact JSON, keys sorted, shared byte-for-byte by the CLI and the service.
std::string canonical_record(const Verdict& v);
/// Inverse of canonical_record. Throws Error on malformed input.
Verdict verdict_from_record(std::string_view json);
/// Human-readable form: the verdict atom, then the justification block.
std::string to_text(const Verdict& v);

}  // namespace ethmon::asp
