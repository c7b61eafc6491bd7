#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

std::string join_arities(const std::vector<std::size_t>& seen) {
  std::string out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(seen[i]);
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(int line, int col, std::string expected)
    : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": expected " +
            expected),
      line_(line),
      col_(col),
      expected_(std::move(expected)) {}

SafetyError::SafetyError(std::size_t rule_index, std::string variable)
    : Error("unsafe rule #" + std::to_string(rule_index) + ": variable " + variable +
            " does not occur in a positive body literal"),
      rule_index_(rule_index),
      variable_(std::move(variable)) {}

ArityError::ArityError(std::string predicate, std::vector<std::size_t> seen)
    : Error("predicate " + predicate + " used with arities " + join_arities(seen)),
      predicate_(std::move(predicate)),
      seen_(std::move(seen)) {}

DepthError::DepthError(std::string term)
    : Error("term nested deeper than 2: " + term), term_(std::move(term)) {}

}  // namespace ethmon::asp
