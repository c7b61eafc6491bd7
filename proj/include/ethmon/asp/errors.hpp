#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ethmon/errors.hpp"

namespace ethmon::asp {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, std::string expected);
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

class SafetyError : public Error {
 public:
  SafetyError(std::size_t rule_index, std::string variable);
  std::size_t rule_index() const { return rule_index_; }
  const std::string& variable() const { return variable_; }

 private:
  std::size_t rule_index_;
  std::string variable_;
};

class ArityError : public Error {
 public:
  ArityError(std::string predicate, std::vector<std::size_t> seen);
  const std::string& predicate() const { return predicate_; }
  const std::vector<std::size_t>& seen_arities() const { return seen_; }

 private:
  std::string predicate_;
  std::vector<std::size_t> seen_;
};

class DepthError : public Error {
 public:
  explicit DepthError(std::string term);
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

/// Grounding or search exceeded a configured limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class NotDerived : public Error {
 public:
  using Error::Error;
};

class InconsistentVerdict : public Error {
 public:
  using Error::Error;
};

}  // namespace ethmon::asp
