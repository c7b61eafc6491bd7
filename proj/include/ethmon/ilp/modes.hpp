#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ethmon/asp/term.hpp"

namespace ethmon::ilp {

enum class ModeKind { Head, Body };

enum class Placement {
  Input,     // +type: a variable bound by the head or an earlier literal
  Output,    // -type: a variable, possibly new
  Constant,  // #type: a ground term kept as is
};

struct ArgMode {
  Placement placement;
  std::string type;

  friend bool operator==(const ArgMode&, const ArgMode&) = default;
};

struct ModeDeclaration {
  ModeKind kind = ModeKind::Body;
  std::string predicate;
  std::vector<ArgMode> args;
  bool negatable = false;

  friend bool operator==(const ModeDeclaration&, const ModeDeclaration&) = default;
};

/// `modeh(unethical(+answer)).` / `modeb(relevant(+answer), negatable).`
/// One declaration per line, `%` or `#` comments. Throws ConfigError.
std::vector<ModeDeclaration> parse_modes(std::string_view text);
std::vector<ModeDeclaration> load_modes(const std::filesystem::path& path);

std::string to_string(const ModeDeclaration& m);

const ModeDeclaration* find_head_mode(const std::vector<ModeDeclaration>& modes, const asp::Atom& a);

/// Head matches a head mode, every body literal matches a body mode (negated
/// only where negatable), and every input variable is bound by the head or
/// by an earlier literal.
bool conforms(const asp::Rule& r, const std::vector<ModeDeclaration>& modes);

}  // namespace ethmon::ilp
