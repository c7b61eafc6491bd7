#pragma once

#include <string>
#include <string_view>

#include "ethmon/asp/program.hpp"

namespace ethmon::asp {

/// Parses the dialect:
///
///   statement := atom [":-" literal {"," literal}] "."
///   literal   := "not" <space> atom | atom
///   atom      := lident ["(" term {"," term} ")"]
///   term      := uident | lident ["(" term {"," term} ")"]
///
/// `%` starts a comment running to end of line. `not` is reserved.
/// Throws SyntaxError, then any validation error raised by Program.
Program parse_program(std::string_view text);

/// A single atom such as `relevant(environmentally_friendly(productX))`,
/// optionally followed by a terminating `.`.
Atom parse_atom(std::string_view text);
/// Same as parse_atom but rejects non-ground results.
Atom parse_ground_atom(std::string_view text);
Rule parse_rule(std::string_view text);

/// One rule per line, no trailing newline; the empty program prints as "".
std::string print_program(const Program& p);

}  // namespace ethmon::asp
