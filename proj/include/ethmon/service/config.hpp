#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ethmon/runtime/runtime.hpp"

namespace ethmon::service {

/// `key = value` lines, `#` comments. Relative paths resolve against the
/// directory of the config file.
///
///   kb_dir             seed knowledge base (ontology.lp, ...)      required
///   patterns           sentence pattern table                     required
///   modes              mode declarations                          required
///   responder          scripted answers                           required
///   data_dir           saved generations, cases, sessions, events  optional
///   listen             host:port                                  127.0.0.1:8080
///   stage_deadline_ms  per-stage turn deadline                    5000
///   ground_atom_limit, search_node_limit, body_length_cap, bottom_clause_depth
struct ServiceConfig {
  std::filesystem::path kb_dir;
  std::filesystem::path patterns;
  std::filesystem::path modes;
  std::filesystem::path responder;
  std::optional<std::filesystem::path> data_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t stage_deadline_ms = 5000;
  ilp::LearnerOptions learner;

  runtime::RuntimeConfig runtime_config() const;
};

/// Throws ConfigError on unknown keys, bad numbers or missing required keys.
ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ServiceConfig load_config(const std::filesystem::path& file);

}  // namespace ethmon::service
