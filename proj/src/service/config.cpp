#include "ethmon/service/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "ethmon/engine/storage.hpp"

namespace ethmon::service {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::uint64_t number(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key " + key + " needs a non-negative integer, got \"" + value + "\"");
  }
  return out;
}

}  // namespace

runtime::RuntimeConfig ServiceConfig::runtime_config() const {
  runtime::RuntimeConfig r;
  r.kb_dir = kb_dir;
  r.patterns = patterns;
  r.modes = modes;
  r.responder = responder;
  r.state_dir = data_dir;
  if (data_dir) r.event_log = *data_dir / "events.jsonl";
  r.stage_deadline = std::chrono::milliseconds(stage_deadline_ms);
  r.learner = learner;
  return r;
}

ServiceConfig parse_config(std::string_view text, const fs::path& base_dir) {
  ServiceConfig cfg;
  bool seen_kb = false, seen_patterns = false, seen_modes = false, seen_responder = false;
  auto path = [&](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key == "kb_dir") {
      cfg.kb_dir = path(value);
      seen_kb = true;
    } else if (key == "patterns") {
      cfg.patterns = path(value);
      seen_patterns = true;
    } else if (key == "modes") {
      cfg.modes = path(value);
      seen_modes = true;
    } else if (key == "responder") {
      cfg.responder = path(value);
      seen_responder = true;
    } else if (key == "data_dir") {
      cfg.data_dir = path(value);
    } else if (key == "listen") {
      auto colon = value.rfind(':');
      if (colon == std::string::npos) throw ConfigError("listen must be host:port, got \"" + value + "\"");
      cfg.host = value.substr(0, colon);
      auto port = number(key, value.substr(colon + 1));
      if (port > 65535) throw ConfigError("listen port out of range: " + value);
      cfg.port = static_cast<int>(port);
    } else if (key == "stage_deadline_ms") {
      cfg.stage_deadline_ms = number(key, value);
    } else if (key == "ground_atom_limit") {
      cfg.learner.grounding.max_ground_atoms = number(key, value);
    } else if (key == "search_node_limit") {
      cfg.learner.solving.max_search_nodes = number(key, value);
    } else if (key == "body_length_cap") {
      cfg.learner.body_length_cap = number(key, value);
    } else if (key == "bottom_clause_depth") {
      cfg.learner.bottom_clause_depth = static_cast<int>(number(key, value));
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key \"" + key + "\"");
    }
  }
  if (!seen_kb || !seen_patterns || !seen_modes || !seen_responder) {
    throw ConfigError("config needs kb_dir, patterns, modes and responder");
  }
  return cfg;
}

ServiceConfig load_config(const fs::path& file) {
  return parse_config(engine::read_file(file), file.parent_path().empty() ? fs::path(".") : file.parent_path());
}

}  // namespace ethmon::service
