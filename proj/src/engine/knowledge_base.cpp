#include "ethmon/engine/knowledge_base.hpp"

#include <algorithm>
#include <fstream>

#include "ethmon/asp/parser.hpp"
#include "ethmon/engine/storage.hpp"

namespace ethmon::engine {

namespace fs = std::filesystem;
using asp::Program;

namespace {

constexpr const char* kOntologyFile = "ontology.lp";
constexpr const char* kCodeRulesFile = "code_rules.lp";
constexpr const char* kLearnedFile = "learned.lp";
constexpr const char* kArchiveFile = "archive.jsonl";
constexpr const char* kCurrentFile = "CURRENT";
constexpr std::string_view kVersionTag = "% hypothesis version ";

Program parse_file(const fs::path& p, bool required) {
  if (!fs::exists(p)) {
    if (required) throw ConfigError("missing knowledge base file " + p.string());
    return {};
  }
  try {
    return asp::parse_program(read_file(p));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

std::uint64_t hypothesis_version(const fs::path& p) {
  if (!fs::exists(p)) return 0;
  std::string text = read_file(p);
  if (text.rfind(kVersionTag, 0) != 0) return 1;
  return std::stoull(text.substr(kVersionTag.size()));
}

StoredState load_flat(const fs::path& dir, std::uint64_t version) {
  Program ontology = parse_file(dir / kOntologyFile, true);
  Program code = parse_file(dir / kCodeRulesFile, false);
  Program learned = parse_file(dir / kLearnedFile, false);
  ilp::Hypothesis h{learned.rules(), learned.empty() ? 0 : hypothesis_version(dir / kLearnedFile)};
  StoredState out{KnowledgeBase(std::move(ontology), std::move(code), std::move(h), version), {}};
  if (fs::exists(dir / kArchiveFile)) out.archive = ilp::load_archive(dir / kArchiveFile);
  return out;
}

std::string gen_name(std::uint64_t version) { return "gen-" + std::to_string(version); }

}  // namespace

KnowledgeBase::KnowledgeBase() : KnowledgeBase(Program{}, Program{}, ilp::Hypothesis{}, 1) {}

KnowledgeBase::KnowledgeBase(Program ontology, Program code_rules, ilp::Hypothesis learned, std::uint64_t version)
    : ontology_(std::move(ontology)),
      code_rules_(std::move(code_rules)),
      learned_(std::move(learned)),
      version_(version) {
  for (const auto& r : ontology_.rules()) {
    if (!r.is_fact()) throw ConfigError("ontology may only hold facts, got: " + asp::to_string(r));
  }
  combined_ = ontology_.concat(code_rules_).with_rules(learned_.rules);
}

Program KnowledgeBase::background() const { return ontology_.concat(code_rules_); }

bool KnowledgeBase::has_fact(const asp::Atom& f) const {
  const auto& rules = ontology_.rules();
  return std::any_of(rules.begin(), rules.end(), [&](const asp::Rule& r) { return r.head == f; });
}

KnowledgeBase KnowledgeBase::with_learned(ilp::Hypothesis h) const {
  return KnowledgeBase(ontology_, code_rules_, std::move(h), version_ + 1);
}

KnowledgeBase KnowledgeBase::bumped() const { return KnowledgeBase(ontology_, code_rules_, learned_, version_ + 1); }

KnowledgeBase assert_fact(const KnowledgeBase& kb, const asp::Atom& f) {
  if (!f.is_ground()) throw Error("fact must be ground: " + asp::to_string(f));
  if (kb.has_fact(f)) return kb;
  return KnowledgeBase(kb.ontology().with_rules({asp::Rule::fact(f)}), kb.code_rules(), kb.learned(),
                       kb.version() + 1);
}

KnowledgeBase retract_fact(const KnowledgeBase& kb, const asp::Atom& f) {
  if (!kb.has_fact(f)) return kb;
  std::vector<asp::Rule> kept;
  for (const auto& r : kb.ontology().rules()) {
    if (r.head != f) kept.push_back(r);
  }
  return KnowledgeBase(Program(std::move(kept)), kb.code_rules(), kb.learned(), kb.version() + 1);
}

std::string render_part(const Program& p) {
  std::string out = asp::print_program(p);
  if (!out.empty()) out += '\n';
  return out;
}

std::string render_learned(const ilp::Hypothesis& h) {
  if (h.rules.empty()) return {};
  return std::string(kVersionTag) + std::to_string(h.version) + "\n" + render_part(Program(h.rules));
}

bool has_saved_state(const fs::path& dir) { return fs::exists(dir / kCurrentFile); }

StoredState load_state(const fs::path& dir) {
  if (!has_saved_state(dir)) return load_flat(dir, 1);
  std::string name = read_file(dir / kCurrentFile);
  while (!name.empty() && (name.back() == '\n' || name.back() == '\r')) name.pop_back();
  if (name.rfind("gen-", 0) != 0) throw ConfigError("corrupt CURRENT in " + dir.string());
  std::uint64_t version = std::stoull(name.substr(4));
  return load_flat(dir / name, version);
}

void save_state(const fs::path& dir, const KnowledgeBase& kb, const std::vector<ilp::LabeledExample>& archive) {
  fs::create_directories(dir);
  const std::string name = gen_name(kb.version());
  const fs::path staging = dir / (name + ".staging");
  fs::remove_all(staging);
  fs::create_directories(staging);
  write_file_atomic(staging / kOntologyFile, render_part(kb.ontology()));
  write_file_atomic(staging / kCodeRulesFile, render_part(kb.code_rules()));
  write_file_atomic(staging / kLearnedFile, render_learned(kb.learned()));
  std::string lines;
  for (const auto& ex : archive) lines += ilp::to_json_line(ex) + "\n";
  write_file_atomic(staging / kArchiveFile, lines);
  fault_point("generation-staged");
  fs::remove_all(dir / name);
  fs::rename(staging, dir / name);
  fault_point("generation-installed");
  write_file_atomic(dir / kCurrentFile, name + "\n");
  fault_point("current-flipped");

  // Keep the live generation and its predecessor; drop older ones and leftovers.
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string n = entry.path().filename().string();
    if (!entry.is_directory() || n.rfind("gen-", 0) != 0 || n == name) continue;
    bool stale = n.find(".staging") != std::string::npos;
    if (!stale) {
      try {
        stale = std::stoull(n.substr(4)) + 1 < kb.version();
      } catch (const std::exception&) {
        stale = false;
      }
    }
    if (stale) fs::remove_all(entry.path());
  }
}

}  // namespace ethmon::engine
