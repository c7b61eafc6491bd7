#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ethmon/asp/term.hpp"
#include "ethmon/errors.hpp"

namespace ethmon::nl {

enum class Speaker { Client, ServiceAgent };

std::string_view to_string(Speaker s);

class UnmappableToken : public Error {
 public:
  using Error::Error;
};

/// "environmentally friendly" -> environmentally_friendly, "ProductX" -> productX.
/// Lowercases the first letter of each word, drops punctuation, joins words with `_`.
std::string normalize_symbol(std::string_view phrase);

/// One line of the pattern table, e.g. `T1: <NP> is <ADJP> => <ADJP>(<NP>)`.
struct PatternRule {
  struct Token {
    bool slot = false;
    std::string text;  // slot name, or the literal word lowercased
  };

  std::string id;
  std::string template_text;
  std::vector<Token> tokens;
  std::string emission;  // atom schema with <SLOT> placeholders
};

class PatternTable {
 public:
  PatternTable() = default;
  explicit PatternTable(std::vector<PatternRule> rules) : rules_(std::move(rules)) {}

  /// `[ID:] TEMPLATE => EMISSION` per line, `#` comments. Throws ConfigError
  /// with the line number on malformed entries.
  static PatternTable parse(std::string_view text);
  static PatternTable load(const std::filesystem::path& path);
  /// T1 `<NP> is <ADJP>`, T2 `what are the features of <NP>?`, T3 `<NP> has <NP2>`.
  static PatternTable builtin();

  const std::vector<PatternRule>& rules() const { return rules_; }

 private:
  std::vector<PatternRule> rules_;
};

struct TranslationResult {
  std::string source_text;
  std::vector<asp::Atom> facts;
  std::optional<std::string> matched_pattern;
};

struct DialogueTurn {
  Speaker speaker = Speaker::Client;
  std::string text;
};

/// First matching pattern wins. Service-agent propositions P are also
/// emitted reified as answer(P). No match yields an empty result.
TranslationResult translate_sentence(const PatternTable& table, std::string_view sentence, Speaker role);

/// Splits on `.`, `?` and `!` and translates each non-empty sentence in order.
std::vector<TranslationResult> translate_turn(const PatternTable& table, const DialogueTurn& turn);

std::vector<std::string> split_sentences(std::string_view text);

/// Holds the active table; readers take a snapshot, reload swaps it whole.
class Translator {
 public:
  explicit Translator(PatternTable table)
      : table_(std::make_shared<const PatternTable>(std::move(table))) {}

  std::shared_ptr<const PatternTable> snapshot() const;
  void replace(PatternTable table);

  std::vector<TranslationResult> translate(const DialogueTurn& turn) const {
    return translate_turn(*snapshot(), turn);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const PatternTable> table_;
};

}  // namespace ethmon::nl
