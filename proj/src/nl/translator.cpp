#include "ethmon/nl/translator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/parser.hpp"

namespace ethmon::nl {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Drops leading and trailing punctuation: "ProductX," -> "ProductX".
std::string strip_edges(const std::string& w) {
  std::size_t b = 0, e = w.size();
  while (b < e && !is_word_char(w[b])) ++b;
  while (e > b && !is_word_char(w[e - 1])) --e;
  return w.substr(b, e - b);
}

bool is_slot(const std::string& w) {
  if (w.size() < 3 || w.front() != '<' || w.back() != '>') return false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    if (!std::isupper(static_cast<unsigned char>(w[i])) && !std::isdigit(static_cast<unsigned char>(w[i])) &&
        w[i] != '_') {
      return false;
    }
  }
  return true;
}

std::vector<std::string> emission_slots(const std::string& emission) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = emission.find('<', pos)) != std::string::npos) {
    std::size_t end = emission.find('>', pos);
    if (end == std::string::npos) break;
    out.push_back(emission.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

std::string substitute(const std::string& emission, const std::map<std::string, std::string>& values) {
  std::string out = emission;
  for (const auto& [slot, value] : values) {
    const std::string key = "<" + slot + ">";
    std::size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return out;
}

// Returns the emitted atom, or nullopt if the captures do not yield one.
std::optional<asp::Atom> emit(const PatternRule& rule, const std::map<std::string, std::string>& captures) {
  std::map<std::string, std::string> values;
  try {
    for (const auto& slot : emission_slots(rule.emission)) values.emplace(slot, normalize_symbol(captures.at(slot)));
    return asp::parse_ground_atom(substitute(rule.emission, values));
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Backtracking match; slots take one or more words, shortest first.
bool match_tokens(const PatternRule& rule, const std::vector<std::string>& sentence, std::size_t ti,
                  std::size_t si, std::map<std::string, std::string>& captures,
                  const std::function<bool()>& accept) {
  if (ti == rule.tokens.size()) return si == sentence.size() && accept();
  const auto& tok = rule.tokens[ti];
  if (!tok.slot) {
    if (si >= sentence.size() || lower(strip_edges(sentence[si])) != tok.text) return false;
    return match_tokens(rule, sentence, ti + 1, si + 1, captures, accept);
  }
  std::string phrase;
  for (std::size_t end = si; end < sentence.size(); ++end) {
    if (end > si) phrase += ' ';
    phrase += sentence[end];
    captures[tok.text] = phrase;
    if (match_tokens(rule, sentence, ti + 1, end + 1, captures, accept)) return true;
  }
  captures.erase(tok.text);
  return false;
}

PatternRule parse_pattern_line(const std::string& line, std::size_t lineno, std::size_t ordinal) {
  auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("pattern table line " + std::to_string(lineno) + ": " + why);
  };
  std::size_t arrow = line.find("=>");
  if (arrow == std::string::npos) throw fail("missing '=>'");
  std::string lhs = trim(std::string_view(line).substr(0, arrow));
  PatternRule rule;
  rule.emission = trim(std::string_view(line).substr(arrow + 2));

  std::size_t colon = lhs.find(':');
  if (colon != std::string::npos && colon > 0 &&
      std::all_of(lhs.begin(), lhs.begin() + colon, [](char c) { return is_word_char(c); })) {
    rule.id = lhs.substr(0, colon);
    lhs = trim(std::string_view(lhs).substr(colon + 1));
  } else {
    rule.id = "T" + std::to_string(ordinal);
  }
  while (!lhs.empty() && (lhs.back() == '?' || lhs.back() == '.' || lhs.back() == '!')) lhs.pop_back();
  rule.template_text = trim(lhs);

  std::vector<std::string> template_slots;
  for (const auto& w : words(rule.template_text)) {
    if (is_slot(w)) {
      std::string name = w.substr(1, w.size() - 2);
      if (std::find(template_slots.begin(), template_slots.end(), name) != template_slots.end()) {
        throw fail("slot <" + name + "> appears twice");
      }
      template_slots.push_back(name);
      rule.tokens.push_back({true, name});
    } else {
      std::string lit = lower(strip_edges(w));
      if (lit.empty()) throw fail("empty literal word in template");
      rule.tokens.push_back({false, lit});
    }
  }
  if (rule.tokens.empty()) throw fail("empty template");
  if (rule.emission.empty()) throw fail("empty emission");

  std::map<std::string, std::string> dummy;
  for (const auto& slot : emission_slots(rule.emission)) {
    if (std::find(template_slots.begin(), template_slots.end(), slot) == template_slots.end()) {
      throw fail("emission slot <" + slot + "> not in template");
    }
    dummy[slot] = "x";
  }
  try {
    asp::Atom probe = asp::parse_ground_atom(substitute(rule.emission, dummy));
    asp::Atom reified{"answer", {asp::atom_to_term(probe)}};
    for (const auto& t : reified.args) {
      if (t.depth() > asp::kMaxTermDepth) throw asp::DepthError(asp::to_string(t));
    }
  } catch (const Error& e) {
    throw fail(std::string("emission is not a ground atom schema: ") + e.what());
  }
  return rule;
}

}  // namespace

std::string_view to_string(Speaker s) { return s == Speaker::Client ? "client" : "agent"; }

std::string normalize_symbol(std::string_view phrase) {
  std::vector<std::string> parts;
  for (const auto& w : words(phrase)) {
    std::string clean;
    for (char c : w) {
      if (is_word_char(c)) clean += c;
    }
    if (clean.empty()) continue;
    clean[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(clean[0])));
    parts.push_back(std::move(clean));
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '_';
    out += parts[i];
  }
  if (out.empty() || !std::islower(static_cast<unsigned char>(out[0])) || out == "not") {
    throw UnmappableToken("no identifier can be formed from \"" + std::string(phrase) + "\"");
  }
  return out;
}

PatternTable PatternTable::parse(std::string_view text) {
  std::vector<PatternRule> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rules.push_back(parse_pattern_line(t, lineno, rules.size() + 1));
  }
  return PatternTable(std::move(rules));
}

PatternTable PatternTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read pattern table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

PatternTable PatternTable::builtin() {
  return parse(
      "T1: <NP> is <ADJP> => <ADJP>(<NP>)\n"
      "T2: what are the features of <NP>? => question(features, <NP>)\n"
      "T3: <NP> has <NP2> => has(<NP>, <NP2>)\n");
}

TranslationResult translate_sentence(const PatternTable& table, std::string_view sentence, Speaker role) {
  TranslationResult result{std::string(sentence), {}, std::nullopt};
  std::string body = trim(sentence);
  while (!body.empty() && (body.back() == '?' || body.back() == '.' || body.back() == '!')) body.pop_back();
  const auto tokens = words(body);
  if (tokens.empty()) return result;

  for (const auto& rule : table.rules()) {
    std::map<std::string, std::string> captures;
    std::optional<asp::Atom> fact;
    bool matched = match_tokens(rule, tokens, 0, 0, captures, [&] {
      fact = emit(rule, captures);
      return fact.has_value();
    });
    if (!matched) continue;
    result.facts.push_back(*fact);
    if (role == Speaker::ServiceAgent && fact->predicate != "answer") {
      result.facts.push_back(asp::Atom{"answer", {asp::atom_to_term(*fact)}});
    }
    result.matched_pattern = rule.id;
    return result;
  }
  return result;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    current += c;
    if (c == '.' || c == '?' || c == '!') {
      std::string s = trim(current);
      if (s.size() > 1 || (s.size() == 1 && is_word_char(s[0]))) out.push_back(s);
      current.clear();
    }
  }
  std::string rest = trim(current);
  if (!rest.empty()) out.push_back(rest);
  return out;
}

std::vector<TranslationResult> translate_turn(const PatternTable& table, const DialogueTurn& turn) {
  std::vector<TranslationResult> out;
  for (const auto& s : split_sentences(turn.text)) out.push_back(translate_sentence(table, s, turn.speaker));
  return out;
}

std::shared_ptr<const PatternTable> Translator::snapshot() const {
  std::lock_guard lock(mu_);
  return table_;
}

void Translator::replace(PatternTable table) {
  auto next = std::make_shared<const PatternTable>(std::move(table));
  std::lock_guard lock(mu_);
  table_ = std::move(next);
}

}  // namespace ethmon::nl
