#include "ethmon/runtime/responder.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ethmon/errors.hpp"

namespace ethmon::runtime {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
  // Iterative matcher with single backtrack point at the last star.
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && lower(pattern[p]) == lower(text[t])) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

ScriptedResponder ScriptedResponder::parse(std::string_view text) {
  ScriptedResponder out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto arrow = s.find("=>");
    if (arrow == std::string::npos) {
      throw ConfigError("responder line " + std::to_string(lineno) + ": expected PATTERN => ANSWER");
    }
    Line l{trim(std::string_view(s).substr(0, arrow)), trim(std::string_view(s).substr(arrow + 2))};
    if (l.pattern.empty() || l.answer.empty()) {
      throw ConfigError("responder line " + std::to_string(lineno) + ": empty pattern or answer");
    }
    out.lines_.push_back(std::move(l));
  }
  return out;
}

ScriptedResponder ScriptedResponder::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read responder script " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ScriptedResponder::respond(std::string_view question) {
  const std::string q = trim(question);
  for (const auto& l : lines_) {
    if (glob_match(l.pattern, q)) return l.answer;
  }
  return std::string(kFallbackAnswer);
}

}  // namespace ethmon::runtime
