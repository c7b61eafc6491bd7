#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ethmon::runtime {

/// The monitored dialogue system. Implementations must be thread-safe.
class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::string respond(std::string_view question) = 0;
};

/// `PATTERN => ANSWER` lines, `#` comments. Patterns match the whole
/// question case-insensitively; `*` matches any run of characters. The first
/// matching line wins; no match yields kFallbackAnswer.
class ScriptedResponder : public Responder {
 public:
  static constexpr std::string_view kFallbackAnswer = "Sorry, I cannot help with that.";

  struct Line {
    std::string pattern;
    std::string answer;
  };

  /// Throws ConfigError.
  static ScriptedResponder parse(std::string_view text);
  static ScriptedResponder load(const std::filesystem::path& path);

  std::string respond(std::string_view question) override;
  const std::vector<Line>& lines() const { return lines_; }

 private:
  std::vector<Line> lines_;
};

/// Case-insensitive glob with `*` only.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace ethmon::runtime
