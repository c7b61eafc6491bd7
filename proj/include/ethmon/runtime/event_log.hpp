#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "json.hpp"

namespace ethmon::runtime {

/// Append-only log of message envelopes and dead letters. Each entry gets a
/// timestamp `ts` and a log-wide sequence number `logSeq`.
class EventLog {
 public:
  EventLog() = default;
  /// Also appends every entry as one JSON line to `file`.
  explicit EventLog(const std::filesystem::path& file);

  void append(nlohmann::json entry);
  std::vector<nlohmann::json> entries() const;
  std::vector<nlohmann::json> dead_letters() const;

 private:
  mutable std::mutex mu_;
  std::vector<nlohmann::json> entries_;
  std::optional<std::ofstream> out_;
};

}  // namespace ethmon::runtime
