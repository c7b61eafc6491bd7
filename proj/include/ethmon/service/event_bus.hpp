#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ethmon::service {

struct Envelope {
  std::uint64_t seq = 0;
  std::string kind;  // verdict | alert | label_request | kb_updated | turn
  nlohmann::json body;
};

nlohmann::json to_json(const Envelope& e);

/// Totally ordered event history. Readers pull by seq, so fan-out never
/// blocks the publisher; a reader that falls more than `max_lag` behind is
/// told to drop its connection and resume later by seq.
class EventBus {
 public:
  struct Options {
    std::size_t retain = 100000;
    std::size_t max_lag = 10000;
    /// Append-only copy; reloaded on construction so seq continues after restart.
    std::optional<std::filesystem::path> journal;
  };

  EventBus() : EventBus(Options{}) {}
  explicit EventBus(Options options);

  std::uint64_t publish(std::string kind, nlohmann::json body);

  /// Events with seq > `after`, at most `max` of them.
  std::vector<Envelope> since(std::uint64_t after, std::size_t max = SIZE_MAX) const;
  /// Like since(), but waits up to `timeout` for something new.
  std::vector<Envelope> wait_since(std::uint64_t after, std::chrono::milliseconds timeout,
                                   std::size_t max = SIZE_MAX) const;

  std::uint64_t last_seq() const;
  bool lagging(std::uint64_t cursor) const;

  /// Wakes every waiter; later waits return immediately.
  void close();
  bool closed() const;

 private:
  std::vector<Envelope> collect(std::uint64_t after, std::size_t max) const;

  Options options_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<Envelope> history_;
  std::uint64_t last_ = 0;
  bool closed_ = false;
  std::ofstream journal_;
};

}  // namespace ethmon::service
