#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ethmon/engine/engine.hpp"
#include "ethmon/nl/translator.hpp"
#include "ethmon/runtime/event_log.hpp"
#include "ethmon/runtime/message.hpp"
#include "ethmon/runtime/responder.hpp"

namespace ethmon::runtime {

struct RuntimeConfig {
  std::filesystem::path kb_dir;
  std::filesystem::path patterns;
  std::filesystem::path modes;
  std::filesystem::path responder;
  /// Persistence for KB generations and cases; none when unset.
  std::optional<std::filesystem::path> state_dir;
  /// JSONL copy of the in-memory event log.
  std::optional<std::filesystem::path> event_log;
  std::chrono::milliseconds stage_deadline{5000};
  ilp::LearnerOptions learner;
};

struct TurnOutcome {
  std::string turn_id;
  std::string answer;
  std::string case_id;
  engine::CaseStatus status = engine::CaseStatus::Evaluated;
  std::optional<asp::Verdict> verdict;
  bool pending_label = false;
  bool alerted = false;
};

struct Ack {
  std::string msg_id;
  bool duplicate = false;
};

class DuplicateSession : public Error {
 public:
  using Error::Error;
};

class UnknownSession : public Error {
 public:
  using Error::Error;
};

using FeedListener = std::function<void(const AgentMessage&)>;

struct Shared;
class Pipeline;

/// One session's six agents. Copies share the same pipeline.
class PipelineHandle {
 public:
  explicit PipelineHandle(std::shared_ptr<Pipeline> p) : p_(std::move(p)) {}

  const std::string& session_id() const;
  std::size_t live_agents() const;

  /// One full exchange. Turns on one session are serialized.
  /// Throws TimeoutError when a stage misses the deadline, Error when a stage fails.
  TurnOutcome run_turn(const std::string& user_text);

  /// Throws RoutingError for triples outside the routing table or a foreign session.
  Ack dispatch(AgentMessage m);

  /// Alerts delivered to this session's chatting agent.
  std::vector<ViolationAlert> chat_alerts() const;

 private:
  std::shared_ptr<Pipeline> p_;
};

class Runtime {
 public:
  Runtime(std::shared_ptr<engine::Engine> engine, std::shared_ptr<nl::Translator> translator,
          std::shared_ptr<Responder> responder, std::chrono::milliseconds stage_deadline,
          std::shared_ptr<EventLog> log = std::make_shared<EventLog>());
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Loads every named resource. Throws ConfigError when one is missing or malformed.
  static std::unique_ptr<Runtime> create(const RuntimeConfig& config);

  /// Throws DuplicateSession when `session_id` already has a live pipeline.
  PipelineHandle spawn_pipeline(const std::string& session_id);
  /// Throws UnknownSession.
  PipelineHandle pipeline(const std::string& session_id) const;
  bool has_pipeline(const std::string& session_id) const;
  void close(const std::string& session_id);

  engine::Engine& engine();
  nl::Translator& translator();
  EventLog& log();

  void set_feed_listener(FeedListener listener);
  std::vector<AgentMessage> supervisor_feed() const;

 private:
  std::shared_ptr<Shared> shared_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Pipeline>> pipelines_;
};

}  // namespace ethmon::runtime
