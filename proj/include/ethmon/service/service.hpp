#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ethmon/runtime/runtime.hpp"
#include "ethmon/service/config.hpp"
#include "ethmon/service/event_bus.hpp"
#include "json.hpp"

namespace ethmon::service {

struct TranscriptEntry {
  std::string speaker;  // client | agent
  std::string text;
  std::string timestamp;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct SessionRecord {
  std::string session_id;
  std::string created_at;
  std::vector<TranscriptEntry> transcript;
  std::vector<std::string> case_ids;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

nlohmann::json to_json(const SessionRecord& s);
SessionRecord session_from_json(const nlohmann::json& j);

struct Request {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";

  nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// The HTTP surface without the transport. Every route except the event
/// stream is served by handle(); the stream is read straight off bus().
class Service {
 public:
  /// With a data directory, sessions.jsonl and bus.jsonl live there.
  Service(std::unique_ptr<runtime::Runtime> rt, std::optional<std::filesystem::path> data_dir = std::nullopt,
          EventBus::Options bus_options = {});
  ~Service();

  /// Throws ConfigError.
  static std::unique_ptr<Service> create(const ServiceConfig& config);

  Response handle(const Request& req);

  EventBus& bus() { return *bus_; }
  runtime::Runtime& runtime() { return *runtime_; }
  std::optional<SessionRecord> session(const std::string& id) const;

 private:
  Response create_session();
  Response post_message(const std::string& id, const nlohmann::json& body);
  Response get_session(const std::string& id) const;
  Response list_cases(const Request& req) const;
  Response get_case(const std::string& id) const;
  Response label(const nlohmann::json& body);
  Response get_kb() const;
  Response change_fact(bool add, const nlohmann::json& body);
  Response events_backlog(const Request& req) const;

  void persist_sessions() const;
  void append_transcript(SessionRecord& s, std::string speaker, std::string text);

  std::unique_ptr<runtime::Runtime> runtime_;
  std::optional<std::filesystem::path> data_dir_;
  std::unique_ptr<EventBus> bus_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, SessionRecord> sessions_;
  std::uint64_t next_session_ = 1;
  // Turns on one session are serialized; different sessions run in parallel.
  std::map<std::string, std::shared_ptr<std::mutex>> turn_locks_;
};

/// Starting cursor for an event stream: the larger of `since` and the
/// Last-Seq (or Last-Event-ID) header. Throws Error on non-numeric input.
std::uint64_t resume_cursor(const std::string& since, const std::string& last_seq_header);

}  // namespace ethmon::service
