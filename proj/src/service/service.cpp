#include "ethmon/service/service.hpp"

#include <charconv>
#include <sstream>

#include "ethmon/asp/errors.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/engine/storage.hpp"

namespace ethmon::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Response reply(int status, const json& body) { return Response{status, body.dump(), "application/json"}; }
Response error(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

class BadRequest : public Error {
 public:
  using Error::Error;
};

json parse_body(const std::string& body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest("request body must be a JSON object");
  return j;
}

std::string string_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw BadRequest(std::string("missing string field \"") + key + "\"");
  return it->get<std::string>();
}

json rule_strings(const std::vector<asp::Rule>& rules) {
  json out = json::array();
  for (const auto& r : rules) out.push_back(asp::to_string(r));
  return out;
}

json atom_strings(const std::vector<asp::Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back(asp::to_string(a));
  return out;
}

std::uint64_t parse_seq(const std::string& s) {
  if (s.empty()) return 0;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw BadRequest("sequence number must be an integer: " + s);
  return v;
}

}  // namespace

std::uint64_t resume_cursor(const std::string& since, const std::string& last_seq_header) {
  return std::max(parse_seq(since), parse_seq(last_seq_header));
}

json to_json(const SessionRecord& s) {
  json transcript = json::array();
  for (const auto& t : s.transcript) {
    transcript.push_back({{"speaker", t.speaker}, {"text", t.text}, {"timestamp", t.timestamp}});
  }
  return json{{"sessionId", s.session_id}, {"createdAt", s.created_at}, {"transcript", transcript},
              {"caseIds", s.case_ids}};
}

SessionRecord session_from_json(const json& j) {
  SessionRecord s;
  s.session_id = j.at("sessionId").get<std::string>();
  s.created_at = j.value("createdAt", "");
  for (const auto& t : j.value("transcript", json::array())) {
    s.transcript.push_back({t.at("speaker").get<std::string>(), t.at("text").get<std::string>(),
                            t.at("timestamp").get<std::string>()});
  }
  s.case_ids = j.value("caseIds", std::vector<std::string>{});
  return s;
}

Service::Service(std::unique_ptr<runtime::Runtime> rt, std::optional<fs::path> data_dir,
                 EventBus::Options bus_options)
    : runtime_(std::move(rt)), data_dir_(std::move(data_dir)) {
  if (data_dir_) {
    fs::create_directories(*data_dir_);
    if (!bus_options.journal) bus_options.journal = *data_dir_ / "bus.jsonl";
    auto file = *data_dir_ / "sessions.jsonl";
    if (fs::exists(file)) {
      std::istringstream in(engine::read_file(file));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto s = session_from_json(json::parse(line));
        auto dash = s.session_id.rfind('-');
        if (dash != std::string::npos) {
          std::uint64_t n = 0;
          auto tail = s.session_id.substr(dash + 1);
          auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
          if (ec == std::errc{} && n >= next_session_) next_session_ = n + 1;
        }
        sessions_[s.session_id] = std::move(s);
      }
    }
  }
  bus_ = std::make_unique<EventBus>(std::move(bus_options));

  EventBus* bus = bus_.get();
  runtime_->engine().set_event_sink(
      [bus](std::string_view kind, const json& body) { bus->publish(std::string(kind), body); });
  runtime_->set_feed_listener([bus](const runtime::AgentMessage& m) {
    if (const auto* a = std::get_if<runtime::ViolationAlert>(&m.payload)) {
      bus->publish("alert", {{"caseId", a->case_id},
                             {"sessionId", m.session_id},
                             {"turnId", m.turn_id},
                             {"subject", asp::to_string(a->subject)},
                             {"justification", a->justification_text}});
    } else if (const auto* r = std::get_if<runtime::LabelRequest>(&m.payload)) {
      bus->publish("label_request", {{"caseId", r->case_id},
                                     {"sessionId", m.session_id},
                                     {"turnId", m.turn_id},
                                     {"candidateTargets", atom_strings(r->candidate_targets)}});
    }
  });
}

Service::~Service() {
  runtime_->engine().set_event_sink(nullptr);
  runtime_->set_feed_listener(nullptr);
  bus_->close();
}

std::unique_ptr<Service> Service::create(const ServiceConfig& config) {
  return std::make_unique<Service>(runtime::Runtime::create(config.runtime_config()), config.data_dir);
}

std::optional<SessionRecord> Service::session(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

void Service::persist_sessions() const {
  if (!data_dir_) return;
  std::string out;
  for (const auto& [id, s] : sessions_) out += to_json(s).dump() + "\n";
  engine::write_file_atomic(*data_dir_ / "sessions.jsonl", out);
}

void Service::append_transcript(SessionRecord& s, std::string speaker, std::string text) {
  auto ts = engine::iso_timestamp();
  // Same-format UTC stamps compare lexicographically; never step backwards.
  if (!s.transcript.empty() && ts < s.transcript.back().timestamp) ts = s.transcript.back().timestamp;
  s.transcript.push_back({std::move(speaker), std::move(text), std::move(ts)});
}

Response Service::handle(const Request& req) {
  try {
    auto seg = segments(req.path);
    if (seg.size() < 2 || seg[0] != "api") return error(404, "no such route: " + req.path);
    const auto& m = req.method;
    const std::string& root = seg[1];
    if (root == "session") {
      if (seg.size() == 2 && m == "POST") return create_session();
      if (seg.size() == 3 && m == "GET") return get_session(seg[2]);
      if (seg.size() == 4 && seg[3] == "message" && m == "POST") return post_message(seg[2], parse_body(req.body));
    } else if (root == "events" && seg.size() == 2 && m == "GET") {
      return events_backlog(req);
    } else if (root == "cases" && m == "GET") {
      if (seg.size() == 2) return list_cases(req);
      if (seg.size() == 3) return get_case(seg[2]);
    } else if (root == "supervisor" && seg.size() == 3 && seg[2] == "label" && m == "POST") {
      return label(parse_body(req.body));
    } else if (root == "kb") {
      if (seg.size() == 2 && m == "GET") return get_kb();
      if (seg.size() == 3 && seg[2] == "facts" && (m == "POST" || m == "DELETE")) {
        return change_fact(m == "POST", parse_body(req.body));
      }
    }
    return error(404, "no such route: " + m + " " + req.path);
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const runtime::UnknownSession& e) {
    return error(404, e.what());
  } catch (const engine::UnknownCase& e) {
    return error(404, e.what());
  } catch (const engine::NotPending& e) {
    return error(409, e.what());
  } catch (const engine::InvalidLabel& e) {
    return error(400, e.what());
  } catch (const asp::SyntaxError& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

Response Service::create_session() {
  std::lock_guard lock(sessions_mu_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "sess-%06llu", static_cast<unsigned long long>(next_session_++));
  SessionRecord s{buf, engine::iso_timestamp(), {}, {}};
  runtime_->spawn_pipeline(s.session_id);
  sessions_[s.session_id] = s;
  persist_sessions();
  return reply(200, json{{"sessionId", s.session_id}});
}

Response Service::get_session(const std::string& id) const {
  auto s = session(id);
  if (!s) return error(404, "unknown session " + id);
  return reply(200, to_json(*s));
}

Response Service::post_message(const std::string& id, const json& body) {
  std::shared_ptr<std::mutex> turn_lock;
  {
    std::lock_guard lock(sessions_mu_);
    if (!sessions_.count(id)) return error(404, "unknown session " + id);
    auto& l = turn_locks_[id];
    if (!l) l = std::make_shared<std::mutex>();
    turn_lock = l;
  }
  std::string text = string_field(body, "text");
  std::lock_guard turn(*turn_lock);
  // Sessions restored from disk get their pipeline on first use.
  if (!runtime_->has_pipeline(id)) runtime_->spawn_pipeline(id);

  {
    std::lock_guard lock(sessions_mu_);
    append_transcript(sessions_.at(id), "client", text);
    persist_sessions();
  }
  auto outcome = runtime_->pipeline(id).run_turn(text);
  {
    std::lock_guard lock(sessions_mu_);
    auto& s = sessions_.at(id);
    append_transcript(s, "agent", outcome.answer);
    s.case_ids.push_back(outcome.case_id);
    persist_sessions();
  }

  json out{{"answer", outcome.answer},
           {"caseId", outcome.case_id},
           {"turnId", outcome.turn_id},
           {"status", engine::to_string(outcome.status)},
           {"pendingLabel", outcome.pending_label},
           {"alerted", outcome.alerted}};
  if (outcome.verdict) {
    out["verdict"] = asp::to_string(outcome.verdict->kind());
    out["record"] = asp::canonical_record(*outcome.verdict);
  } else {
    out["verdict"] = nullptr;
    out["record"] = nullptr;
  }
  json event = out;
  event["sessionId"] = id;
  event["question"] = text;
  bus_->publish("turn", event);
  return reply(200, out);
}

Response Service::list_cases(const Request& req) const {
  auto it = req.query.find("status");
  std::string status = it == req.query.end() ? "" : it->second;
  json out = json::array();
  if (status == "pending") {
    for (const auto& p : runtime_->engine().pending()) {
      json j = engine::to_json(p);
      if (auto c = runtime_->engine().find_case(p.case_id)) {
        j["question"] = c->question;
        j["answer"] = c->answer;
        j["createdAt"] = c->created_at;
        j["status"] = engine::to_string(c->status);
      }
      out.push_back(std::move(j));
    }
    return reply(200, out);
  }
  if (!status.empty() && status != "evaluated" && status != "errored") {
    return error(400, "status must be pending, evaluated or errored");
  }
  for (const auto& c : runtime_->engine().cases()) {
    if (status.empty() || engine::to_string(c.status) == status) out.push_back(engine::to_json(c));
  }
  return reply(200, out);
}

Response Service::get_case(const std::string& id) const {
  auto c = runtime_->engine().find_case(id);
  if (!c) return error(404, "unknown case " + id);
  return reply(200, engine::to_json(*c));
}

Response Service::label(const json& body) {
  auto case_id = string_field(body, "caseId");
  auto label = engine::parse_label(string_field(body, "label"));
  auto target = asp::parse_ground_atom(string_field(body, "target"));
  engine::LabelOutcome r;
  try {
    r = runtime_->engine().apply_supervisor_label(case_id, label, target);
  } catch (const engine::LearningFailed& e) {
    return error(500, e.what());
  }
  json out{{"caseId", r.case_after.case_id},
           {"status", engine::to_string(r.case_after.status)},
           {"learnedRules", rule_strings(r.kb.learned().rules)},
           {"kbVersion", r.kb.version()},
           {"hypothesisChanged", r.hypothesis_changed},
           {"case", engine::to_json(r.case_after)}};
  if (r.case_after.verdict) {
    out["verdict"] = asp::to_string(r.case_after.verdict->kind());
    out["record"] = asp::canonical_record(*r.case_after.verdict);
  } else {
    out["verdict"] = nullptr;
    out["record"] = nullptr;
  }
  return reply(200, out);
}

Response Service::get_kb() const {
  auto kb = runtime_->engine().kb();
  return reply(200, json{{"ontology", rule_strings(kb.ontology().rules())},
                         {"codeRules", rule_strings(kb.code_rules().rules())},
                         {"learnedRules", rule_strings(kb.learned().rules)},
                         {"hypothesisVersion", kb.learned().version},
                         {"version", kb.version()}});
}

Response Service::change_fact(bool add, const json& body) {
  auto text = string_field(body, "fact");
  asp::Atom fact;
  try {
    fact = asp::parse_ground_atom(text);
  } catch (const Error& e) {
    return error(400, e.what());
  }
  auto before = runtime_->engine().kb().version();
  engine::KnowledgeBase kb = [&] {
    try {
      return add ? runtime_->engine().assert_fact(fact) : runtime_->engine().retract_fact(fact);
    } catch (const asp::ArityError& e) {
      throw BadRequest(e.what());
    }
  }();
  return reply(200, json{{"fact", asp::to_string(fact)}, {"changed", kb.version() != before}, {"version", kb.version()}});
}

Response Service::events_backlog(const Request& req) const {
  auto since = req.query.count("since") ? req.query.at("since") : std::string();
  std::string out;
  for (const auto& e : bus_->since(resume_cursor(since, ""))) out += to_json(e).dump() + "\n";
  return Response{200, std::move(out), "application/x-ndjson"};
}

}  // namespace ethmon::service
