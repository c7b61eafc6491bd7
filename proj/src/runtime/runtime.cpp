#include "ethmon/runtime/runtime.hpp"

#include <array>
#include <condition_variable>
#include <deque>
#include <set>
#include <thread>

#include "ethmon/asp/parser.hpp"
#include "ethmon/ilp/modes.hpp"

namespace ethmon::runtime {

using nlohmann::json;

struct Shared {
  std::shared_ptr<engine::Engine> engine;
  std::shared_ptr<nl::Translator> translator;
  std::shared_ptr<Responder> responder;
  std::shared_ptr<EventLog> log;
  std::chrono::milliseconds deadline;

  std::mutex feed_mu;
  std::vector<AgentMessage> feed;
  FeedListener listener;

  void deliver_to_feed(const AgentMessage& m) {
    FeedListener l;
    {
      std::lock_guard lock(feed_mu);
      feed.push_back(m);
      l = listener;
    }
    if (l) l(m);
  }
};

namespace {

constexpr std::array<AgentRole, 6> kAgents{AgentRole::CA,   AgentRole::ChA, AgentRole::TEA,
                                           AgentRole::TATA, AgentRole::EEA, AgentRole::MA};

std::size_t slot(AgentRole r) { return static_cast<std::size_t>(r); }

class Mailbox {
 public:
  void push(AgentMessage m) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(m));
    }
    cv_.notify_one();
  }

  std::optional<AgentMessage> pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return std::nullopt;
    AgentMessage m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<AgentMessage> queue_;
  bool closed_ = false;
};

// Stages in the order run_turn waits for them.
enum Stage { kAnswered, kExtracted, kTranslated, kEvaluated, kMonitored, kStageCount };
constexpr std::array<const char*, kStageCount> kStageAgent{"ChA", "TEA", "TATA", "EEA", "MA"};

struct TurnState {
  std::array<bool, kStageCount> done{};
  std::string answer;
  std::string case_id;
  std::optional<asp::Verdict> verdict;
  engine::CaseStatus status = engine::CaseStatus::Evaluated;
  bool pending = false;
  bool alerted = false;
  bool alert_delivered = false;
  std::string failure;
};

}  // namespace

class Pipeline {
 public:
  Pipeline(std::string session_id, std::shared_ptr<Shared> shared)
      : session_id_(std::move(session_id)), shared_(std::move(shared)) {}

  ~Pipeline() { stop(); }

  void start() {
    for (auto role : kAgents) {
      threads_[slot(role)] = std::thread([this, role] { loop(role); });
    }
  }

  void stop() {
    for (auto role : kAgents) boxes_[slot(role)].close();
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
  }

  const std::string& session_id() const { return session_id_; }

  std::size_t live_agents() const {
    std::size_t n = 0;
    for (const auto& t : threads_) n += t.joinable();
    return n;
  }

  std::vector<ViolationAlert> chat_alerts() const {
    std::lock_guard lock(turn_mu_);
    return chat_alerts_;
  }

  Ack dispatch(AgentMessage m) {
    if (m.msg_id.empty()) m.msg_id = next_id();
    const std::string_view kind = payload_kind(m.payload);
    if (m.session_id != session_id_) {
      dead_letter(m, "session " + m.session_id + " sent to pipeline " + session_id_);
      throw RoutingError("message " + m.msg_id + " belongs to session " + m.session_id + ", not " + session_id_);
    }
    if (!is_routable(m.sender, m.recipient, kind)) {
      std::string why = std::string(to_string(m.sender)) + " -> " + std::string(to_string(m.recipient)) + " " +
                        std::string(kind) + " is not in the routing table";
      dead_letter(m, why);
      throw RoutingError(why);
    }
    {
      std::lock_guard lock(ids_mu_);
      if (!seen_.insert(m.msg_id).second) return Ack{m.msg_id, true};
    }
    json entry = to_json(m);
    entry["entry"] = "message";
    shared_->log->append(std::move(entry));
    Ack ack{m.msg_id, false};
    if (m.recipient == AgentRole::Supervisor) {
      shared_->deliver_to_feed(m);
    } else {
      boxes_[slot(m.recipient)].push(std::move(m));
    }
    return ack;
  }

  TurnOutcome run_turn(const std::string& text) {
    std::lock_guard serial(run_mu_);
    const std::string turn_id = next_id();
    {
      std::lock_guard lock(turn_mu_);
      turns_[turn_id] = TurnState{};
    }
    dispatch(AgentMessage{turn_id, AgentRole::CA, AgentRole::ChA, session_id_, turn_id, UserUtterance{text}});

    std::unique_lock lock(turn_mu_);
    for (int stage = 0; stage < kStageCount; ++stage) {
      bool ok = turn_cv_.wait_for(lock, shared_->deadline, [&] {
        const auto& t = turns_.at(turn_id);
        return t.done[stage] || !t.failure.empty();
      });
      const auto& t = turns_.at(turn_id);
      if (!t.failure.empty()) throw Error("turn " + turn_id + " failed: " + t.failure);
      if (!ok) {
        throw TimeoutError(std::string(kStageAgent[stage]) + " missed its " +
                           std::to_string(shared_->deadline.count()) + " ms deadline on turn " + turn_id);
      }
    }
    if (turns_.at(turn_id).alerted &&
        !turn_cv_.wait_for(lock, shared_->deadline, [&] { return turns_.at(turn_id).alert_delivered; })) {
      throw TimeoutError("ChA did not take delivery of the alert on turn " + turn_id);
    }
    TurnState t = turns_.at(turn_id);
    turns_.erase(turn_id);
    return TurnOutcome{turn_id, t.answer, t.case_id, t.status, t.verdict, t.pending, t.alerted};
  }

 private:
  std::string next_id() {
    std::lock_guard lock(ids_mu_);
    return session_id_ + "-m" + std::to_string(++counter_);
  }

  void dead_letter(const AgentMessage& m, const std::string& reason) {
    json entry = to_json(m);
    entry["entry"] = "dead_letter";
    entry["reason"] = reason;
    shared_->log->append(std::move(entry));
  }

  template <class F>
  void update(const std::string& turn_id, F&& f) {
    {
      std::lock_guard lock(turn_mu_);
      auto it = turns_.find(turn_id);
      if (it != turns_.end()) f(it->second);
    }
    turn_cv_.notify_all();
  }

  void send(AgentRole from, AgentRole to, const std::string& turn_id, Payload p) {
    dispatch(AgentMessage{next_id(), from, to, session_id_, turn_id, std::move(p)});
  }

  void loop(AgentRole role) {
    while (auto m = boxes_[slot(role)].pop()) {
      try {
        handle(role, *m);
      } catch (const std::exception& e) {
        dead_letter(*m, std::string(to_string(role)) + " failed: " + e.what());
        update(m->turn_id, [&](TurnState& t) { t.failure = e.what(); });
      }
    }
  }

  void handle(AgentRole role, const AgentMessage& m) {
    switch (role) {
      case AgentRole::CA: return on_client(m);
      case AgentRole::ChA: return on_chat(m);
      case AgentRole::TEA: return on_extractor(m);
      case AgentRole::TATA: return on_translator(m);
      case AgentRole::EEA: return on_evaluator(m);
      case AgentRole::MA: return on_monitor(m);
      case AgentRole::Supervisor: break;
    }
  }

  void on_client(const AgentMessage& m) {
    const auto& a = std::get<AgentAnswer>(m.payload);
    update(m.turn_id, [&](TurnState& t) {
      t.answer = a.text;
      t.done[kAnswered] = true;
    });
  }

  void on_chat(const AgentMessage& m) {
    if (const auto* alert = std::get_if<ViolationAlert>(&m.payload)) {
      {
        std::lock_guard lock(turn_mu_);
        chat_alerts_.push_back(*alert);
      }
      update(m.turn_id, [](TurnState& t) { t.alert_delivered = true; });
      return;
    }
    const auto& u = std::get<UserUtterance>(m.payload);
    AgentAnswer answer{shared_->responder->respond(u.text), u.text};
    send(AgentRole::ChA, AgentRole::CA, m.turn_id, answer);
    send(AgentRole::ChA, AgentRole::TEA, m.turn_id, answer);
  }

  void on_extractor(const AgentMessage& m) {
    const auto& a = std::get<AgentAnswer>(m.payload);
    const std::string case_id = shared_->engine->allocate_case_id();
    send(AgentRole::TEA, AgentRole::TATA, m.turn_id, ExtractedText{TurnRef{case_id, a.question, a.text}, a.text});
    update(m.turn_id, [&](TurnState& t) {
      t.case_id = case_id;
      t.done[kExtracted] = true;
    });
  }

  void on_translator(const AgentMessage& m) {
    const auto& e = std::get<ExtractedText>(m.payload);
    std::vector<asp::Atom> atoms;
    auto add = [&](nl::Speaker who, const std::string& text) {
      for (const auto& r : shared_->translator->translate({who, text})) {
        if (!r.matched_pattern) {
          shared_->log->append(json{{"entry", "untranslated"},
                                    {"sessionId", session_id_},
                                    {"caseId", e.turn.case_id},
                                    {"speaker", nl::to_string(who)},
                                    {"text", r.source_text}});
        }
        atoms.insert(atoms.end(), r.facts.begin(), r.facts.end());
      }
    };
    add(nl::Speaker::Client, e.turn.question);
    add(nl::Speaker::ServiceAgent, e.text);
    asp::sort_canonical(atoms);
    send(AgentRole::TATA, AgentRole::EEA, m.turn_id,
         TranslatedFacts{e.turn.case_id, atoms, e.turn.question, e.turn.answer});
    update(m.turn_id, [&](TurnState& t) { t.done[kTranslated] = true; });
  }

  void on_evaluator(const AgentMessage& m) {
    const auto& f = std::get<TranslatedFacts>(m.payload);
    engine::CaseScenario c;
    c.case_id = f.case_id;
    c.session_id = session_id_;
    c.question = f.question;
    c.answer = f.answer;
    c.facts = f.atoms;
    c = shared_->engine->submit_case(std::move(c));
    send(AgentRole::EEA, AgentRole::MA, m.turn_id,
         EvaluationResult{c.case_id, c.verdict, std::string(engine::to_string(c.status)), c.error});
    update(m.turn_id, [&](TurnState& t) {
      t.verdict = c.verdict;
      t.status = c.status;
      t.done[kEvaluated] = true;
    });
  }

  void on_monitor(const AgentMessage& m) {
    const auto& r = std::get<EvaluationResult>(m.payload);
    bool alerted = false;
    bool pending = r.status == engine::to_string(engine::CaseStatus::PendingLabel);
    if (r.verdict && r.verdict->kind() == asp::VerdictKind::Unethical) {
      ViolationAlert alert{r.case_id, r.verdict->subject(), asp::to_string(r.verdict->justification())};
      send(AgentRole::MA, AgentRole::ChA, m.turn_id, alert);
      send(AgentRole::MA, AgentRole::Supervisor, m.turn_id, alert);
      alerted = true;
    } else if (pending) {
      std::vector<asp::Atom> targets;
      if (auto c = shared_->engine->find_case(r.case_id)) targets = c->candidate_targets;
      send(AgentRole::MA, AgentRole::Supervisor, m.turn_id, LabelRequest{r.case_id, targets});
    }
    update(m.turn_id, [&](TurnState& t) {
      t.alerted = alerted;
      t.pending = pending;
      t.done[kMonitored] = true;
    });
  }

  std::string session_id_;
  std::shared_ptr<Shared> shared_;
  std::array<Mailbox, kAgents.size()> boxes_;
  std::array<std::thread, kAgents.size()> threads_;

  std::mutex ids_mu_;
  std::uint64_t counter_ = 0;
  std::set<std::string> seen_;

  std::mutex run_mu_;
  mutable std::mutex turn_mu_;
  std::condition_variable turn_cv_;
  std::map<std::string, TurnState> turns_;
  std::vector<ViolationAlert> chat_alerts_;
};

const std::string& PipelineHandle::session_id() const { return p_->session_id(); }
std::size_t PipelineHandle::live_agents() const { return p_->live_agents(); }
TurnOutcome PipelineHandle::run_turn(const std::string& user_text) { return p_->run_turn(user_text); }
Ack PipelineHandle::dispatch(AgentMessage m) { return p_->dispatch(std::move(m)); }
std::vector<ViolationAlert> PipelineHandle::chat_alerts() const { return p_->chat_alerts(); }

Runtime::Runtime(std::shared_ptr<engine::Engine> engine, std::shared_ptr<nl::Translator> translator,
                 std::shared_ptr<Responder> responder, std::chrono::milliseconds stage_deadline,
                 std::shared_ptr<EventLog> log)
    : shared_(std::make_shared<Shared>()) {
  shared_->engine = std::move(engine);
  shared_->translator = std::move(translator);
  shared_->responder = std::move(responder);
  shared_->log = std::move(log);
  shared_->deadline = stage_deadline;
}

Runtime::~Runtime() {
  std::map<std::string, std::shared_ptr<Pipeline>> all;
  {
    std::lock_guard lock(mu_);
    all.swap(pipelines_);
  }
  for (auto& [_, p] : all) p->stop();
}

std::unique_ptr<Runtime> Runtime::create(const RuntimeConfig& config) {
  auto modes = ilp::load_modes(config.modes);
  auto table = nl::PatternTable::load(config.patterns);
  auto responder = std::make_shared<ScriptedResponder>(ScriptedResponder::load(config.responder));
  engine::EngineOptions options{config.learner, config.state_dir};
  std::shared_ptr<engine::Engine> eng = engine::Engine::open(config.kb_dir, std::move(modes), options);
  auto log = config.event_log ? std::make_shared<EventLog>(*config.event_log) : std::make_shared<EventLog>();
  return std::make_unique<Runtime>(std::move(eng), std::make_shared<nl::Translator>(std::move(table)),
                                   std::move(responder), config.stage_deadline, std::move(log));
}

PipelineHandle Runtime::spawn_pipeline(const std::string& session_id) {
  std::lock_guard lock(mu_);
  if (session_id.empty()) throw Error("session id must not be empty");
  if (pipelines_.count(session_id)) throw DuplicateSession("session " + session_id + " already has a pipeline");
  auto p = std::make_shared<Pipeline>(session_id, shared_);
  p->start();
  pipelines_[session_id] = p;
  return PipelineHandle(p);
}

PipelineHandle Runtime::pipeline(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = pipelines_.find(session_id);
  if (it == pipelines_.end()) throw UnknownSession("unknown session " + session_id);
  return PipelineHandle(it->second);
}

bool Runtime::has_pipeline(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return pipelines_.count(session_id) != 0;
}

void Runtime::close(const std::string& session_id) {
  std::shared_ptr<Pipeline> p;
  {
    std::lock_guard lock(mu_);
    auto it = pipelines_.find(session_id);
    if (it == pipelines_.end()) return;
    p = it->second;
    pipelines_.erase(it);
  }
  p->stop();
}

engine::Engine& Runtime::engine() { return *shared_->engine; }
nl::Translator& Runtime::translator() { return *shared_->translator; }
EventLog& Runtime::log() { return *shared_->log; }

void Runtime::set_feed_listener(FeedListener listener) {
  std::lock_guard lock(shared_->feed_mu);
  shared_->listener = std::move(listener);
}

std::vector<AgentMessage> Runtime::supervisor_feed() const {
  std::lock_guard lock(shared_->feed_mu);
  return shared_->feed;
}

}  // namespace ethmon::runtime
