#include "ethmon/service/event_bus.hpp"

#include <algorithm>

namespace ethmon::service {

nlohmann::json to_json(const Envelope& e) {
  return nlohmann::json{{"seq", e.seq}, {"kind", e.kind}, {"body", e.body}};
}

EventBus::EventBus(Options options) : options_(std::move(options)) {
  if (!options_.journal) return;
  {
    std::ifstream in(*options_.journal);
    std::string line;
    while (std::getline(in, line)) {
      auto j = nlohmann::json::parse(line, nullptr, false);
      // A torn final line from a crash is skipped.
      if (j.is_discarded() || !j.contains("seq")) continue;
      Envelope e{j.at("seq").get<std::uint64_t>(), j.at("kind").get<std::string>(), j.at("body")};
      if (e.seq <= last_) continue;
      last_ = e.seq;
      history_.push_back(std::move(e));
      if (history_.size() > options_.retain) history_.pop_front();
    }
  }
  journal_.open(*options_.journal, std::ios::app);
}

std::uint64_t EventBus::publish(std::string kind, nlohmann::json body) {
  std::uint64_t seq;
  {
    std::lock_guard lock(mu_);
    seq = ++last_;
    history_.push_back(Envelope{seq, std::move(kind), std::move(body)});
    if (history_.size() > options_.retain) history_.pop_front();
    if (journal_.is_open()) {
      journal_ << to_json(history_.back()).dump() << '\n';
      journal_.flush();
    }
  }
  cv_.notify_all();
  return seq;
}

std::vector<Envelope> EventBus::collect(std::uint64_t after, std::size_t max) const {
  std::vector<Envelope> out;
  auto it = std::upper_bound(history_.begin(), history_.end(), after,
                             [](std::uint64_t s, const Envelope& e) { return s < e.seq; });
  for (; it != history_.end() && out.size() < max; ++it) out.push_back(*it);
  return out;
}

std::vector<Envelope> EventBus::since(std::uint64_t after, std::size_t max) const {
  std::lock_guard lock(mu_);
  return collect(after, max);
}

std::vector<Envelope> EventBus::wait_since(std::uint64_t after, std::chrono::milliseconds timeout,
                                           std::size_t max) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || last_ > after; });
  return collect(after, max);
}

std::uint64_t EventBus::last_seq() const {
  std::lock_guard lock(mu_);
  return last_;
}

bool EventBus::lagging(std::uint64_t cursor) const {
  std::lock_guard lock(mu_);
  return last_ > cursor && last_ - cursor > options_.max_lag;
}

void EventBus::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventBus::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace ethmon::service
