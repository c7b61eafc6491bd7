#include "ethmon/runtime/event_log.hpp"

#include "ethmon/engine/storage.hpp"
#include "ethmon/errors.hpp"

namespace ethmon::runtime {

EventLog::EventLog(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  out_.emplace(file, std::ios::app);
  if (!*out_) throw ConfigError("cannot open event log " + file.string());
}

void EventLog::append(nlohmann::json entry) {
  std::lock_guard lock(mu_);
  entry["ts"] = engine::iso_timestamp();
  entry["logSeq"] = entries_.size() + 1;
  if (out_) {
    *out_ << entry.dump() << '\n';
    out_->flush();
  }
  entries_.push_back(std::move(entry));
}

std::vector<nlohmann::json> EventLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::vector<nlohmann::json> EventLog::dead_letters() const {
  std::lock_guard lock(mu_);
  std::vector<nlohmann::json> out;
  for (const auto& e : entries_) {
    if (e.value("entry", "") == "dead_letter") out.push_back(e);
  }
  return out;
}

}  // namespace ethmon::runtime
