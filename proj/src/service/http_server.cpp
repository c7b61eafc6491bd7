#include "ethmon/service/http_server.hpp"

#include <atomic>
#include <thread>

#include "httplib.h"

namespace ethmon::service {

struct HttpServer::Impl {
  Service& service;
  Options options;
  httplib::Server server;
  std::atomic<bool> stopping{false};
  std::thread thread;

  Impl(Service& s, Options o) : service(s), options(o) {}

  static Request convert(const httplib::Request& req) {
    Request r{req.method, req.path, req.body, {}};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    return r;
  }

  void route(const httplib::Request& req, httplib::Response& res) {
    auto out = service.handle(convert(req));
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  }

  void stream(const httplib::Request& req, httplib::Response& res) {
    std::uint64_t cursor;
    try {
      auto header = req.has_header("Last-Seq") ? req.get_header_value("Last-Seq")
                                               : req.get_header_value("Last-Event-ID");
      cursor = resume_cursor(req.get_param_value("since"), header);
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      return;
    }
    const bool sse = req.get_header_value("Accept").find("text/event-stream") != std::string::npos;
    EventBus& bus = service.bus();
    res.set_header("Last-Seq", std::to_string(bus.last_seq()));
    res.set_header("Cache-Control", "no-cache");

    auto frame = [sse](const Envelope& e) {
      auto line = to_json(e).dump();
      return sse ? "id: " + std::to_string(e.seq) + "\ndata: " + line + "\n\n" : line + "\n";
    };

    if (req.get_param_value("follow") == "0") {
      std::string body;
      for (const auto& e : bus.since(cursor)) body += frame(e);
      res.set_content(body, sse ? "text/event-stream" : "application/x-ndjson");
      return;
    }

    auto state = std::make_shared<std::pair<std::uint64_t, std::chrono::steady_clock::time_point>>(
        cursor, std::chrono::steady_clock::now());
    res.set_chunked_content_provider(
        sse ? "text/event-stream" : "application/x-ndjson",
        [this, &bus, state, frame, sse](std::size_t, httplib::DataSink& sink) {
          if (stopping || bus.closed()) {
            sink.done();
            return true;
          }
          // Too far behind: drop the connection, the client resumes by seq.
          if (bus.lagging(state->first)) return false;
          auto events = bus.wait_since(state->first, options.poll, 256);
          auto now = std::chrono::steady_clock::now();
          if (events.empty()) {
            if (now - state->second >= options.heartbeat) {
              std::string beat = sse ? ": keep-alive\n\n" : "\n";
              if (!sink.write(beat.data(), beat.size())) return false;
              state->second = now;
            }
            return sink.is_writable();
          }
          std::string chunk;
          for (const auto& e : events) chunk += frame(e);
          if (!sink.write(chunk.data(), chunk.size())) return false;
          state->first = events.back().seq;
          state->second = now;
          return true;
        });
  }
};

HttpServer::HttpServer(Service& service, Options options) : impl_(std::make_unique<Impl>(service, options)) {
  auto& srv = impl_->server;
  Impl* impl = impl_.get();
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Seq, Last-Event-ID");
    res.status = 204;
  });
  srv.Get("/api/events", [impl](const httplib::Request& q, httplib::Response& r) { impl->stream(q, r); });
  auto route = [impl](const httplib::Request& q, httplib::Response& r) { impl->route(q, r); };
  srv.Get(".*", route);
  srv.Post(".*", route);
  srv.Delete(".*", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    int p = srv.bind_to_any_port(host);
    if (p < 0) throw ConfigError("cannot bind " + host);
    return p;
  }
  if (!srv.bind_to_port(host, port)) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ethmon::service
