#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "ethmon/service/service.hpp"

namespace ethmon::service {

/// GET /api/events streams envelopes as JSON lines, or as server-sent events
/// (`id:` = seq) when the client accepts text/event-stream. The cursor is the
/// larger of `?since=` and the Last-Seq / Last-Event-ID header. `?follow=0`
/// returns the backlog and closes.
class HttpServer {
 public:
  struct Options {
    std::chrono::milliseconds poll{250};
    /// Blank keep-alive after this much silence, which also detects gone clients.
    std::chrono::milliseconds heartbeat{10000};
  };

  explicit HttpServer(Service& service) : HttpServer(service, Options{}) {}
  HttpServer(Service& service, Options options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws ConfigError.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  /// Ends open streams and the listener. Safe to call twice.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ethmon::service
