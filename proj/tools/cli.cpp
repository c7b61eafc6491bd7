#include "cli.hpp"

#include <signal.h>

#include <sstream>

#include "CLI11.hpp"
#include "ethmon/asp/parser.hpp"
#include "ethmon/asp/verdict.hpp"
#include "ethmon/engine/engine.hpp"
#include "ethmon/engine/storage.hpp"
#include "ethmon/ilp/learner.hpp"
#include "ethmon/nl/translator.hpp"
#include "ethmon/service/config.hpp"
#include "ethmon/service/http_server.hpp"
#include "ethmon/service/service.hpp"

namespace ethmon::cli {

namespace {

namespace fs = std::filesystem;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<asp::Atom> load_case(const fs::path& file) {
  auto program = asp::parse_program(engine::read_file(file));
  std::vector<asp::Atom> facts;
  for (const auto& r : program.rules()) {
    if (!r.is_fact() || !r.is_ground()) {
      throw Error("case files hold ground facts only, got: " + asp::to_string(r));
    }
    facts.push_back(r.head);
  }
  asp::sort_canonical(facts);
  return facts;
}

int cmd_eval(const fs::path& kb_dir, const fs::path& case_file, bool text, std::ostream& out) {
  auto kb = engine::load_state(kb_dir).kb;
  auto verdict = engine::evaluate_case(load_case(case_file), kb);
  if (text) {
    out << asp::to_text(verdict);
    if (!asp::to_text(verdict).ends_with('\n')) out << '\n';
  } else {
    out << asp::canonical_record(verdict) << '\n';
  }
  return 0;
}

int cmd_learn(const fs::path& kb_dir, const fs::path& examples, const fs::path& modes_file, std::ostream& out) {
  auto kb = engine::load_state(kb_dir).kb;
  auto modes = ilp::load_modes(modes_file);
  std::vector<ilp::LabeledExample> pos, neg;
  for (auto& ex : ilp::load_archive(examples)) (ex.label == ilp::Label::Positive ? pos : neg).push_back(ex);
  auto h = ilp::learn_rules(pos, neg, kb.background(), modes);
  for (const auto& r : h.rules) out << asp::to_string(r) << '\n';
  return 0;
}

int cmd_translate(const std::string& role, const std::string& text, const std::string& patterns, std::ostream& out) {
  nl::Speaker speaker;
  if (role == "client") {
    speaker = nl::Speaker::Client;
  } else if (role == "agent") {
    speaker = nl::Speaker::ServiceAgent;
  } else {
    throw Usage("--role must be client or agent");
  }
  auto table = patterns.empty() ? nl::PatternTable::builtin() : nl::PatternTable::load(patterns);
  for (const auto& r : nl::translate_turn(table, {speaker, text})) {
    for (const auto& f : r.facts) out << asp::to_string(f) << ".\n";
  }
  return 0;
}

int cmd_serve(const fs::path& config_file, const std::string& listen, std::ostream& out, std::ostream& err) {
  auto cfg = service::load_config(config_file);
  if (!listen.empty()) {
    auto overridden = service::parse_config("kb_dir=.\npatterns=.\nmodes=.\nresponder=.\nlisten=" + listen, ".");
    cfg.host = overridden.host;
    cfg.port = overridden.port;
  }
  // Block the stop signals before any thread exists so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto svc = service::Service::create(cfg);
  service::HttpServer server(*svc);
  int port = server.bind(cfg.host, cfg.port);
  server.start();
  out << "listening on http://" << cfg.host << ":" << port << std::endl;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  err << "stopping on signal " << sig << std::endl;
  server.stop();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ethics monitor for customer-service chat"};
  app.require_subcommand(1);

  std::string kb_dir, case_file, examples, modes, role, text, patterns, config, listen;
  bool as_text = false;

  auto* eval = app.add_subcommand("eval", "Evaluate one case against a knowledge base");
  eval->add_option("--kb", kb_dir, "Knowledge base directory")->required();
  eval->add_option("--case", case_file, "Ground facts of the case (.lp)")->required();
  eval->add_flag("--text", as_text, "Verdict atom and justification block instead of the JSON record");

  auto* learn = app.add_subcommand("learn", "Learn rules from labelled examples");
  learn->add_option("--kb", kb_dir, "Knowledge base directory")->required();
  learn->add_option("--examples", examples, "Labelled examples (.jsonl)")->required();
  learn->add_option("--modes", modes, "Mode declarations")->required();

  auto* translate = app.add_subcommand("translate", "Translate one utterance to facts");
  translate->add_option("--role", role, "client or agent")->required();
  translate->add_option("--patterns", patterns, "Pattern table (default: built-in)");
  translate->add_option("text", text, "Utterance")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config, "Configuration file")->required();
  serve->add_option("--listen", listen, "host:port, overrides the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_eval(kb_dir, case_file, as_text, out);
    if (*learn) return cmd_learn(kb_dir, examples, modes, out);
    if (*translate) return cmd_translate(role, text, patterns, out);
    if (*serve) return cmd_serve(config, listen, out, err);
  } catch (const Usage& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ethmon::cli
