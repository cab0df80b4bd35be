#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "grieferlens/detect.hpp"
#include "grieferlens/service.hpp"
#include "grieferlens/spatial.hpp"
#include "json.hpp"

using namespace grieferlens;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path, path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Common {
  std::string data = "data";
  std::string config;
  std::string layout;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "Data directory")->capture_default_str();
    cmd->add_option("--config", config, "Analysis config JSON (defaults when omitted)");
    cmd->add_option("--layout", layout, "Zone layout JSON (built-in layout when omitted)");
  }

  std::unique_ptr<Service> open() const {
    DetectorConfig cfg = config.empty() ? DetectorConfig{} : config_from_json(slurp(config));
    ZoneLayout zones = layout.empty() ? default_layout() : layout_from_json(slurp(layout));
    return std::make_unique<Service>(data, std::move(cfg), std::move(zones));
  }
};

int serve(const Common& common, const std::string& host, int port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto service = common.open();
  HttpServer server(*service);
  int bound = server.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "error: cannot bind %s:%d\n", host.c_str(), port);
    return 1;
  }
  std::printf("listening on http://%s:%d (config %s, %zu matches)\n", host.c_str(), bound,
              service->config_hash().c_str(), service->match_ids().size());
  std::fflush(stdout);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return 0;
}

int ingest(const Common& common, const std::vector<std::string>& files) {
  auto service = common.open();
  int failures = 0;
  for (const auto& f : files) {
    Response r;
    try {
      r = service->post_match(slurp(f));
    } catch (const Error& e) {
      r = {http_status(e.code()), error_body(e)};
    }
    std::printf("%s %d %s\n", f.c_str(), r.status, r.body.c_str());
    if (r.status >= 300) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

int report(const Common& common, const std::string& match_id, bool text) {
  auto service = common.open();
  Response r = service->get_summary(match_id);
  if (r.status != 200) {
    std::fprintf(stderr, "%s\n", r.body.c_str());
    return 1;
  }
  auto doc = nlohmann::ordered_json::parse(r.body);
  if (!text) {
    std::printf("%s\n", doc.dump(2).c_str());
    return 0;
  }
  for (const auto& p : doc["players"]) {
    std::printf("%s  %-8s %-11s reports=%d\n  %s\n", p["player_id"].get<std::string>().c_str(),
                p["hero_type"].get<std::string>().c_str(), p["assigned_position"].get<std::string>().c_str(),
                p["report_count"].get<int>(), p["suspicion_paragraph"].get<std::string>().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grieferlens: griefing analysis for MOBA match telemetry"};
  app.require_subcommand(1);

  Common common;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  common.add_to(serve_cmd);
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port, "0 picks a free port")->capture_default_str();

  std::vector<std::string> files;
  auto* ingest_cmd = app.add_subcommand("ingest", "Store telemetry files and compute their summaries");
  common.add_to(ingest_cmd);
  ingest_cmd->add_option("files", files, "Telemetry JSON files")->required();

  std::string match_id;
  bool text = false;
  auto* report_cmd = app.add_subcommand("report", "Print the player summaries of a stored match");
  common.add_to(report_cmd);
  report_cmd->add_option("match_id", match_id)->required();
  report_cmd->add_flag("--text", text, "Plain-text paragraphs instead of JSON");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve_cmd) return serve(common, host, port);
    if (*ingest_cmd) return ingest(common, files);
    if (*report_cmd) return report(common, match_id, text);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 1;
  }
  return 0;
}
