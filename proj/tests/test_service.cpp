#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "grieferlens/service.hpp"
#include "grieferlens/simgen.hpp"
#include "httplib.h"
#include "json.hpp"
#include "support.hpp"

using namespace grieferlens;
using grieferlens::testing::MatchBuilder;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct DataDir {
  fs::path path;
  DataDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path = fs::temp_directory_path() / ("gl-service-" + std::to_string(::getpid()) + "-" + info->name());
    fs::remove_all(path);
  }
  ~DataDir() { fs::remove_all(path); }
};

std::string simulated(std::vector<std::string> injections = {}, std::uint64_t seed = 4, std::string id = "") {
  Scenario s;
  s.seed = seed;
  s.match_id = std::move(id);
  for (const auto& i : injections) s.injections.push_back(parse_injection(i));
  return generate_match(s).telemetry;
}

json body(const Response& r) { return json::parse(r.body); }

std::string error_code(const Response& r) { return body(r)["error"]["code"]; }

std::string label_for(const std::string& player, std::vector<std::string> types, std::string extra = "") {
  json j{{"author", "rev"}, {"target_player", player}, {"kind", "label"}, {"griefer_types", types}};
  std::string s = j.dump();
  if (!extra.empty()) s = s.substr(0, s.size() - 1) + "," + extra + "}";
  return s;
}

}  // namespace

TEST(Service, IngestStatuses) {
  DataDir dir;
  Service svc(dir.path);
  const std::string doc = simulated({}, 4, "m-1");
  auto first = svc.post_match(doc);
  EXPECT_EQ(first.status, 201);
  EXPECT_EQ(body(first)["match_id"], "m-1");
  auto again = svc.post_match(doc);
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(body(again)["match_id"], "m-1");
  auto changed = svc.post_match(simulated({}, 5, "m-1"));
  EXPECT_EQ(changed.status, 409);
  EXPECT_EQ(error_code(changed), "Conflict");

  json nine = json::parse(simulated({}, 6, "m-9"));
  nine["players"].erase(nine["players"].end() - 1);
  auto bad = svc.post_match(nine.dump());
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(error_code(bad), "InvariantViolation");
  EXPECT_NE(body(bad)["error"]["message"].get<std::string>().find("10"), std::string::npos);

  EXPECT_EQ(svc.post_match("{not json").status, 400);
  json unsafe = json::parse(simulated({}, 7));
  unsafe["match_id"] = "../escape";
  EXPECT_EQ(svc.post_match(unsafe.dump()).status, 400);
  EXPECT_EQ(svc.match_ids(), (std::vector<std::string>{"m-1"}));
  EXPECT_EQ(body(svc.list_matches())["matches"], json::array({"m-1"}));
}

TEST(Service, Summaries) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(simulated({}, 11, "base"));
  svc.post_match(simulated({"P03:afk:200-400"}, 4, "afk"));

  auto base = body(svc.get_summary("base"));
  EXPECT_EQ(base["config_hash"], svc.config_hash());
  ASSERT_EQ(base["players"].size(), 10u);
  for (const auto& p : base["players"]) {
    EXPECT_EQ(p["suspicion_paragraph"], std::string(kNoSuspicionText));
    EXPECT_TRUE(p["findings"].empty());
    EXPECT_TRUE(p.contains("hero_type"));
    EXPECT_TRUE(p.contains("report_count"));
  }
  auto afk = body(svc.get_summary("afk"));
  EXPECT_EQ(afk["players"][2]["player_id"], "P03");
  ASSERT_FALSE(afk["players"][2]["findings"].empty());
  EXPECT_EQ(afk["players"][2]["findings"][0]["griefer_type"], "afk");

  auto missing = svc.get_summary("nope");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(error_code(missing), "NotFound");
}

TEST(Service, SummaryCacheIsKeyedByConfig) {
  DataDir dir;
  {
    Service svc(dir.path);
    svc.post_match(simulated({}, 11, "m"));
    EXPECT_TRUE(fs::exists(dir.path / "matches" / "m" / ("summary." + svc.config_hash() + ".json")));
  }
  DetectorConfig strict;
  strict.feeding.min_deaths = 2;
  strict.feeding.kda_ratio = 0.1;
  Service svc(dir.path, strict);
  EXPECT_NE(svc.config_hash(), config_hash(DetectorConfig{}));
  EXPECT_TRUE(fs::exists(dir.path / "matches" / "m" / ("summary." + svc.config_hash() + ".json")));
  EXPECT_EQ(body(svc.get_summary("m"))["config_hash"], svc.config_hash());
}

TEST(Service, Timeline) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(simulated({"P07:feeding"}, 4, "m"));
  auto r = svc.get_timeline("m", {{"player", "P07"}});
  ASSERT_EQ(r.status, 200);
  auto j = body(r);
  EXPECT_EQ(j["series"]["contribution"]["values"].size(), 60u);
  EXPECT_EQ(j["series"]["gold"]["values"].size(), 60u);
  EXPECT_EQ(j["series"]["jungle_share"]["values"].size(), 60u);
  EXPECT_EQ(j["players"].size(), 10u);
  EXPECT_EQ(j["team_fights"].size(), 4u);

  // suspicious ranges are exactly the findings' ranges
  auto summary = body(svc.get_summary("m"));
  json expected = json::array();
  for (const auto& p : summary["players"]) {
    for (const auto& f : p["findings"]) {
      expected.push_back({{"player_id", p["player_id"]}, {"griefer_type", f["griefer_type"]}, {"time_ranges", f["time_ranges"]}});
    }
  }
  EXPECT_EQ(j["suspicious_ranges"], expected);
  for (const auto& s : j["suspicious_ranges"]) EXPECT_EQ(s["player_id"], "P07");

  int deaths = 0;
  for (const auto& ev : j["players"][6]["events"]) deaths += ev["kind"] == "death";
  EXPECT_GE(deaths, 10);

  EXPECT_EQ(svc.get_timeline("m", {{"player", "P07"}}).body, r.body);
  EXPECT_EQ(svc.get_timeline("m", {{"player", "P42"}}).status, 404);
  EXPECT_EQ(svc.get_timeline("m", {}).status, 400);
  EXPECT_EQ(svc.get_timeline("x", {{"player", "P07"}}).status, 404);
}

TEST(Service, HeatmapHotCells) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(serialize_match(MatchBuilder(600, "parked").record()));
  EXPECT_EQ(heatmap_hot_threshold_s(), 30.0);

  auto hot = body(svc.get_heatmap("parked", {{"player", "P02"}, {"from", "100"}, {"to", "139"}}));
  EXPECT_EQ(hot["grid_n"], 64);
  ASSERT_EQ(hot["hot_cells"].size(), 1u);
  EXPECT_EQ(hot["hot_cells"][0]["seconds"], 40);
  EXPECT_EQ(hot["total_s"], 40);

  auto cool = body(svc.get_heatmap("parked", {{"player", "P02"}, {"from", "100"}, {"to", "124"}}));
  EXPECT_TRUE(cool["hot_cells"].empty());
  int flagged = 0;
  for (const auto& row : cool["hot"]) {
    for (const auto& h : row) flagged += h.get<bool>();
  }
  EXPECT_EQ(flagged, 0);

  EXPECT_EQ(svc.get_heatmap("parked", {{"player", "P02"}, {"from", "300"}, {"to", "200"}}).status, 400);
  EXPECT_EQ(error_code(svc.get_heatmap("parked", {{"player", "P02"}, {"from", "300"}, {"to", "200"}})), "BadWindow");
  EXPECT_EQ(svc.get_heatmap("parked", {{"player", "P02"}, {"grid", "0"}}).status, 400);
  EXPECT_EQ(svc.get_heatmap("parked", {{"player", "P02"}, {"grid", "2.5"}}).status, 400);
  EXPECT_EQ(svc.get_heatmap("parked", {{"player", "P02"}, {"from", "abc"}}).status, 400);
  EXPECT_EQ(body(svc.get_heatmap("parked", {{"player", "P02"}, {"grid", "8"}}))["cells"].size(), 8u);
}

TEST(Service, Trajectory) {
  DataDir dir;
  Service svc(dir.path);
  MatchBuilder b(600, "traj");
  b.sample(0, "P01", {0.1, 0.5}).sample(200, "P01", {0.3, 0.5});
  b.kill(100, "P06", "P01").respawn(130, "P01");
  svc.post_match(serialize_match(b.record()));

  auto alive = body(svc.get_trajectory("traj", {{"player", "P01"}, {"from", "0"}, {"to", "90"}}));
  EXPECT_EQ(alive["polylines"].size(), 1u);
  auto split = body(svc.get_trajectory("traj", {{"player", "P01"}, {"from", "50"}, {"to", "200"}}));
  EXPECT_GE(split["polylines"].size(), 2u);
  auto unknown = svc.get_trajectory("traj", {{"player", "P77"}});
  EXPECT_EQ(unknown.status, 404);
  EXPECT_EQ(error_code(unknown), "UnknownPlayer");
}

TEST(Service, AnnotationsRoundTripAndValidation) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(simulated({}, 11, "m"));

  auto created = svc.post_annotation("m", label_for("P03", {"jungle_stealing", "non_participation", "jungle_stealing"}));
  ASSERT_EQ(created.status, 201) << created.body;
  auto rec = body(created);
  EXPECT_FALSE(rec["annotation_id"].get<std::string>().empty());
  EXPECT_EQ(rec["griefer_types"], json::array({"jungle_stealing", "non_participation"}));
  EXPECT_EQ(rec["created_at"].get<std::string>().size(), 24u);

  json note{{"target_player", "P03"}, {"kind", "note"}, {"time_range", {780, 840}},
            {"tags", {"aimless", "fountain"}}, {"text", "wandering near fountain"}};
  auto n = svc.post_annotation("m", note.dump());
  ASSERT_EQ(n.status, 201) << n.body;

  auto list = body(svc.list_annotations("m"))["annotations"];
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0]["annotation_id"], rec["annotation_id"]);
  EXPECT_EQ(list[1]["time_range"], json::array({780, 840}));
  EXPECT_EQ(list[1]["tags"], json::array({"aimless", "fountain"}));
  EXPECT_LE(list[0]["created_at"].get<std::string>(), list[1]["created_at"].get<std::string>());

  auto status = [&](const std::string& b) { return svc.post_annotation("m", b).status; };
  EXPECT_EQ(status(label_for("P03", {"afk"}, R"("time_range": [100, 1300])")), 400);
  EXPECT_EQ(status(label_for("P03", {"afk"}, R"("time_range": [300, 200])")), 400);
  EXPECT_EQ(status(label_for("P03", {})), 400);
  EXPECT_EQ(status(label_for("P99", {"afk"})), 400);
  EXPECT_EQ(status(label_for("P03", {"griefing"})), 400);
  EXPECT_EQ(status(label_for("P03", {"afk"}, R"("annotation_id": "a-1")")), 400);
  EXPECT_EQ(status(R"({"target_player": "P03", "kind": "note"})"), 400);
  EXPECT_EQ(status("[]"), 400);
  EXPECT_EQ(svc.post_annotation("zzz", label_for("P03", {"afk"})).status, 404);
  EXPECT_EQ(body(svc.list_annotations("m"))["annotations"].size(), 2u);
}

TEST(Service, TombstonesAndRestart) {
  DataDir dir;
  std::string keep, gone;
  {
    Service svc(dir.path);
    svc.post_match(simulated({}, 11, "m"));
    keep = body(svc.post_annotation("m", label_for("P01", {"afk"})))["annotation_id"];
    gone = body(svc.post_annotation("m", label_for("P02", {"feeding"})))["annotation_id"];
    EXPECT_EQ(svc.delete_annotation("m", gone).status, 200);
    EXPECT_EQ(svc.delete_annotation("m", gone).status, 404);
    EXPECT_EQ(svc.delete_annotation("m", "a-999999").status, 404);
  }
  Service svc(dir.path);
  auto list = body(svc.list_annotations("m"))["annotations"];
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["annotation_id"], keep);
  auto fresh = body(svc.post_annotation("m", label_for("P04", {"afk"})))["annotation_id"].get<std::string>();
  EXPECT_NE(fresh, keep);
  EXPECT_NE(fresh, gone);

  // history is retained on disk
  std::ifstream log(dir.path / "matches" / "m" / "annotations.ndjson");
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Service, TornLogTailIsIgnored) {
  DataDir dir;
  {
    Service svc(dir.path);
    svc.post_match(simulated({}, 11, "m"));
    svc.post_annotation("m", label_for("P01", {"afk"}));
  }
  {
    std::ofstream log(dir.path / "matches" / "m" / "annotations.ndjson", std::ios::app);
    log << R"({"op":"create","record":{"annotation_id":"a-0000)";
  }
  Service svc(dir.path);
  EXPECT_EQ(body(svc.list_annotations("m"))["annotations"].size(), 1u);
  EXPECT_EQ(svc.post_annotation("m", label_for("P02", {"afk"})).status, 201);
  Service again(dir.path);
  EXPECT_EQ(body(again.list_annotations("m"))["annotations"].size(), 2u);
}

TEST(Service, ConcurrentPostsAreAllKept) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(simulated({}, 11, "m"));
  constexpr int kThreads = 8, kEach = 25;
  std::vector<std::thread> threads;
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&, i] {
      for (int k = 0; k < kEach; ++k) {
        svc.post_annotation("m", label_for("P0" + std::to_string(1 + (i + k) % 9), {"afk"}));
        svc.get_summary("m");
      }
    });
  }
  for (auto& t : threads) t.join();
  auto list = body(svc.list_annotations("m"))["annotations"];
  EXPECT_EQ(list.size(), static_cast<std::size_t>(kThreads * kEach));
  std::set<std::string> ids;
  for (const auto& r : list) ids.insert(r["annotation_id"]);
  EXPECT_EQ(ids.size(), list.size());
  Service reloaded(dir.path);
  EXPECT_EQ(body(reloaded.list_annotations("m"))["annotations"].size(), list.size());
}

TEST(Service, ExportCombinesSources) {
  DataDir dir;
  Service svc(dir.path);
  svc.post_match(simulated({"P03:afk:200-400"}, 4, "afk"));
  svc.post_match(simulated({}, 11, "base"));

  auto empty = body(svc.export_labels("base"));
  EXPECT_EQ(empty["match_id"], "base");
  EXPECT_EQ(empty["config_hash"], svc.config_hash());
  EXPECT_TRUE(empty["entries"].is_array());
  EXPECT_TRUE(empty["entries"].empty());

  svc.post_annotation("afk", label_for("P03", {"afk"}, R"("time_range": [200, 400])"));
  auto first = svc.export_labels("afk");
  auto j = body(first);
  ASSERT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][0]["source"], "algorithm");
  EXPECT_EQ(j["entries"][0]["griefer_types"], json::array({"afk"}));
  EXPECT_EQ(j["entries"][1]["source"], "human");
  EXPECT_EQ(j["entries"][1]["time_ranges"], json::array({json::array({200, 400})}));
  EXPECT_EQ(svc.export_labels("afk").body, first.body);
  EXPECT_EQ(svc.export_labels("none").status, 404);
}

TEST(Service, ErrorMapping) {
  EXPECT_EQ(http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(http_status(ErrorCode::unknown_player), 404);
  EXPECT_EQ(http_status(ErrorCode::conflict), 409);
  EXPECT_EQ(http_status(ErrorCode::io_failure), 500);
  EXPECT_EQ(http_status(ErrorCode::bad_window), 400);
  EXPECT_EQ(http_status(ErrorCode::schema_violation), 400);
  auto j = json::parse(error_body(Error(ErrorCode::bad_time, "t out of range", "events[3].t")));
  EXPECT_EQ(j, json::parse(R"({"error": {"code": "BadTime", "message": "t out of range", "path": "events[3].t"}})"));
}

TEST(HttpServer, ServesRoutesOverSockets) {
  DataDir dir;
  Service svc(dir.path);
  HttpServer server(svc);
  int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto health = cli.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  auto posted = cli.Post("/matches", simulated({}, 11, "net"), "application/json");
  ASSERT_TRUE(posted);
  EXPECT_EQ(posted->status, 201);
  auto summary = cli.Get("/matches/net/summary");
  ASSERT_TRUE(summary);
  EXPECT_EQ(summary->status, 200);
  EXPECT_EQ(summary->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(json::parse(summary->body)["players"].size(), 10u);

  auto heat = cli.Get("/matches/net/heatmap?player=P01&from=10&to=70&grid=16");
  ASSERT_TRUE(heat);
  EXPECT_EQ(json::parse(heat->body)["total_s"], 61);

  auto ann = cli.Post("/matches/net/annotations", label_for("P01", {"afk"}), "application/json");
  ASSERT_TRUE(ann);
  EXPECT_EQ(ann->status, 201);
  std::string aid = json::parse(ann->body)["annotation_id"];
  auto del = cli.Delete("/matches/net/annotations/" + aid);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  auto exported = cli.Get("/matches/net/labels/export");
  ASSERT_TRUE(exported);
  EXPECT_TRUE(json::parse(exported->body)["entries"].empty());

  auto missing = cli.Get("/no/such/route");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["error"]["code"], "NotFound");
  auto preflight = cli.Options("/matches/net/annotations");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);

  server.stop();
  loop.join();
}
