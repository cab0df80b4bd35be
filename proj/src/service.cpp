#include "grieferlens/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <tuple>

#include "grieferlens/metrics.hpp"
#include "httplib.h"
#include "json_util.hpp"
#include "serialize.hpp"

namespace grieferlens {

using jsonutil::json;
using jsonutil::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kHotThresholdS = 30.0;
constexpr int kDefaultGrid = 64;
constexpr int kMaxGrid = 1024;

[[noreturn]] void fail(ErrorCode code, const std::string& message, const std::string& path = {}) {
  throw Error(code, message, path);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::io_failure, "cannot read " + p.string(), p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(int fd, std::string_view data, const fs::path& p) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::io_failure, "write failed: " + p.string(), p.string());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

/// Write to a temp file, fsync, then rename over the target.
void write_durable(const fs::path& p, std::string_view data) {
  fs::path tmp = p;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::io_failure, "cannot open " + tmp.string(), tmp.string());
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    fail(ErrorCode::io_failure, "fsync failed: " + tmp.string(), tmp.string());
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) fail(ErrorCode::io_failure, "rename failed: " + ec.message(), p.string());
  fsync_dir(p.parent_path());
}

bool safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  });
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
  return buf;
}

Response ok(const ordered_json& j, int status = 200) { return {status, j.dump()}; }

template <typename F>
Response guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e)};
  } catch (const std::exception& e) {
    return {500, error_body(Error(ErrorCode::io_failure, e.what()))};
  }
}

double query_number(const Query& q, const std::string& key, double fallback) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size() || !std::isfinite(v)) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::malformed_input, key + ": expected a number", key);
  }
}

std::string query_player(const Query& q, const MatchTelemetry& match) {
  auto it = q.find("player");
  if (it == q.end() || it->second.empty()) fail(ErrorCode::schema_violation, "player: missing query parameter", "player");
  match.player_index(it->second);
  return it->second;
}

ordered_json annotation_json(const AnnotationRecord& r) {
  ordered_json j;
  j["annotation_id"] = r.annotation_id;
  j["match_id"] = r.match_id;
  j["author"] = r.author;
  j["created_at"] = r.created_at;
  j["target_player"] = r.target_player;
  j["kind"] = to_string(r.kind);
  ordered_json types = ordered_json::array();
  for (GrieferType g : r.griefer_types) types.push_back(to_string(g));
  j["griefer_types"] = std::move(types);
  j["time_range"] = r.time_range ? serialize::interval_json(*r.time_range) : ordered_json(nullptr);
  j["tags"] = r.tags;
  j["text"] = r.text;
  return j;
}

AnnotationRecord annotation_from_json(const json& j) {
  AnnotationRecord r;
  r.annotation_id = jsonutil::string_field(j, "annotation_id", "");
  r.match_id = jsonutil::string_field(j, "match_id", "");
  r.author = jsonutil::string_field(j, "author", "");
  r.created_at = jsonutil::string_field(j, "created_at", "");
  r.target_player = jsonutil::string_field(j, "target_player", "");
  r.kind = jsonutil::enum_field(j, "kind", "", kAnnotationKindNames);
  for (const auto& g : j.at("griefer_types")) r.griefer_types.push_back(*detail::value_of(kGrieferTypeNames, g.get<std::string>()));
  if (!j.at("time_range").is_null()) r.time_range = Interval{j["time_range"][0].get<double>(), j["time_range"][1].get<double>()};
  r.tags = j.at("tags").get<std::vector<std::string>>();
  r.text = jsonutil::string_field(j, "text", "");
  return r;
}

/// Validates a client-submitted record (everything but id and created_at).
AnnotationRecord parse_annotation_input(std::string_view body, const MatchTelemetry& match) {
  json j = jsonutil::parse_or_throw(body);
  if (!j.is_object()) jsonutil::schema_error("", "expected object");
  static const std::set<std::string> allowed{"match_id", "author", "target_player", "kind",
                                             "griefer_types", "time_range", "tags", "text"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) jsonutil::schema_error(key, "unknown or server-assigned field");
  }
  AnnotationRecord r;
  r.match_id = match.match_id();
  if (j.contains("match_id") && jsonutil::string_field(j, "match_id", "") != match.match_id()) {
    jsonutil::schema_error("match_id", "does not match the request path");
  }
  if (j.contains("author")) r.author = jsonutil::string_field(j, "author", "");
  r.target_player = jsonutil::string_field(j, "target_player", "");
  if (!match.in_roster(r.target_player)) {
    fail(ErrorCode::invariant_violation, "target_player: '" + r.target_player + "' is not in the roster",
         "target_player");
  }
  r.kind = jsonutil::enum_field(j, "kind", "", kAnnotationKindNames);
  if (j.contains("griefer_types")) {
    const json& types = jsonutil::array_field(j, "griefer_types", "");
    std::set<GrieferType> set;
    for (std::size_t i = 0; i < types.size(); ++i) {
      std::string path = jsonutil::index("griefer_types", i);
      if (!types[i].is_string()) jsonutil::schema_error(path, "expected string");
      auto g = detail::value_of(kGrieferTypeNames, types[i].get<std::string>());
      if (!g) jsonutil::schema_error(path, "unknown griefer type '" + types[i].get<std::string>() + "'");
      set.insert(*g);
    }
    r.griefer_types.assign(set.begin(), set.end());
  }
  if (r.kind == AnnotationKind::label && r.griefer_types.empty()) {
    fail(ErrorCode::invariant_violation, "griefer_types: a label needs at least one type", "griefer_types");
  }
  if (j.contains("time_range") && !j["time_range"].is_null()) {
    const json& tr = j["time_range"];
    if (!tr.is_array() || tr.size() != 2) jsonutil::schema_error("time_range", "expected [t0, t1]");
    double t0 = jsonutil::get_number(tr[0], "time_range[0]");
    double t1 = jsonutil::get_number(tr[1], "time_range[1]");
    if (!(t0 >= 0.0 && t0 <= t1 && t1 <= match.duration())) {
      fail(ErrorCode::invariant_violation, "time_range: need 0 <= t0 <= t1 <= duration_s", "time_range");
    }
    r.time_range = Interval{t0, t1};
  }
  if (j.contains("tags")) {
    const json& tags = jsonutil::array_field(j, "tags", "");
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (!tags[i].is_string()) jsonutil::schema_error(jsonutil::index("tags", i), "expected string");
      r.tags.push_back(tags[i].get<std::string>());
    }
  }
  if (j.contains("text")) r.text = jsonutil::string_field(j, "text", "");
  if (r.kind == AnnotationKind::note && r.text.empty()) {
    fail(ErrorCode::invariant_violation, "text: a note needs text", "text");
  }
  return r;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_player:
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::io_failure: return 500;
    default: return 400;
  }
}

std::string error_body(const Error& e) {
  ordered_json j;
  j["error"]["code"] = to_string(e.code());
  j["error"]["message"] = e.what();
  j["error"]["path"] = e.path();
  return j.dump();
}

double heatmap_hot_threshold_s() { return kHotThresholdS; }

struct Service::Entry {
  fs::path dir;
  std::string canonical;
  MatchTelemetry match;
  std::vector<PlayerSummary> summaries;
  std::vector<TeamFight> fights;

  mutable std::mutex log_mutex;
  std::vector<AnnotationRecord> annotations;  // in log order
  std::set<std::string> deleted;
  long next_id = 1;

  Entry(fs::path d, std::string c, MatchTelemetry m) : dir(std::move(d)), canonical(std::move(c)), match(std::move(m)) {}

  fs::path log_path() const { return dir / "annotations.ndjson"; }

  void replay_log() {
    if (!fs::exists(log_path())) return;
    const std::string raw = read_file(log_path());
    std::size_t good = 0;
    while (good < raw.size()) {
      const std::size_t nl = raw.find('\n', good);
      if (nl == std::string::npos) break;
      const std::string_view line(raw.data() + good, nl - good);
      if (!line.empty()) {
        json op;
        try {
          op = json::parse(line);
        } catch (const json::parse_error&) {
          break;
        }
        if (op.value("op", "") == "create") {
          AnnotationRecord r = annotation_from_json(op.at("record"));
          long n = std::strtol(r.annotation_id.c_str() + 2, nullptr, 10);
          next_id = std::max(next_id, n + 1);
          annotations.push_back(std::move(r));
        } else if (op.value("op", "") == "delete") {
          deleted.insert(op.at("annotation_id").get<std::string>());
        }
      }
      good = nl + 1;
    }
    if (good < raw.size()) {
      // drop a torn tail left by an interrupted write
      std::error_code ec;
      fs::resize_file(log_path(), good, ec);
      if (ec) fail(ErrorCode::io_failure, "cannot truncate " + log_path().string() + ": " + ec.message(), log_path().string());
    }
  }

  void append(const ordered_json& op) {
    std::string line = op.dump() + "\n";
    int fd = ::open(log_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::io_failure, "cannot open " + log_path().string(), log_path().string());
    try {
      write_all(fd, line, log_path());
    } catch (...) {
      ::close(fd);
      throw;
    }
    int rc = ::fsync(fd);
    ::close(fd);
    if (rc != 0) fail(ErrorCode::io_failure, "fsync failed: " + log_path().string(), log_path().string());
  }

  std::vector<AnnotationRecord> live() const {
    std::vector<AnnotationRecord> out;
    for (const auto& r : annotations) {
      if (!deleted.count(r.annotation_id)) out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
      return std::tie(a.created_at, a.annotation_id) < std::tie(b.created_at, b.annotation_id);
    });
    return out;
  }
};

Service::Service(fs::path data_dir, DetectorConfig config, ZoneLayout layout)
    : root_(std::move(data_dir)), config_(std::move(config)), layout_(std::move(layout)) {
  validate_config(config_);
  config_hash_ = grieferlens::config_hash(config_);
  std::error_code ec;
  fs::create_directories(root_ / "matches", ec);
  if (ec) fail(ErrorCode::io_failure, "cannot create " + (root_ / "matches").string() + ": " + ec.message());
  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(root_ / "matches")) {
    if (d.is_directory() && fs::exists(d.path() / "telemetry.json")) dirs.push_back(d.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    auto entry = load_entry(d);
    matches_[entry->match.match_id()] = entry;
  }
}

Service::~Service() = default;

std::vector<PlayerSummary> Service::summaries_for(const MatchTelemetry& match, const fs::path& dir) const {
  fs::path cache = dir / ("summary." + config_hash_ + ".json");
  if (fs::exists(cache)) {
    try {
      return summaries_from_json(read_file(cache));
    } catch (const Error&) {
      // unreadable cache: recompute below
    }
  }
  auto summaries = run_all_detectors(match, layout_, config_);
  write_durable(cache, summaries_to_json(summaries));
  return summaries;
}

std::shared_ptr<Service::Entry> Service::load_entry(const fs::path& dir) {
  std::string raw = read_file(dir / "telemetry.json");
  MatchTelemetry match = parse_match(raw);
  auto entry = std::make_shared<Entry>(dir, std::move(raw), std::move(match));
  entry->summaries = summaries_for(entry->match, dir);
  entry->fights = detect_team_fights(entry->match, config_.team_fight);
  entry->replay_log();
  return entry;
}

std::shared_ptr<Service::Entry> Service::find(const std::string& match_id) const {
  std::shared_lock lock(mutex_);
  auto it = matches_.find(match_id);
  return it == matches_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::Entry> Service::require(const std::string& match_id) const {
  auto e = find(match_id);
  if (!e) fail(ErrorCode::not_found, "unknown match '" + match_id + "'", "match_id");
  return e;
}

std::vector<std::string> Service::match_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, e] : matches_) ids.push_back(id);
  return ids;
}

Response Service::post_match(std::string_view body) {
  return guarded([&] {
    MatchTelemetry match = parse_match(body);
    const std::string id = match.match_id();
    if (!safe_id(id)) {
      fail(ErrorCode::schema_violation, "match_id: use 1-128 characters from [A-Za-z0-9._-]", "match_id");
    }
    std::string canonical = serialize_match(match.record());
    ordered_json reply;
    reply["match_id"] = id;

    std::unique_lock lock(mutex_);
    if (auto it = matches_.find(id); it != matches_.end()) {
      if (it->second->canonical != canonical) {
        fail(ErrorCode::conflict, "match '" + id + "' already exists with different content", "match_id");
      }
      return ok(reply, 200);
    }
    fs::path dir = root_ / "matches" / id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io_failure, "cannot create " + dir.string() + ": " + ec.message(), dir.string());
    auto entry = std::make_shared<Entry>(dir, canonical, std::move(match));
    entry->summaries = summaries_for(entry->match, dir);
    entry->fights = detect_team_fights(entry->match, config_.team_fight);
    // telemetry.json last: its presence marks a complete match directory
    write_durable(dir / "telemetry.json", canonical);
    fsync_dir(dir.parent_path());
    matches_[id] = entry;
    return ok(reply, 201);
  });
}

Response Service::list_matches() const {
  return guarded([&] {
    ordered_json j;
    j["matches"] = match_ids();
    return ok(j);
  });
}

Response Service::get_summary(const std::string& match_id) const {
  return guarded([&] {
    auto e = require(match_id);
    ordered_json j;
    j["match_id"] = match_id;
    j["config_hash"] = config_hash_;
    j["players"] = serialize::summaries_json(e->summaries);
    return ok(j);
  });
}

Response Service::get_timeline(const std::string& match_id, const Query& query) const {
  return guarded([&] {
    auto e = require(match_id);
    const MatchTelemetry& m = e->match;
    std::string player = query_player(query, m);

    std::map<std::string, ordered_json> per_player;
    for (const auto& p : m.players()) per_player[p.player_id] = ordered_json::array();
    auto add = [&](const std::string& pid, ordered_json ev) { per_player[pid].push_back(std::move(ev)); };
    for (const auto& ev : m.events()) {
      const double t = serialize::fixed(ev.t);
      switch (ev.kind) {
        case EventKind::kill: {
          const auto* k = ev.as<KillInfo>();
          add(ev.actor, {{"t", t}, {"kind", "kill"}, {"victim", k->victim}});
          add(k->victim, {{"t", t}, {"kind", "death"}, {"killer", ev.actor}});
          for (const auto& a : k->assists) add(a, {{"t", t}, {"kind", "assist"}, {"victim", k->victim}});
          break;
        }
        case EventKind::objective: {
          const auto* o = ev.as<ObjectiveInfo>();
          add(ev.actor, {{"t", t}, {"kind", "objective"}, {"subtype", to_string(o->subtype)}, {"team", to_string(o->team)}});
          break;
        }
        case EventKind::recall: add(ev.actor, {{"t", t}, {"kind", "recall"}}); break;
        case EventKind::respawn: add(ev.actor, {{"t", t}, {"kind", "respawn"}}); break;
        default: break;
      }
    }

    ordered_json j;
    j["match_id"] = match_id;
    j["duration_s"] = serialize::fixed(m.duration());
    j["config_hash"] = config_hash_;
    j["player"] = player;
    ordered_json players = ordered_json::array();
    for (const auto& p : m.players()) {
      ordered_json pj;
      pj["player_id"] = p.player_id;
      pj["team"] = to_string(p.team);
      pj["hero_type"] = to_string(p.hero_type);
      pj["assigned_position"] = to_string(p.assigned_position);
      pj["events"] = std::move(per_player[p.player_id]);
      players.push_back(std::move(pj));
    }
    j["players"] = std::move(players);
    ordered_json fights = ordered_json::array();
    for (const auto& f : e->fights) fights.push_back(serialize::team_fight_json(f));
    j["team_fights"] = std::move(fights);
    const double w = config_.metric_window_s;
    j["series"]["contribution"] = serialize::series_json(contribution_series(m, player, config_.weights, w));
    j["series"]["gold"] = serialize::series_json(gold_series(m, player, w));
    j["series"]["jungle_share"] = serialize::series_json(jungle_share_series(m, player, w));
    ordered_json ranges = ordered_json::array();
    for (const auto& s : e->summaries) {
      for (const auto& f : s.findings) {
        ranges.push_back({{"player_id", s.player_id},
                          {"griefer_type", to_string(f.griefer_type)},
                          {"time_ranges", serialize::intervals_json(f.time_ranges)}});
      }
    }
    j["suspicious_ranges"] = std::move(ranges);
    return ok(j);
  });
}

Response Service::get_heatmap(const std::string& match_id, const Query& query) const {
  return guarded([&] {
    auto e = require(match_id);
    const MatchTelemetry& m = e->match;
    std::string player = query_player(query, m);
    double t0 = query_number(query, "from", 0.0);
    double t1 = query_number(query, "to", m.duration());
    double grid = query_number(query, "grid", kDefaultGrid);
    if (grid != std::floor(grid) || grid < 1 || grid > kMaxGrid) {
      fail(ErrorCode::schema_violation, "grid: expected an integer in [1, " + std::to_string(kMaxGrid) + "]", "grid");
    }
    DwellHeatmap h = dwell_heatmap(m, layout_, player, t0, t1, static_cast<int>(grid));
    ordered_json j;
    j["match_id"] = match_id;
    j["player_id"] = player;
    ordered_json body = serialize::heatmap_json(h, kHotThresholdS);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = std::move(*it);
    return ok(j);
  });
}

Response Service::get_trajectory(const std::string& match_id, const Query& query) const {
  return guarded([&] {
    auto e = require(match_id);
    const MatchTelemetry& m = e->match;
    std::string player = query_player(query, m);
    double t0 = query_number(query, "from", 0.0);
    double t1 = query_number(query, "to", m.duration());
    auto lines = trajectory(m, player, t0, t1);
    ordered_json j;
    j["match_id"] = match_id;
    j["player_id"] = player;
    j["window"] = serialize::interval_json({t0, t1});
    j["polylines"] = serialize::polylines_json(lines);
    return ok(j);
  });
}

Response Service::post_annotation(const std::string& match_id, std::string_view body) {
  return guarded([&] {
    auto e = require(match_id);
    AnnotationRecord r = parse_annotation_input(body, e->match);
    std::lock_guard lock(e->log_mutex);
    char id[32];
    std::snprintf(id, sizeof id, "a-%06ld", e->next_id);
    r.annotation_id = id;
    r.created_at = now_iso8601();
    ordered_json op;
    op["op"] = "create";
    op["record"] = annotation_json(r);
    e->append(op);
    ++e->next_id;
    e->annotations.push_back(r);
    return ok(annotation_json(r), 201);
  });
}

Response Service::list_annotations(const std::string& match_id) const {
  return guarded([&] {
    auto e = require(match_id);
    std::lock_guard lock(e->log_mutex);
    ordered_json j;
    j["match_id"] = match_id;
    ordered_json list = ordered_json::array();
    for (const auto& r : e->live()) list.push_back(annotation_json(r));
    j["annotations"] = std::move(list);
    return ok(j);
  });
}

Response Service::delete_annotation(const std::string& match_id, const std::string& annotation_id) {
  return guarded([&] {
    auto e = require(match_id);
    std::lock_guard lock(e->log_mutex);
    bool exists = std::any_of(e->annotations.begin(), e->annotations.end(),
                              [&](const AnnotationRecord& r) { return r.annotation_id == annotation_id; });
    if (!exists || e->deleted.count(annotation_id)) {
      fail(ErrorCode::not_found, "unknown annotation '" + annotation_id + "'", "annotation_id");
    }
    ordered_json op;
    op["op"] = "delete";
    op["annotation_id"] = annotation_id;
    op["deleted_at"] = now_iso8601();
    e->append(op);
    e->deleted.insert(annotation_id);
    ordered_json j;
    j["annotation_id"] = annotation_id;
    j["deleted"] = true;
    return ok(j);
  });
}

Response Service::export_labels(const std::string& match_id) const {
  return guarded([&] {
    auto e = require(match_id);
    ordered_json entries = ordered_json::array();
    for (const auto& s : e->summaries) {
      for (const auto& f : s.findings) {
        ordered_json x;
        x["source"] = "algorithm";
        x["player_id"] = s.player_id;
        x["kind"] = "label";
        x["griefer_types"] = ordered_json::array({to_string(f.griefer_type)});
        x["time_ranges"] = serialize::intervals_json(f.time_ranges);
        x["severity"] = serialize::fixed(f.severity);
        x["text"] = f.explanation;
        entries.push_back(std::move(x));
      }
    }
    std::vector<AnnotationRecord> human;
    {
      std::lock_guard lock(e->log_mutex);
      human = e->live();
    }
    for (const auto& r : human) {
      ordered_json x;
      x["source"] = "human";
      x["player_id"] = r.target_player;
      x["kind"] = to_string(r.kind);
      ordered_json types = ordered_json::array();
      for (GrieferType g : r.griefer_types) types.push_back(to_string(g));
      x["griefer_types"] = std::move(types);
      x["time_ranges"] = r.time_range ? ordered_json::array({serialize::interval_json(*r.time_range)})
                                      : ordered_json::array();
      x["annotation_id"] = r.annotation_id;
      x["author"] = r.author;
      x["created_at"] = r.created_at;
      x["tags"] = r.tags;
      x["text"] = r.text;
      entries.push_back(std::move(x));
    }
    ordered_json j;
    j["match_id"] = match_id;
    j["config_hash"] = config_hash_;
    j["entries"] = std::move(entries);
    return ok(j);
  });
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

namespace {

Query to_query(const httplib::Request& req) {
  Query q;
  for (const auto& [k, v] : req.params) q.emplace(k, v);
  return q;
}

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  Service& svc = impl_->service;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Get("/health", [&](const httplib::Request&, httplib::Response& res) {
    ordered_json j;
    j["status"] = "ok";
    j["config_hash"] = svc.config_hash();
    reply(res, {200, j.dump()});
  });
  srv.Get("/matches", [&](const httplib::Request&, httplib::Response& res) { reply(res, svc.list_matches()); });
  srv.Post("/matches", [&](const httplib::Request& req, httplib::Response& res) { reply(res, svc.post_match(req.body)); });
  srv.Get("/matches/:id/summary", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_summary(req.path_params.at("id")));
  });
  srv.Get("/matches/:id/timeline", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_timeline(req.path_params.at("id"), to_query(req)));
  });
  srv.Get("/matches/:id/heatmap", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_heatmap(req.path_params.at("id"), to_query(req)));
  });
  srv.Get("/matches/:id/trajectory", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_trajectory(req.path_params.at("id"), to_query(req)));
  });
  srv.Post("/matches/:id/annotations", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.post_annotation(req.path_params.at("id"), req.body));
  });
  srv.Get("/matches/:id/annotations", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.list_annotations(req.path_params.at("id")));
  });
  srv.Delete("/matches/:id/annotations/:aid", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.delete_annotation(req.path_params.at("id"), req.path_params.at("aid")));
  });
  srv.Get("/matches/:id/labels/export", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.export_labels(req.path_params.at("id")));
  });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    Error e(res.status == 404 ? ErrorCode::not_found : ErrorCode::malformed_input,
            "no route for " + req.method + " " + req.path, req.path);
    res.set_content(error_body(e), "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace grieferlens
