#include "grieferlens/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json_util.hpp"

namespace grieferlens {

using jsonutil::json;
using jsonutil::ordered_json;

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double gap) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.t0 < b.t0 || (a.t0 == b.t0 && a.t1 < b.t1); });
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!out.empty() && iv.t0 <= out.back().t1 + gap) {
      out.back().t1 = std::max(out.back().t1, iv.t1);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double total_length(std::span<const Interval> intervals) {
  double sum = 0.0;
  for (const auto& iv : intervals) sum += iv.length();
  return sum;
}

double overlap_length(std::span<const Interval> intervals, double t0, double t1) {
  double sum = 0.0;
  for (const auto& iv : intervals) {
    double a = std::max(iv.t0, t0);
    double b = std::min(iv.t1, t1);
    if (b > a) sum += b - a;
  }
  return sum;
}

namespace {

[[noreturn]] void invariant(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::invariant_violation, path.empty() ? what : path + ": " + what, path);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

Point read_point(const json& obj, const std::string& base) {
  return {jsonutil::number_field(obj, "x", base), jsonutil::number_field(obj, "y", base)};
}

GameEvent read_event(const json& e, const std::string& base) {
  GameEvent ev;
  ev.t = jsonutil::number_field(e, "t", base);
  ev.kind = jsonutil::enum_field(e, "kind", base, kEventKindNames);
  ev.actor = jsonutil::string_field(e, "actor", base);
  switch (ev.kind) {
    case EventKind::kill: {
      KillInfo k;
      k.victim = jsonutil::string_field(e, "victim", base);
      const json& assists = jsonutil::array_field(e, "assists", base);
      for (std::size_t i = 0; i < assists.size(); ++i) {
        if (!assists[i].is_string()) jsonutil::schema_error(jsonutil::index(base + ".assists", i), "expected string");
        k.assists.push_back(assists[i].get<std::string>());
      }
      k.pos = read_point(e, base);
      ev.payload = std::move(k);
      break;
    }
    case EventKind::damage:
      ev.payload = DamageInfo{jsonutil::string_field(e, "target", base), jsonutil::number_field(e, "amount", base),
                              read_point(e, base)};
      break;
    case EventKind::heal:
      ev.payload = HealInfo{jsonutil::string_field(e, "target", base), jsonutil::number_field(e, "amount", base)};
      break;
    case EventKind::cs:
      ev.payload = CsInfo{jsonutil::enum_field(e, "source", base, kCsSourceNames),
                          jsonutil::number_field(e, "gold", base)};
      break;
    case EventKind::gold:
      ev.payload = GoldInfo{jsonutil::number_field(e, "amount", base), jsonutil::string_field(e, "source", base)};
      break;
    case EventKind::objective:
      ev.payload = ObjectiveInfo{jsonutil::enum_field(e, "subtype", base, kObjectiveNames),
                                 jsonutil::enum_field(e, "team", base, kTeamNames), read_point(e, base)};
      break;
    case EventKind::recall:
    case EventKind::respawn:
      break;
  }
  return ev;
}

void validate(const TelemetryRecord& r) {
  if (!(r.duration_s > 0.0)) invariant("duration_s", "must be > 0");
  if (r.players.size() != 10) {
    invariant("players", "expected 10, got " + std::to_string(r.players.size()));
  }
  std::set<std::string> ids;
  std::map<Team, std::set<Assignment>> slots;
  std::map<Team, int> team_size;
  for (std::size_t i = 0; i < r.players.size(); ++i) {
    const auto& p = r.players[i];
    std::string path = jsonutil::index("players", i);
    if (!ids.insert(p.player_id).second) invariant(path + ".player_id", "duplicate id '" + p.player_id + "'");
    if (p.report_count < 0) invariant(path + ".report_count", "must be nonnegative");
    team_size[p.team]++;
    if (!slots[p.team].insert(p.assigned_position).second) {
      invariant(path + ".assigned_position", "team " + std::string(to_string(p.team)) + " has two " +
                                                 std::string(to_string(p.assigned_position)));
    }
  }
  for (Team t : {Team::blue, Team::red}) {
    if (team_size[t] != 5) {
      invariant("players", "team " + std::string(to_string(t)) + ": expected 5, got " + std::to_string(team_size[t]));
    }
  }

  auto check_time = [&](double t, const std::string& path, double prev) {
    if (t < 0.0 || t > r.duration_s) invariant(path + ".t", "timestamp outside [0, duration_s]");
    if (t < prev) invariant(path + ".t", "timestamps not sorted");
  };
  auto check_id = [&](const std::string& id, const std::string& path) {
    if (!ids.count(id)) invariant(path, "unknown player id '" + id + "'");
  };
  auto check_point = [&](Point p, const std::string& path) {
    if (!in_unit(p.x)) invariant(path + ".x", "coordinate out of [0,1]");
    if (!in_unit(p.y)) invariant(path + ".y", "coordinate out of [0,1]");
  };
  auto check_amount = [&](double a, const std::string& path) {
    if (a < 0.0) invariant(path, "amount must be >= 0");
  };

  double prev = 0.0;
  for (std::size_t i = 0; i < r.position_samples.size(); ++i) {
    const auto& s = r.position_samples[i];
    std::string path = jsonutil::index("position_samples", i);
    check_time(s.t, path, prev);
    prev = s.t;
    check_id(s.player_id, path + ".player_id");
    check_point({s.x, s.y}, path);
  }

  std::set<std::string> dead;
  prev = 0.0;
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    std::string path = jsonutil::index("events", i);
    check_time(e.t, path, prev);
    prev = e.t;
    check_id(e.actor, path + ".actor");
    if (auto* k = e.as<KillInfo>()) {
      check_id(k->victim, path + ".victim");
      for (std::size_t j = 0; j < k->assists.size(); ++j) check_id(k->assists[j], jsonutil::index(path + ".assists", j));
      check_point(k->pos, path);
      if (!dead.insert(k->victim).second) invariant(path + ".victim", "victim '" + k->victim + "' is already dead");
    } else if (auto* d = e.as<DamageInfo>()) {
      check_amount(d->amount, path + ".amount");
      check_point(d->pos, path);
    } else if (auto* h = e.as<HealInfo>()) {
      check_id(h->target, path + ".target");
      check_amount(h->amount, path + ".amount");
    } else if (auto* c = e.as<CsInfo>()) {
      check_amount(c->gold, path + ".gold");
    } else if (auto* g = e.as<GoldInfo>()) {
      check_amount(g->amount, path + ".amount");
    } else if (auto* o = e.as<ObjectiveInfo>()) {
      check_point(o->pos, path);
    } else if (e.kind == EventKind::respawn) {
      if (!dead.erase(e.actor)) invariant(path, "respawn of '" + e.actor + "' without a preceding kill");
    }
  }
}

}  // namespace

MatchTelemetry::MatchTelemetry(TelemetryRecord record) : record_(std::move(record)) {
  validate(record_);
  const std::size_t n = record_.players.size();
  samples_by_player_.resize(n);
  alive_by_player_.resize(n);
  for (const auto& s : record_.position_samples) samples_by_player_[*find_player(s.player_id)].push_back(s);

  std::vector<std::optional<double>> alive_since(n, 0.0);
  for (const auto& e : record_.events) {
    if (auto* k = e.as<KillInfo>()) {
      std::size_t v = *find_player(k->victim);
      alive_by_player_[v].push_back({*alive_since[v], e.t});
      alive_since[v].reset();
    } else if (e.kind == EventKind::respawn) {
      alive_since[*find_player(e.actor)] = e.t;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (alive_since[i]) alive_by_player_[i].push_back({*alive_since[i], record_.duration_s});
  }
}

std::optional<std::size_t> MatchTelemetry::find_player(std::string_view player_id) const {
  for (std::size_t i = 0; i < record_.players.size(); ++i) {
    if (record_.players[i].player_id == player_id) return i;
  }
  return std::nullopt;
}

std::size_t MatchTelemetry::player_index(std::string_view player_id) const {
  auto idx = find_player(player_id);
  if (!idx) throw Error(ErrorCode::unknown_player, "unknown player '" + std::string(player_id) + "'", "player_id");
  return *idx;
}

const PlayerInfo& MatchTelemetry::player(std::string_view player_id) const {
  return record_.players[player_index(player_id)];
}

std::span<const PositionSample> MatchTelemetry::samples_of(std::string_view player_id) const {
  return samples_by_player_[player_index(player_id)];
}

const std::vector<Interval>& MatchTelemetry::alive_of(std::string_view player_id) const {
  return alive_by_player_[player_index(player_id)];
}

bool MatchTelemetry::is_alive(std::string_view player_id, double t) const {
  const auto& iv = alive_of(player_id);
  auto it = std::upper_bound(iv.begin(), iv.end(), t, [](double v, const Interval& a) { return v < a.t0; });
  return it != iv.begin() && std::prev(it)->contains(t);
}

TelemetryRecord parse_record(std::string_view raw) {
  json doc = jsonutil::parse_or_throw(raw);
  if (!doc.is_object()) jsonutil::schema_error("", "top level must be an object");
  TelemetryRecord r;
  r.match_id = jsonutil::string_field(doc, "match_id", "");
  r.duration_s = jsonutil::number_field(doc, "duration_s", "");

  const json& players = jsonutil::array_field(doc, "players", "");
  for (std::size_t i = 0; i < players.size(); ++i) {
    std::string base = jsonutil::index("players", i);
    PlayerInfo p;
    p.player_id = jsonutil::string_field(players[i], "player_id", base);
    p.team = jsonutil::enum_field(players[i], "team", base, kTeamNames);
    p.hero_type = jsonutil::enum_field(players[i], "hero_type", base, kHeroTypeNames);
    p.assigned_position = jsonutil::enum_field(players[i], "assigned_position", base, kAssignmentNames);
    p.report_count = static_cast<int>(jsonutil::integer_field(players[i], "report_count", base));
    r.players.push_back(std::move(p));
  }

  const json& samples = jsonutil::array_field(doc, "position_samples", "");
  r.position_samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string base = jsonutil::index("position_samples", i);
    const json& s = samples[i];
    r.position_samples.push_back({jsonutil::number_field(s, "t", base), jsonutil::string_field(s, "player_id", base),
                                  jsonutil::number_field(s, "x", base), jsonutil::number_field(s, "y", base)});
  }

  const json& events = jsonutil::array_field(doc, "events", "");
  r.events.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) r.events.push_back(read_event(events[i], jsonutil::index("events", i)));
  return r;
}

MatchTelemetry parse_match(std::string_view raw) { return MatchTelemetry(parse_record(raw)); }

std::string serialize_match(const TelemetryRecord& r) {
  ordered_json doc;
  doc["match_id"] = r.match_id;
  doc["duration_s"] = r.duration_s;
  ordered_json players = ordered_json::array();
  for (const auto& p : r.players) {
    players.push_back({{"player_id", p.player_id},
                       {"team", to_string(p.team)},
                       {"hero_type", to_string(p.hero_type)},
                       {"assigned_position", to_string(p.assigned_position)},
                       {"report_count", p.report_count}});
  }
  doc["players"] = std::move(players);
  ordered_json samples = ordered_json::array();
  for (const auto& s : r.position_samples) {
    samples.push_back({{"t", s.t}, {"player_id", s.player_id}, {"x", s.x}, {"y", s.y}});
  }
  doc["position_samples"] = std::move(samples);
  ordered_json events = ordered_json::array();
  for (const auto& e : r.events) {
    ordered_json j;
    j["t"] = e.t;
    j["kind"] = to_string(e.kind);
    j["actor"] = e.actor;
    if (auto* k = e.as<KillInfo>()) {
      j["victim"] = k->victim;
      j["assists"] = k->assists;
      j["x"] = k->pos.x;
      j["y"] = k->pos.y;
    } else if (auto* d = e.as<DamageInfo>()) {
      j["target"] = d->target;
      j["amount"] = d->amount;
      j["x"] = d->pos.x;
      j["y"] = d->pos.y;
    } else if (auto* h = e.as<HealInfo>()) {
      j["target"] = h->target;
      j["amount"] = h->amount;
    } else if (auto* c = e.as<CsInfo>()) {
      j["source"] = to_string(c->source);
      j["gold"] = c->gold;
    } else if (auto* g = e.as<GoldInfo>()) {
      j["amount"] = g->amount;
      j["source"] = g->source;
    } else if (auto* o = e.as<ObjectiveInfo>()) {
      j["subtype"] = to_string(o->subtype);
      j["team"] = to_string(o->team);
      j["x"] = o->pos.x;
      j["y"] = o->pos.y;
    }
    events.push_back(std::move(j));
  }
  doc["events"] = std::move(events);
  return doc.dump();
}

std::vector<Interval> alive_intervals(const MatchTelemetry& match, std::string_view player_id) {
  return match.alive_of(player_id);
}

Point position_at(const MatchTelemetry& match, std::string_view player_id, double t) {
  auto samples = match.samples_of(player_id);
  if (samples.empty()) {
    throw Error(ErrorCode::no_samples, "player '" + std::string(player_id) + "' has no position samples", "player_id");
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const PositionSample& s) { return v < s.t; });
  if (it == samples.begin()) return {samples.front().x, samples.front().y};
  if (it == samples.end()) return {samples.back().x, samples.back().y};
  const auto& a = *std::prev(it);
  const auto& b = *it;
  double f = (t - a.t) / (b.t - a.t);
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

std::vector<TimedPoint> resample_positions(const MatchTelemetry& match, std::string_view player_id, double hz) {
  if (!(hz > 0.0)) throw Error(ErrorCode::bad_window, "sample rate must be > 0", "hz");
  auto n = static_cast<std::size_t>(std::floor(match.duration() * hz + 1e-9)) + 1;
  std::vector<TimedPoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = static_cast<double>(k) / hz;
    Point p = position_at(match, player_id, t);
    out.push_back({t, p.x, p.y});
  }
  return out;
}

}  // namespace grieferlens
