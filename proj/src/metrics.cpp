#include "grieferlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace grieferlens {

namespace {

void check_window_size(double window_s) {
  if (!(window_s > 0.0)) throw Error(ErrorCode::bad_window, "window_s must be > 0", "window_s");
}

void check_span(const MatchTelemetry& match, double t0, double t1) {
  if (!(t0 <= t1)) throw Error(ErrorCode::bad_window, "window start after end", "t0");
  if (t0 < 0.0 || t1 > match.duration()) throw Error(ErrorCode::bad_window, "window outside [0, duration_s]", "t1");
}

double event_gold(const GameEvent& e) {
  if (auto* g = e.as<GoldInfo>()) return g->amount;
  if (auto* c = e.as<CsInfo>()) return c->gold;
  return 0.0;
}

bool is_jungle(CsSource s) { return s == CsSource::jungle_blue || s == CsSource::jungle_red; }

}  // namespace

std::size_t window_count(double duration_s, double window_s) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(duration_s / window_s - 1e-9)));
}

std::size_t window_index(double t, double window_s, std::size_t count) {
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / window_s)));
  return std::min(k, count - 1);
}

bool in_window(double t, double t0, double t1, double duration) {
  return (t >= t0 && t < t1) || (t == t1 && t1 == duration);
}

MetricSeries contribution_series(const MatchTelemetry& match, std::string_view player_id,
                                 const ContributionWeights& w, double window_s) {
  check_window_size(window_s);
  const PlayerInfo& me = match.player(player_id);
  const std::size_t n = window_count(match.duration(), window_s);
  const std::size_t np = match.players().size();
  std::vector<std::vector<double>> raw(np, std::vector<double>(n, 0.0));
  for (const auto& e : match.events()) {
    auto idx = match.find_player(e.actor);
    if (!idx) continue;
    double v = 0.0;
    if (auto* d = e.as<DamageInfo>()) {
      v = match.in_roster(d->target) ? w.damage * d->amount : w.objective_damage * d->amount;
    } else if (auto* h = e.as<HealInfo>()) {
      v = w.heal * h->amount;
    } else if (auto* g = e.as<GoldInfo>()) {
      v = w.gold * g->amount;
    } else if (auto* c = e.as<CsInfo>()) {
      v = w.cs * c->gold;
    }
    raw[*idx][window_index(e.t, window_s, n)] += v;
  }
  MetricSeries s{"contribution", window_s, std::vector<double>(n, 0.0)};
  const std::size_t self = match.player_index(player_id);
  for (std::size_t k = 0; k < n; ++k) {
    double best = 0.0;
    for (std::size_t q = 0; q < np; ++q) {
      if (match.players()[q].team == me.team) best = std::max(best, raw[q][k]);
    }
    s.values[k] = best > 0.0 ? raw[self][k] / best : 0.0;
  }
  return s;
}

MetricSeries gold_series(const MatchTelemetry& match, std::string_view player_id, double window_s) {
  check_window_size(window_s);
  match.player_index(player_id);
  const std::size_t n = window_count(match.duration(), window_s);
  MetricSeries s{"gold", window_s, std::vector<double>(n, 0.0)};
  for (const auto& e : match.events()) {
    if (e.actor == player_id) s.values[window_index(e.t, window_s, n)] += event_gold(e);
  }
  return s;
}

MetricSeries jungle_share_series(const MatchTelemetry& match, std::string_view player_id, double window_s) {
  check_window_size(window_s);
  const std::size_t n = window_count(match.duration(), window_s);
  MetricSeries s{"jungle_share", window_s, std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    double t0 = static_cast<double>(k) * window_s;
    double t1 = std::min(t0 + window_s, match.duration());
    s.values[k] = jungle_economy_share(match, player_id, t0, t1);
  }
  return s;
}

double jungle_gold(const MatchTelemetry& match, std::string_view player_id, double t0, double t1) {
  double sum = 0.0;
  for (const auto& e : match.events()) {
    if (e.actor != player_id || !in_window(e.t, t0, t1, match.duration())) continue;
    if (auto* c = e.as<CsInfo>(); c && is_jungle(c->source)) sum += c->gold;
  }
  return sum;
}

double jungle_economy_share(const MatchTelemetry& match, std::string_view player_id, double t0, double t1) {
  check_span(match, t0, t1);
  const Team team = match.player(player_id).team;
  double mine = 0.0;
  double total = 0.0;
  for (const auto& e : match.events()) {
    if (!in_window(e.t, t0, t1, match.duration())) continue;
    auto* c = e.as<CsInfo>();
    if (!c || !is_jungle(c->source)) continue;
    auto idx = match.find_player(e.actor);
    if (!idx || match.players()[*idx].team != team) continue;
    total += c->gold;
    if (e.actor == player_id) mine += c->gold;
  }
  return total > 0.0 ? mine / total : 0.0;
}

std::vector<LaneCsRow> lane_cs_stats(const MatchTelemetry& match, Lane lane, double t0, double t1) {
  if (!(t0 <= t1)) throw Error(ErrorCode::bad_window, "window start after end", "t0");
  std::vector<LaneCsRow> rows;
  for (const auto& p : match.players()) rows.push_back({p.player_id, 0, 0.0});
  for (const auto& e : match.events()) {
    if (!(e.t >= t0 && e.t < t1)) continue;
    auto* c = e.as<CsInfo>();
    if (!c || c->source != cs_source(lane)) continue;
    auto idx = match.find_player(e.actor);
    if (!idx) continue;
    rows[*idx].cs_count++;
    rows[*idx].cs_gold += c->gold;
  }
  return rows;
}

std::vector<std::size_t> fight_candidate_events(const MatchTelemetry& match) {
  std::vector<std::size_t> out;
  const auto& events = match.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    auto actor = match.find_player(e.actor);
    if (!actor) continue;
    std::string_view other;
    if (auto* k = e.as<KillInfo>()) {
      other = k->victim;
    } else if (auto* d = e.as<DamageInfo>()) {
      other = d->target;
    } else {
      continue;
    }
    auto o = match.find_player(other);
    if (o && match.players()[*o].team != match.players()[*actor].team) out.push_back(i);
  }
  return out;
}

namespace {

Point event_pos(const GameEvent& e) {
  if (auto* k = e.as<KillInfo>()) return k->pos;
  return e.as<DamageInfo>()->pos;
}

void add_participants(const GameEvent& e, std::set<std::string>& out) {
  out.insert(e.actor);
  if (auto* k = e.as<KillInfo>()) {
    out.insert(k->victim);
    out.insert(k->assists.begin(), k->assists.end());
  } else if (auto* d = e.as<DamageInfo>()) {
    out.insert(d->target);
  }
}

struct Cluster {
  std::vector<std::size_t> events;
  double sum_x = 0.0;
  double sum_y = 0.0;
  double last_t = 0.0;
  Point centroid() const {
    auto n = static_cast<double>(events.size());
    return {sum_x / n, sum_y / n};
  }
};

}  // namespace

std::vector<TeamFight> detect_team_fights(const MatchTelemetry& match, const TeamFightParams& params) {
  const auto& events = match.events();
  std::vector<Cluster> clusters;
  for (std::size_t idx : fight_candidate_events(match)) {
    const GameEvent& e = events[idx];
    Point p = event_pos(e);
    Cluster* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto& c : clusters) {
      if (e.t - c.last_t > params.time_gap) continue;
      double d = distance(p, c.centroid());
      if (d <= params.cluster_radius && d < best_d) {
        best = &c;
        best_d = d;
      }
    }
    if (!best) best = &clusters.emplace_back();
    best->events.push_back(idx);
    best->sum_x += p.x;
    best->sum_y += p.y;
    best->last_t = e.t;
  }

  std::vector<TeamFight> fights;
  for (const auto& c : clusters) {
    double t_start = events[c.events.front()].t;
    double t_end = events[c.events.back()].t;
    if (t_end - t_start < params.min_duration) continue;
    std::set<std::string> who;
    for (std::size_t i : c.events) add_participants(events[i], who);
    int blue = 0;
    int red = 0;
    for (const auto& id : who) (match.player(id).team == Team::blue ? blue : red)++;
    if (blue < params.min_per_team || red < params.min_per_team) continue;
    fights.push_back({t_start, t_end, c.centroid(), {who.begin(), who.end()}, c.events});
  }
  std::stable_sort(fights.begin(), fights.end(),
                   [](const TeamFight& a, const TeamFight& b) { return a.t_start < b.t_start; });
  return fights;
}

Stage stage_of(double t, double duration_s) {
  if (!(t >= 0.0 && t <= duration_s)) throw Error(ErrorCode::bad_time, "time outside [0, duration_s]", "t");
  if (t < duration_s / 3.0) return Stage::early;
  if (t < 2.0 * duration_s / 3.0) return Stage::mid;
  return Stage::late;
}

}  // namespace grieferlens
