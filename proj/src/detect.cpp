#include "grieferlens/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json_util.hpp"
#include "serialize.hpp"

namespace grieferlens {

const EvidenceValue* SuspicionFinding::find(std::string_view key) const {
  for (const auto& e : evidence) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

ExplanationTemplates default_templates() {
  return {
      {GrieferType::afk,
       "{player} ({hero_type}) appeared to be away from keyboard for {afk_seconds} s in total; the longest idle "
       "stretch lasted {longest_s} s during the {stage} stage."},
      {GrieferType::feeding,
       "{player} ({hero_type}) died {deaths} times with {kills} kills and {assists} assists, dealing "
       "{pre_death_damage} damage on average before each death."},
      {GrieferType::lane_stealing,
       "{player} ({hero_type}) took {share_pct}% of the team's {lane} lane creep score ({cs_count} cs) during the "
       "laning phase."},
      {GrieferType::jungle_stealing,
       "{player} ({hero_type}) had a high jungle economy value ({share_pct}% of team) during the {stage} stage."},
      {GrieferType::non_participation,
       "{player} ({hero_type}) stayed away from {missed} of {eligible} team fights joined by teammates, the last one "
       "during the {stage} stage."},
      {GrieferType::position_stealing,
       "{player} ({hero_type}) spent {squat_pct}% of the laning phase in {zone} instead of {own_zone} ({own_pct}%)."},
  };
}

std::string format_evidence(const EvidenceValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", std::get<double>(v));
  return buf;
}

std::string render_explanation(const SuspicionFinding& finding, const MatchTelemetry& match,
                               const ExplanationTemplates& templates) {
  auto it = templates.find(finding.griefer_type);
  if (it == templates.end()) {
    throw Error(ErrorCode::missing_evidence_key,
                "no template for " + std::string(to_string(finding.griefer_type)), "templates");
  }
  const std::string& tpl = it->second;
  const PlayerInfo& player = match.player(finding.player_id);
  std::string out;
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t open = tpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl, pos);
      break;
    }
    std::size_t close = tpl.find('}', open);
    if (close == std::string::npos) {
      out.append(tpl, pos);
      break;
    }
    out.append(tpl, pos, open - pos);
    std::string key = tpl.substr(open + 1, close - open - 1);
    if (key == "player") {
      out += player.player_id;
    } else if (key == "hero_type") {
      out += to_string(player.hero_type);
    } else if (const EvidenceValue* v = finding.find(key)) {
      out += format_evidence(*v);
    } else {
      throw Error(ErrorCode::missing_evidence_key, "template placeholder '" + key + "' has no evidence value",
                  "evidence." + key);
    }
    pos = close + 1;
  }
  return out;
}

namespace {

/// Positions and alive flags on the match-wide 1 Hz grid t = 0, 1, ..., floor(D).
struct Track {
  std::vector<double> t;
  std::vector<Point> pos;
  std::vector<bool> alive;
};

Track track_of(const MatchTelemetry& match, std::string_view player_id) {
  Track tr;
  tr.t = window_ticks(0.0, match.duration());
  const bool has_samples = !match.samples_of(player_id).empty();
  for (double t : tr.t) {
    tr.pos.push_back(has_samples ? position_at(match, player_id, t) : Point{});
    tr.alive.push_back(has_samples && match.is_alive(player_id, t));
  }
  return tr;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> event_times(const MatchTelemetry& match, std::string_view actor, EventKind kind) {
  std::vector<double> out;
  for (const auto& e : match.events()) {
    if (e.kind == kind && e.actor == actor) out.push_back(e.t);
  }
  return out;
}

bool near_any(double t, const std::vector<double>& times, double grace) {
  return std::any_of(times.begin(), times.end(), [&](double r) { return std::abs(t - r) <= grace; });
}

const PlayerInfo* teammate_with(const MatchTelemetry& match, Team team, Assignment a) {
  for (const auto& p : match.players()) {
    if (p.team == team && p.assigned_position == a) return &p;
  }
  return nullptr;
}

std::string stage_label(const Interval& iv, double duration) {
  return std::string(to_string(stage_of(std::clamp(0.5 * (iv.t0 + iv.t1), 0.0, duration), duration)));
}

SuspicionFinding make_finding(const MatchTelemetry& match, const DetectorConfig& cfg, std::string player_id,
                              GrieferType type, double severity, std::vector<Interval> ranges,
                              std::vector<Evidence> evidence) {
  SuspicionFinding f;
  f.player_id = std::move(player_id);
  f.griefer_type = type;
  f.severity = clamp01(severity);
  for (auto& r : ranges) {
    r.t0 = std::clamp(r.t0, 0.0, match.duration());
    r.t1 = std::clamp(r.t1, 0.0, match.duration());
  }
  f.time_ranges = merge_intervals(std::move(ranges));
  f.evidence = std::move(evidence);
  f.explanation = render_explanation(f, match, cfg.templates);
  return f;
}

}  // namespace

std::vector<SuspicionFinding> detect_afk(const MatchTelemetry& match, const ZoneLayout& layout,
                                         const DetectorConfig& cfg) {
  const AfkParams& c = cfg.afk;
  std::vector<SuspicionFinding> out;
  const auto win = static_cast<std::size_t>(std::llround(c.idle_window_s));
  for (const auto& player : match.players()) {
    const Track tr = track_of(match, player.player_id);
    const std::size_t n = tr.t.size();
    const ZoneId fountain = own_fountain(player.team);
    std::vector<bool> in_fountain(n);
    for (std::size_t k = 0; k < n; ++k) in_fountain[k] = classify_zone(layout, tr.pos[k]) == fountain;

    // Idle: every tick of a window alive, outside own fountain, within eps of the window's start.
    std::vector<std::size_t> bad_prefix(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) bad_prefix[k + 1] = bad_prefix[k] + (tr.alive[k] && !in_fountain[k] ? 0 : 1);
    std::vector<Interval> idle;
    for (std::size_t s = 0; s + win < n; ++s) {
      if (bad_prefix[s + win + 1] - bad_prefix[s] != 0) continue;
      bool still = true;
      for (std::size_t j = s + 1; j <= s + win && still; ++j) still = distance(tr.pos[j], tr.pos[s]) < c.idle_eps;
      if (still) idle.push_back({tr.t[s], tr.t[s + win]});
    }
    std::vector<Interval> intervals;
    for (const auto& iv : merge_intervals(idle)) {
      if (iv.length() >= c.idle_min_s) intervals.push_back(iv);
    }

    const auto recalls = event_times(match, player.player_id, EventKind::recall);
    const auto respawns = event_times(match, player.player_id, EventKind::respawn);
    for (std::size_t k = 0; k < n;) {
      if (!(tr.alive[k] && in_fountain[k])) {
        ++k;
        continue;
      }
      std::size_t end = k;
      while (end + 1 < n && tr.alive[end + 1] && in_fountain[end + 1]) ++end;
      Interval stay{tr.t[k], tr.t[end]};
      if (stay.length() >= c.fountain_stay_s && !near_any(stay.t0, recalls, c.post_recall_grace_s) &&
          !near_any(stay.t0, respawns, c.respawn_grace_s)) {
        intervals.push_back(stay);
      }
      k = end + 1;
    }
    intervals = merge_intervals(std::move(intervals));
    if (intervals.empty()) continue;

    const double total = total_length(intervals);
    const auto longest = *std::max_element(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
      return a.length() < b.length();
    });
    if (total < c.total_afk_min_s && longest.length() < c.single_interval_s) continue;
    out.push_back(make_finding(match, cfg, player.player_id, GrieferType::afk, total / c.severity_scale_s, intervals,
                               {{"afk_seconds", total},
                                {"longest_s", longest.length()},
                                {"intervals", static_cast<std::int64_t>(intervals.size())},
                                {"stage", stage_label(longest, match.duration())}}));
  }
  return out;
}

std::vector<SuspicionFinding> detect_feeding(const MatchTelemetry& match, const DetectorConfig& cfg) {
  const FeedingParams& c = cfg.feeding;
  const auto& events = match.events();
  std::map<std::string, std::vector<double>> deaths;
  std::map<std::string, int> kills;
  std::map<std::string, int> assists;
  for (const auto& e : events) {
    if (auto* k = e.as<KillInfo>()) {
      deaths[k->victim].push_back(e.t);
      kills[e.actor]++;
      for (const auto& a : k->assists) assists[a]++;
    }
  }
  auto damage_before = [&](const std::string& id, double td) {
    double sum = 0.0;
    for (const auto& e : events) {
      if (e.t > td) break;
      if (e.t < td - c.pre_death_window_s || e.actor != id) continue;
      if (auto* d = e.as<DamageInfo>()) sum += d->amount;
    }
    return sum;
  };

  std::vector<SuspicionFinding> out;
  for (const auto& player : match.players()) {
    const auto& my_deaths = deaths[player.player_id];
    const int d = static_cast<int>(my_deaths.size());
    const int k = kills[player.player_id];
    const int a = assists[player.player_id];
    if (d < c.min_deaths) continue;
    const double ratio = static_cast<double>(d) / (k + a + 1);
    if (ratio < c.kda_ratio) continue;

    double dpd = 0.0;
    for (double td : my_deaths) dpd += damage_before(player.player_id, td);
    dpd /= d;
    double team_sum = 0.0;
    int team_deaths = 0;
    for (const auto& mate : match.players()) {
      if (mate.team != player.team || mate.player_id == player.player_id) continue;
      for (double td : deaths[mate.player_id]) {
        team_sum += damage_before(mate.player_id, td);
        ++team_deaths;
      }
    }
    const double team_dpd = team_deaths > 0 ? team_sum / team_deaths : 0.0;
    if (!(team_dpd == 0.0 || dpd <= c.passive_frac * team_dpd)) continue;

    std::vector<Interval> ranges;
    for (double td : my_deaths) ranges.push_back({std::max(0.0, td - c.pre_death_window_s), td});
    out.push_back(make_finding(match, cfg, player.player_id, GrieferType::feeding, ratio / c.severity_ratio, ranges,
                               {{"deaths", static_cast<std::int64_t>(d)},
                                {"kills", static_cast<std::int64_t>(k)},
                                {"assists", static_cast<std::int64_t>(a)},
                                {"death_ratio", ratio},
                                {"pre_death_damage", dpd},
                                {"team_pre_death_damage", team_dpd}}));
  }
  return out;
}

std::vector<SuspicionFinding> detect_lane_stealing(const MatchTelemetry& match, const DetectorConfig& cfg) {
  const LaneStealParams& c = cfg.lane_steal;
  const double ls = cfg.laning.laning_start_s;
  const double le = std::min(cfg.laning.laning_end_s, match.duration());
  std::vector<SuspicionFinding> out;
  if (!(ls < le)) return out;

  struct Best {
    double share = -1.0;
    Lane lane = Lane::top;
    int cs = 0;
    int team_cs = 0;
    std::vector<Interval> ranges;
  };
  std::map<std::string, Best> best;
  for (Lane lane : {Lane::top, Lane::mid, Lane::bot}) {
    const auto rows = lane_cs_stats(match, lane, ls, le);
    for (Team team : {Team::blue, Team::red}) {
      int team_cs = 0;
      bool laner_present = false;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = match.players()[i];
        if (p.team != team) continue;
        team_cs += rows[i].cs_count;
        if (assigned_to(p.assigned_position, lane) &&
            overlap_length(match.alive_of(p.player_id), ls, le) >= c.laner_alive_frac * (le - ls)) {
          laner_present = true;
        }
      }
      if (!laner_present || team_cs == 0) continue;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = match.players()[i];
        if (p.team != team || assigned_to(p.assigned_position, lane)) continue;
        const int cs = rows[i].cs_count;
        const double share = static_cast<double>(cs) / team_cs;
        if (cs < c.steal_min_cs || share < c.steal_share) continue;
        Best& b = best[p.player_id];
        if (share <= b.share) continue;
        b = {share, lane, cs, team_cs, {}};
        for (const auto& e : match.events()) {
          auto* ci = e.as<CsInfo>();
          if (!ci || ci->source != cs_source(lane) || e.actor != p.player_id || !(e.t >= ls && e.t < le)) continue;
          double k = std::floor(e.t / c.range_window_s);
          b.ranges.push_back({k * c.range_window_s, (k + 1) * c.range_window_s});
        }
      }
    }
  }
  for (const auto& p : match.players()) {
    auto it = best.find(p.player_id);
    if (it == best.end()) continue;
    const Best& b = it->second;
    out.push_back(make_finding(match, cfg, p.player_id, GrieferType::lane_stealing, b.share / c.severity_share,
                               b.ranges,
                               {{"lane", std::string(to_string(b.lane))},
                                {"cs_count", static_cast<std::int64_t>(b.cs)},
                                {"team_lane_cs", static_cast<std::int64_t>(b.team_cs)},
                                {"share_pct", 100.0 * b.share}}));
  }
  return out;
}

std::vector<SuspicionFinding> detect_jungle_stealing(const MatchTelemetry& match, const DetectorConfig& cfg) {
  const JungleStealParams& c = cfg.jungle_steal;
  const double duration = match.duration();
  std::vector<Interval> windows;
  if (duration <= c.jungle_window_s) {
    windows.push_back({0.0, duration});
  } else {
    for (double s = 0.0; s + c.jungle_window_s <= duration + 1e-9; s += c.jungle_step_s) {
      windows.push_back({s, std::min(s + c.jungle_window_s, duration)});
    }
  }

  std::vector<SuspicionFinding> out;
  for (const auto& p : match.players()) {
    if (p.assigned_position == Assignment::jungle) continue;
    const PlayerInfo* jungler = teammate_with(match, p.team, Assignment::jungle);
    std::vector<Interval> flagged;
    double best_share = 0.0;
    double best_gold = 0.0;
    Interval best_window;
    for (const auto& w : windows) {
      const double share = jungle_economy_share(match, p.player_id, w.t0, w.t1);
      if (share < c.jungle_share_thresh) continue;
      const double gold = jungle_gold(match, p.player_id, w.t0, w.t1);
      if (gold < c.jungle_min_gold) continue;
      if (jungler && overlap_length(match.alive_of(jungler->player_id), w.t0, w.t1) <
                         c.jungler_alive_frac * w.length()) {
        continue;
      }
      flagged.push_back(w);
      if (share > best_share) {
        best_share = share;
        best_gold = gold;
        best_window = w;
      }
    }
    if (flagged.empty()) continue;
    auto ranges = merge_intervals(flagged);
    Interval stage_range = ranges.front();
    for (const auto& r : ranges) {
      if (r.t0 <= best_window.t0 && r.t1 >= best_window.t1) stage_range = r;
    }
    out.push_back(make_finding(match, cfg, p.player_id, GrieferType::jungle_stealing, best_share / c.severity_share,
                               ranges,
                               {{"share_pct", 100.0 * best_share},
                                {"jungle_gold", best_gold},
                                {"stage", stage_label(stage_range, duration)}}));
  }
  return out;
}

std::vector<SuspicionFinding> detect_non_participation(const MatchTelemetry& match, const ZoneLayout&,
                                                       const DetectorConfig& cfg) {
  return detect_non_participation(match, detect_team_fights(match, cfg.team_fight), cfg);
}

std::vector<SuspicionFinding> detect_non_participation(const MatchTelemetry& match,
                                                       const std::vector<TeamFight>& fights,
                                                       const DetectorConfig& cfg) {
  const NonParticipationParams& c = cfg.non_participation;
  std::vector<SuspicionFinding> out;
  for (const auto& p : match.players()) {
    int eligible = 0;
    std::vector<Interval> missed;
    for (const auto& f : fights) {
      int mates = 0;
      bool present = false;
      for (const auto& id : f.participants) {
        if (id == p.player_id) {
          present = true;
        } else if (match.player(id).team == p.team) {
          ++mates;
        }
      }
      if (mates < c.min_teammates) continue;
      if (present) {
        ++eligible;
        continue;
      }
      const auto& alive = match.alive_of(p.player_id);
      const bool alive_throughout = std::any_of(alive.begin(), alive.end(), [&](const Interval& iv) {
        return iv.t0 <= f.t_start && iv.t1 >= f.t_end;
      });
      if (!alive_throughout) continue;
      ++eligible;
      bool far = true;
      for (double t : window_ticks(f.t_start, f.t_end)) {
        if (distance(position_at(match, p.player_id, t), f.centroid) <= c.participate_radius) {
          far = false;
          break;
        }
      }
      if (far) missed.push_back({f.t_start, f.t_end});
    }
    const int n_missed = static_cast<int>(missed.size());
    if (n_missed < c.min_missed || eligible == 0) continue;
    const double frac = static_cast<double>(n_missed) / eligible;
    if (frac < c.missed_frac) continue;
    const Interval last = missed.back();
    out.push_back(make_finding(match, cfg, p.player_id, GrieferType::non_participation, frac,
                               missed,
                               {{"missed", static_cast<std::int64_t>(n_missed)},
                                {"eligible", static_cast<std::int64_t>(eligible)},
                                {"missed_frac", frac},
                                {"stage", stage_label(last, match.duration())}}));
  }
  return out;
}

std::vector<SuspicionFinding> detect_position_stealing(const MatchTelemetry& match, const ZoneLayout& layout,
                                                       const DetectorConfig& cfg) {
  const PositionStealParams& c = cfg.position_steal;
  const double ls = cfg.laning.laning_start_s;
  const double le = std::min(cfg.laning.laning_end_s, match.duration());
  std::vector<SuspicionFinding> out;
  if (!(ls < le)) return out;
  const auto ticks = window_ticks(ls, le);

  for (const auto& p : match.players()) {
    std::vector<std::pair<double, ZoneId>> visits;
    std::map<ZoneId, double> occ;
    for (double t : ticks) {
      if (!match.is_alive(p.player_id, t)) continue;
      ZoneId z = classify_zone(layout, position_at(match, p.player_id, t));
      occ[z] += 1.0;
      visits.emplace_back(t, z);
    }
    if (visits.empty()) continue;
    const auto alive_ticks = static_cast<double>(visits.size());
    const ZoneId own = home_zone(p.assigned_position, p.team);
    const double own_frac = occ[own] / alive_ticks;
    if (own_frac >= c.own_frac) continue;

    const PlayerInfo* victim = nullptr;
    double best = -1.0;
    for (const auto& q : match.players()) {
      if (q.team != p.team || q.player_id == p.player_id) continue;
      ZoneId z = home_zone(q.assigned_position, q.team);
      if (z == own) continue;
      double frac = occ[z] / alive_ticks;
      if (frac > best) {
        best = frac;
        victim = &q;
      }
    }
    if (!victim || best < c.squat_frac) continue;
    const ZoneId squatted = home_zone(victim->assigned_position, victim->team);

    std::vector<Interval> runs;
    for (const auto& [t, z] : visits) {
      if (z != squatted) continue;
      if (!runs.empty() && t - runs.back().t1 <= 1.0 + 1e-9) {
        runs.back().t1 = t;
      } else {
        runs.push_back({t, t});
      }
    }
    out.push_back(make_finding(match, cfg, p.player_id, GrieferType::position_stealing, best,
                               merge_intervals(runs, c.range_gap_s),
                               {{"zone", std::string(to_string(squatted))},
                                {"versus", victim->player_id},
                                {"squat_pct", 100.0 * best},
                                {"own_zone", std::string(to_string(own))},
                                {"own_pct", 100.0 * own_frac}}));
  }
  return out;
}

std::vector<PlayerSummary> run_all_detectors(const MatchTelemetry& match, const ZoneLayout& layout,
                                             const DetectorConfig& cfg) {
  std::vector<SuspicionFinding> all;
  auto append = [&](std::vector<SuspicionFinding> v) {
    for (auto& f : v) all.push_back(std::move(f));
  };
  append(detect_afk(match, layout, cfg));
  append(detect_feeding(match, cfg));
  append(detect_lane_stealing(match, cfg));
  append(detect_jungle_stealing(match, cfg));
  append(detect_non_participation(match, layout, cfg));
  append(detect_position_stealing(match, layout, cfg));

  std::vector<PlayerSummary> out;
  for (const auto& p : match.players()) {
    PlayerSummary s{p.player_id, p.team, p.hero_type, p.assigned_position, p.report_count, {}, {}};
    for (const auto& f : all) {
      if (f.player_id == p.player_id) s.findings.push_back(f);
    }
    std::stable_sort(s.findings.begin(), s.findings.end(),
                     [](const SuspicionFinding& a, const SuspicionFinding& b) { return a.severity > b.severity; });
    if (s.findings.empty()) {
      s.suspicion_paragraph = kNoSuspicionText;
    } else {
      for (const auto& f : s.findings) {
        if (!s.suspicion_paragraph.empty()) s.suspicion_paragraph += ' ';
        s.suspicion_paragraph += f.explanation;
      }
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const PlayerSummary& a, const PlayerSummary& b) { return a.player_id < b.player_id; });
  return out;
}

std::string summaries_to_json(const std::vector<PlayerSummary>& summaries) {
  return serialize::summaries_json(summaries).dump();
}

std::vector<PlayerSummary> summaries_from_json(std::string_view text) {
  using json = jsonutil::ordered_json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) jsonutil::schema_error("", "expected array of summaries");
  std::vector<PlayerSummary> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& j = doc[i];
    std::string base = jsonutil::index("", i);
    PlayerSummary s;
    s.player_id = jsonutil::string_field(j, "player_id", base);
    s.team = jsonutil::enum_field(j, "team", base, kTeamNames);
    s.hero_type = jsonutil::enum_field(j, "hero_type", base, kHeroTypeNames);
    s.assigned_position = jsonutil::enum_field(j, "assigned_position", base, kAssignmentNames);
    s.report_count = static_cast<int>(jsonutil::integer_field(j, "report_count", base));
    s.suspicion_paragraph = jsonutil::string_field(j, "suspicion_paragraph", base);
    const json& findings = jsonutil::array_field(j, "findings", base);
    for (std::size_t k = 0; k < findings.size(); ++k) {
      const json& fj = findings[k];
      std::string fb = jsonutil::index(base + ".findings", k);
      SuspicionFinding f;
      f.player_id = jsonutil::string_field(fj, "player_id", fb);
      f.griefer_type = jsonutil::enum_field(fj, "griefer_type", fb, kGrieferTypeNames);
      f.severity = jsonutil::number_field(fj, "severity", fb);
      for (const auto& r : jsonutil::array_field(fj, "time_ranges", fb)) {
        f.time_ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      }
      for (const auto& [key, v] : jsonutil::require(fj, "evidence", fb).items()) {
        if (v.is_number_integer()) {
          f.evidence.push_back({key, v.get<std::int64_t>()});
        } else if (v.is_number()) {
          f.evidence.push_back({key, v.get<double>()});
        } else {
          f.evidence.push_back({key, v.get<std::string>()});
        }
      }
      f.explanation = jsonutil::string_field(fj, "explanation", fb);
      s.findings.push_back(std::move(f));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace grieferlens
