#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "grieferlens/telemetry.hpp"

namespace grieferlens {

/// Fixed-window series; window k covers [k*window_s, (k+1)*window_s) and the
/// last window also takes events stamped exactly at duration_s.
struct MetricSeries {
  std::string metric_id;
  double window_s = 20.0;
  std::vector<double> values;
};

std::size_t window_count(double duration_s, double window_s);
std::size_t window_index(double t, double window_s, std::size_t count);

/// Weights of the per-window contribution score shown as the "Inactive" bars.
struct ContributionWeights {
  double damage = 1.0;
  double objective_damage = 1.0;
  double heal = 1.0;
  double gold = 0.5;
  double cs = 0.5;
};

/// Value per window = player's weighted raw contribution divided by the best
/// raw contribution on their team in that window (0 when the team did nothing).
MetricSeries contribution_series(const MatchTelemetry& match, std::string_view player_id,
                                 const ContributionWeights& weights = {}, double window_s = 20.0);
MetricSeries gold_series(const MatchTelemetry& match, std::string_view player_id, double window_s = 20.0);
/// jungle_economy_share evaluated on each window of the series grid.
MetricSeries jungle_share_series(const MatchTelemetry& match, std::string_view player_id, double window_s = 20.0);

/// True when t lies in the half-open [t0, t1), or t == t1 == duration.
bool in_window(double t, double t0, double t1, double duration);

double jungle_gold(const MatchTelemetry& match, std::string_view player_id, double t0, double t1);
double jungle_economy_share(const MatchTelemetry& match, std::string_view player_id, double t0, double t1);

enum class Lane { top, mid, bot };
inline constexpr detail::NameTable<Lane, 3> kLaneNames{{{Lane::top, "top"}, {Lane::mid, "mid"}, {Lane::bot, "bot"}}};
constexpr std::string_view to_string(Lane l) { return detail::name_of(kLaneNames, l); }
constexpr CsSource cs_source(Lane l) {
  return l == Lane::top ? CsSource::top : (l == Lane::mid ? CsSource::mid : CsSource::bot);
}
constexpr bool assigned_to(Assignment a, Lane l) {
  switch (l) {
    case Lane::top: return a == Assignment::top;
    case Lane::mid: return a == Assignment::mid;
    case Lane::bot: return a == Assignment::bot_carry || a == Assignment::bot_support;
  }
  return false;
}

struct LaneCsRow {
  std::string player_id;
  int cs_count = 0;
  double cs_gold = 0.0;
};

/// One row per roster player (roster order), counting cs events from `lane`
/// inside the half-open window [t0, t1).
std::vector<LaneCsRow> lane_cs_stats(const MatchTelemetry& match, Lane lane, double t0, double t1);

struct TeamFightParams {
  double cluster_radius = 0.12;
  double time_gap = 10.0;
  double min_duration = 5.0;
  int min_per_team = 2;
};

struct TeamFight {
  double t_start = 0.0;
  double t_end = 0.0;
  Point centroid;
  std::vector<std::string> participants;  // sorted
  std::vector<std::size_t> event_indices;  // into match.events()
};

/// Champion-vs-champion damage and kill events, in time order. Each entry is
/// an index into match.events().
std::vector<std::size_t> fight_candidate_events(const MatchTelemetry& match);

/// Greedy single pass: an event joins the open cluster (last event within
/// time_gap) whose running centroid is nearest and within cluster_radius,
/// else it starts a new cluster. Ties go to the earliest cluster.
std::vector<TeamFight> detect_team_fights(const MatchTelemetry& match, const TeamFightParams& params = {});

enum class Stage { early, mid, late };
inline constexpr detail::NameTable<Stage, 3> kStageNames{
    {{Stage::early, "early"}, {Stage::mid, "mid"}, {Stage::late, "late"}}};
constexpr std::string_view to_string(Stage s) { return detail::name_of(kStageNames, s); }

Stage stage_of(double t, double duration_s);

}  // namespace grieferlens
