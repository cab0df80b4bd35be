#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "grieferlens/metrics.hpp"
#include "grieferlens/spatial.hpp"
#include "grieferlens/telemetry.hpp"

namespace grieferlens {

enum class GrieferType { afk, feeding, lane_stealing, jungle_stealing, non_participation, position_stealing };

inline constexpr detail::NameTable<GrieferType, 6> kGrieferTypeNames{
    {{GrieferType::afk, "afk"},
     {GrieferType::feeding, "feeding"},
     {GrieferType::lane_stealing, "lane_stealing"},
     {GrieferType::jungle_stealing, "jungle_stealing"},
     {GrieferType::non_participation, "non_participation"},
     {GrieferType::position_stealing, "position_stealing"}}};
inline constexpr std::array<GrieferType, 6> kAllGrieferTypes{
    GrieferType::afk,          GrieferType::feeding,           GrieferType::lane_stealing,
    GrieferType::jungle_stealing, GrieferType::non_participation, GrieferType::position_stealing};

constexpr std::string_view to_string(GrieferType g) { return detail::name_of(kGrieferTypeNames, g); }

/// Evidence values: counts stay integral, measurements are doubles.
using EvidenceValue = std::variant<std::int64_t, double, std::string>;

struct Evidence {
  std::string key;
  EvidenceValue value;
};

struct SuspicionFinding {
  std::string player_id;
  GrieferType griefer_type = GrieferType::afk;
  double severity = 0.0;
  std::vector<Interval> time_ranges;
  std::vector<Evidence> evidence;
  std::string explanation;

  const EvidenceValue* find(std::string_view key) const;
};

struct PlayerSummary {
  std::string player_id;
  Team team = Team::blue;
  HeroType hero_type = HeroType::Tank;
  Assignment assigned_position = Assignment::top;
  int report_count = 0;
  std::vector<SuspicionFinding> findings;
  std::string suspicion_paragraph;
};

inline constexpr std::string_view kNoSuspicionText = "No suspicious behavior detected.";

/// One explanation template per griefer type. Placeholders are `{player}`,
/// `{hero_type}` and any evidence key of the finding.
using ExplanationTemplates = std::map<GrieferType, std::string>;
ExplanationTemplates default_templates();

struct AfkParams {
  double idle_window_s = 60.0;
  double idle_min_s = 60.0;
  double idle_eps = 0.01;
  double fountain_stay_s = 20.0;
  double post_recall_grace_s = 10.0;
  double respawn_grace_s = 10.0;
  double total_afk_min_s = 90.0;
  double single_interval_s = 60.0;
  double severity_scale_s = 300.0;
};

struct FeedingParams {
  int min_deaths = 8;
  double kda_ratio = 3.0;
  double passive_frac = 0.10;
  double pre_death_window_s = 15.0;
  double severity_ratio = 6.0;
};

struct LanePhaseParams {
  double laning_start_s = 90.0;
  double laning_end_s = 600.0;
};

struct LaneStealParams {
  int steal_min_cs = 25;
  double steal_share = 0.30;
  double laner_alive_frac = 0.5;
  double severity_share = 0.6;
  double range_window_s = 20.0;
};

struct JungleStealParams {
  double jungle_window_s = 300.0;
  double jungle_step_s = 60.0;
  double jungle_share_thresh = 0.40;
  double jungle_min_gold = 150.0;
  double jungler_alive_frac = 0.5;
  double severity_share = 0.8;
};

struct NonParticipationParams {
  double participate_radius = 0.15;
  int min_teammates = 3;
  int min_missed = 2;
  double missed_frac = 0.5;
};

struct PositionStealParams {
  double squat_frac = 0.6;
  double own_frac = 0.2;
  double range_gap_s = 30.0;
};

struct DetectorConfig {
  AfkParams afk;
  FeedingParams feeding;
  LanePhaseParams laning;
  LaneStealParams lane_steal;
  JungleStealParams jungle_steal;
  NonParticipationParams non_participation;
  PositionStealParams position_steal;
  ContributionWeights weights;
  TeamFightParams team_fight;
  double metric_window_s = 20.0;
  ExplanationTemplates templates = default_templates();
};

/// Throws Error(invalid_config) when a threshold is non-positive or a fraction
/// falls outside (0, 1].
void validate_config(const DetectorConfig& cfg);
DetectorConfig config_from_json(std::string_view text);
std::string config_to_json(const DetectorConfig& cfg);
/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const DetectorConfig& cfg);

std::vector<SuspicionFinding> detect_afk(const MatchTelemetry& match, const ZoneLayout& layout,
                                         const DetectorConfig& cfg = {});
std::vector<SuspicionFinding> detect_feeding(const MatchTelemetry& match, const DetectorConfig& cfg = {});
std::vector<SuspicionFinding> detect_lane_stealing(const MatchTelemetry& match, const DetectorConfig& cfg = {});
std::vector<SuspicionFinding> detect_jungle_stealing(const MatchTelemetry& match, const DetectorConfig& cfg = {});
std::vector<SuspicionFinding> detect_non_participation(const MatchTelemetry& match, const ZoneLayout& layout,
                                                       const DetectorConfig& cfg = {});
/// Same rule against a precomputed fight list.
std::vector<SuspicionFinding> detect_non_participation(const MatchTelemetry& match,
                                                       const std::vector<TeamFight>& fights,
                                                       const DetectorConfig& cfg);
std::vector<SuspicionFinding> detect_position_stealing(const MatchTelemetry& match, const ZoneLayout& layout,
                                                       const DetectorConfig& cfg = {});

/// Ten summaries ordered by player id; deterministic for fixed inputs.
std::vector<PlayerSummary> run_all_detectors(const MatchTelemetry& match, const ZoneLayout& layout,
                                             const DetectorConfig& cfg = {});

/// Throws Error(missing_evidence_key) for a placeholder the finding lacks.
std::string render_explanation(const SuspicionFinding& finding, const MatchTelemetry& match,
                               const ExplanationTemplates& templates = default_templates());

std::string format_evidence(const EvidenceValue& v);

/// Stable JSON (fixed field order, floats rounded to 4 decimals).
std::string summaries_to_json(const std::vector<PlayerSummary>& summaries);
std::vector<PlayerSummary> summaries_from_json(std::string_view text);

}  // namespace grieferlens
