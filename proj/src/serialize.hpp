#pragma once

// JSON builders shared by the detector summaries, the service and the CLIs.

#include <vector>

#include "grieferlens/detect.hpp"
#include "grieferlens/metrics.hpp"
#include "grieferlens/spatial.hpp"
#include "json_util.hpp"

namespace grieferlens::serialize {

using jsonutil::ordered_json;

inline constexpr int kDecimals = 4;

inline double fixed(double v) { return jsonutil::round_to(v, kDecimals); }

ordered_json interval_json(const Interval& iv);
ordered_json intervals_json(const std::vector<Interval>& ivs);
ordered_json finding_json(const SuspicionFinding& f);
ordered_json summary_json(const PlayerSummary& s);
ordered_json summaries_json(const std::vector<PlayerSummary>& summaries);
ordered_json series_json(const MetricSeries& s);
ordered_json team_fight_json(const TeamFight& f);
ordered_json heatmap_json(const DwellHeatmap& h, double hot_threshold_s);
ordered_json polylines_json(const std::vector<Polyline>& lines);

}  // namespace grieferlens::serialize
