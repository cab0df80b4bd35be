#include "serialize.hpp"

namespace grieferlens::serialize {

ordered_json interval_json(const Interval& iv) { return ordered_json::array({fixed(iv.t0), fixed(iv.t1)}); }

ordered_json intervals_json(const std::vector<Interval>& ivs) {
  ordered_json out = ordered_json::array();
  for (const auto& iv : ivs) out.push_back(interval_json(iv));
  return out;
}

ordered_json finding_json(const SuspicionFinding& f) {
  ordered_json j;
  j["player_id"] = f.player_id;
  j["griefer_type"] = to_string(f.griefer_type);
  j["severity"] = fixed(f.severity);
  j["time_ranges"] = intervals_json(f.time_ranges);
  ordered_json ev = ordered_json::object();
  for (const auto& e : f.evidence) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            ev[e.key] = fixed(v);
          } else {
            ev[e.key] = v;
          }
        },
        e.value);
  }
  j["evidence"] = std::move(ev);
  j["explanation"] = f.explanation;
  return j;
}

ordered_json summary_json(const PlayerSummary& s) {
  ordered_json j;
  j["player_id"] = s.player_id;
  j["team"] = to_string(s.team);
  j["hero_type"] = to_string(s.hero_type);
  j["assigned_position"] = to_string(s.assigned_position);
  j["report_count"] = s.report_count;
  ordered_json findings = ordered_json::array();
  for (const auto& f : s.findings) findings.push_back(finding_json(f));
  j["findings"] = std::move(findings);
  j["suspicion_paragraph"] = s.suspicion_paragraph;
  return j;
}

ordered_json summaries_json(const std::vector<PlayerSummary>& summaries) {
  ordered_json out = ordered_json::array();
  for (const auto& s : summaries) out.push_back(summary_json(s));
  return out;
}

ordered_json series_json(const MetricSeries& s) {
  ordered_json j;
  j["metric_id"] = s.metric_id;
  j["window_s"] = s.window_s;
  ordered_json values = ordered_json::array();
  for (double v : s.values) values.push_back(fixed(v));
  j["values"] = std::move(values);
  return j;
}

ordered_json team_fight_json(const TeamFight& f) {
  ordered_json j;
  j["t_start"] = fixed(f.t_start);
  j["t_end"] = fixed(f.t_end);
  j["centroid"] = ordered_json::array({fixed(f.centroid.x), fixed(f.centroid.y)});
  j["participants"] = f.participants;
  return j;
}

ordered_json heatmap_json(const DwellHeatmap& h, double hot_threshold_s) {
  ordered_json j;
  j["grid_n"] = h.grid_n;
  j["window"] = interval_json(h.window);
  j["hot_threshold_s"] = hot_threshold_s;
  ordered_json rows = ordered_json::array();
  ordered_json hot = ordered_json::array();
  ordered_json hot_cells = ordered_json::array();
  for (int iy = 0; iy < h.grid_n; ++iy) {
    ordered_json row = ordered_json::array();
    ordered_json hot_row = ordered_json::array();
    for (int ix = 0; ix < h.grid_n; ++ix) {
      double v = h.at(ix, iy);
      row.push_back(fixed(v));
      hot_row.push_back(v > hot_threshold_s);
      if (v > hot_threshold_s) hot_cells.push_back({{"ix", ix}, {"iy", iy}, {"seconds", fixed(v)}, {"hot", true}});
    }
    rows.push_back(std::move(row));
    hot.push_back(std::move(hot_row));
  }
  j["total_s"] = fixed(h.total());
  j["cells"] = std::move(rows);
  j["hot"] = std::move(hot);
  j["hot_cells"] = std::move(hot_cells);
  return j;
}

ordered_json polylines_json(const std::vector<Polyline>& lines) {
  ordered_json out = ordered_json::array();
  for (const auto& line : lines) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : line) pts.push_back(ordered_json::array({fixed(p.t), fixed(p.x), fixed(p.y)}));
    out.push_back(std::move(pts));
  }
  return out;
}

}  // namespace grieferlens::serialize
