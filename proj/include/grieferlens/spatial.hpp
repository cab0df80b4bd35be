#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "grieferlens/telemetry.hpp"

namespace grieferlens {

enum class ZoneId {
  fountain_blue,
  fountain_red,
  base_blue,
  base_red,
  river,
  mid_lane,
  top_lane,
  bot_lane,
  jungle_blue,
  jungle_red,
};

inline constexpr detail::NameTable<ZoneId, 10> kZoneNames{{{ZoneId::fountain_blue, "fountain_blue"},
                                                            {ZoneId::fountain_red, "fountain_red"},
                                                            {ZoneId::base_blue, "base_blue"},
                                                            {ZoneId::base_red, "base_red"},
                                                            {ZoneId::river, "river"},
                                                            {ZoneId::mid_lane, "mid_lane"},
                                                            {ZoneId::top_lane, "top_lane"},
                                                            {ZoneId::bot_lane, "bot_lane"},
                                                            {ZoneId::jungle_blue, "jungle_blue"},
                                                            {ZoneId::jungle_red, "jungle_red"}}};

constexpr std::string_view to_string(ZoneId z) { return detail::name_of(kZoneNames, z); }

// Team-relative views of the absolute zone ids.
constexpr ZoneId own_fountain(Team t) { return t == Team::blue ? ZoneId::fountain_blue : ZoneId::fountain_red; }
constexpr ZoneId own_jungle(Team t) { return t == Team::blue ? ZoneId::jungle_blue : ZoneId::jungle_red; }
constexpr ZoneId enemy_jungle(Team t) { return own_jungle(opponent(t)); }

/// Zone a player with this assignment is expected to occupy in the laning phase.
constexpr ZoneId home_zone(Assignment a, Team t) {
  switch (a) {
    case Assignment::top: return ZoneId::top_lane;
    case Assignment::mid: return ZoneId::mid_lane;
    case Assignment::bot_carry:
    case Assignment::bot_support: return ZoneId::bot_lane;
    case Assignment::jungle: return own_jungle(t);
  }
  return ZoneId::jungle_blue;
}

struct Disk {
  Point center;
  double radius = 0.0;
};
struct Rect {
  Point min;
  Point max;
};
struct Corridor {
  std::vector<Point> polyline;
  double half_width = 0.0;
};
using ZoneGeometry = std::variant<Disk, Rect, Corridor>;

bool contains(const ZoneGeometry& g, Point p);
double distance_to_segment(Point p, Point a, Point b);

struct Zone {
  ZoneId id;
  ZoneGeometry geometry;
};

/// Priority-ordered zones; points matching none fall back to the jungle on
/// their side of the x + y = 1 diagonal.
struct ZoneLayout {
  std::vector<Zone> zones;
};

ZoneLayout default_layout();
ZoneLayout layout_from_json(std::string_view text);
std::string layout_to_json(const ZoneLayout& layout);

/// Throws Error(out_of_bounds) outside the unit square.
ZoneId classify_zone(const ZoneLayout& layout, double x, double y);
inline ZoneId classify_zone(const ZoneLayout& layout, Point p) { return classify_zone(layout, p.x, p.y); }

/// Tick times t0, t0 + 1/hz, ... up to and including t1.
std::vector<double> window_ticks(double t0, double t1, double hz = 1.0);

/// Throws Error(bad_window) unless 0 <= t0 <= t1 <= duration.
void check_window(const MatchTelemetry& match, double t0, double t1);

struct DwellHeatmap {
  int grid_n = 64;
  Interval window;
  std::vector<double> cells;  // row-major: cells[iy * grid_n + ix], seconds

  double at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * grid_n + ix]; }
  double total() const;
};

int grid_cell(double coord, int grid_n);

DwellHeatmap dwell_heatmap(const MatchTelemetry& match, const ZoneLayout& layout, std::string_view player_id,
                           double t0, double t1, int grid_n = 64);

using ZoneOccupancy = std::map<ZoneId, double>;

/// Seconds per zone over alive 1 Hz ticks of the window; every zone id is present.
ZoneOccupancy zone_occupancy(const MatchTelemetry& match, const ZoneLayout& layout, std::string_view player_id,
                             double t0, double t1);

using Polyline = std::vector<TimedPoint>;

/// Resampled alive positions in the window, split into one polyline per alive segment.
std::vector<Polyline> trajectory(const MatchTelemetry& match, std::string_view player_id, double t0, double t1,
                                 double hz = 1.0);

struct Displacement {
  double net = 0.0;
  double path_length = 0.0;
};

Displacement path_displacement(const MatchTelemetry& match, std::string_view player_id, double t0, double t1);

}  // namespace grieferlens
