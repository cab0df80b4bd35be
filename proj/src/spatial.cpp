#include "grieferlens/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.hpp"

namespace grieferlens {

using jsonutil::json;
using jsonutil::ordered_json;

double distance_to_segment(Point p, Point a, Point b) {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double f = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + f * dx, a.y + f * dy});
}

namespace {

struct Contains {
  Point p;
  bool operator()(const Disk& d) const { return distance(p, d.center) <= d.radius; }
  bool operator()(const Rect& r) const {
    return p.x >= r.min.x && p.x <= r.max.x && p.y >= r.min.y && p.y <= r.max.y;
  }
  bool operator()(const Corridor& c) const {
    if (c.polyline.size() == 1) return distance(p, c.polyline[0]) <= c.half_width;
    for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i) {
      if (distance_to_segment(p, c.polyline[i], c.polyline[i + 1]) <= c.half_width) return true;
    }
    return false;
  }
};

Point read_xy(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) jsonutil::schema_error(path, "expected [x, y]");
  return {jsonutil::get_number(v[0], path + "[0]"), jsonutil::get_number(v[1], path + "[1]")};
}

ordered_json xy(Point p) { return ordered_json::array({p.x, p.y}); }

}  // namespace

bool contains(const ZoneGeometry& g, Point p) { return std::visit(Contains{p}, g); }

ZoneLayout default_layout() {
  ZoneLayout l;
  l.zones.push_back({ZoneId::fountain_blue, Disk{{0.03, 0.03}, 0.04}});
  l.zones.push_back({ZoneId::fountain_red, Disk{{0.97, 0.97}, 0.04}});
  l.zones.push_back({ZoneId::base_blue, Rect{{0.0, 0.0}, {0.12, 0.12}}});
  l.zones.push_back({ZoneId::base_red, Rect{{0.88, 0.88}, {1.0, 1.0}}});
  l.zones.push_back({ZoneId::river, Corridor{{{0.05, 0.95}, {0.95, 0.05}}, 0.05}});
  l.zones.push_back({ZoneId::mid_lane, Corridor{{{0.05, 0.05}, {0.95, 0.95}}, 0.06}});
  l.zones.push_back({ZoneId::top_lane, Corridor{{{0.05, 0.05}, {0.05, 0.95}, {0.95, 0.95}}, 0.07}});
  l.zones.push_back({ZoneId::bot_lane, Corridor{{{0.05, 0.05}, {0.95, 0.05}, {0.95, 0.95}}, 0.07}});
  return l;
}

ZoneLayout layout_from_json(std::string_view text) {
  json doc = jsonutil::parse_or_throw(text);
  const json& zones = jsonutil::array_field(doc, "zones", "");
  ZoneLayout layout;
  std::set<ZoneId> seen;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    std::string base = jsonutil::index("zones", i);
    const json& z = zones[i];
    ZoneId id = jsonutil::enum_field(z, "id", base, kZoneNames);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::invariant_violation, base + ".id: duplicate zone id", base + ".id");
    }
    std::string shape = jsonutil::string_field(z, "shape", base);
    if (shape == "disk") {
      layout.zones.push_back(
          {id, Disk{read_xy(jsonutil::require(z, "center", base), base + ".center"),
                    jsonutil::number_field(z, "radius", base)}});
    } else if (shape == "rect") {
      layout.zones.push_back({id, Rect{read_xy(jsonutil::require(z, "min", base), base + ".min"),
                                       read_xy(jsonutil::require(z, "max", base), base + ".max")}});
    } else if (shape == "corridor") {
      Corridor c;
      const json& pts = jsonutil::array_field(z, "points", base);
      if (pts.empty()) jsonutil::schema_error(base + ".points", "corridor needs at least one point");
      for (std::size_t k = 0; k < pts.size(); ++k) c.polyline.push_back(read_xy(pts[k], jsonutil::index(base + ".points", k)));
      c.half_width = jsonutil::number_field(z, "half_width", base);
      layout.zones.push_back({id, std::move(c)});
    } else {
      jsonutil::schema_error(base + ".shape", "unknown shape '" + shape + "'");
    }
  }
  return layout;
}

std::string layout_to_json(const ZoneLayout& layout) {
  ordered_json zones = ordered_json::array();
  for (const auto& z : layout.zones) {
    ordered_json j;
    j["id"] = to_string(z.id);
    if (auto* d = std::get_if<Disk>(&z.geometry)) {
      j["shape"] = "disk";
      j["center"] = xy(d->center);
      j["radius"] = d->radius;
    } else if (auto* r = std::get_if<Rect>(&z.geometry)) {
      j["shape"] = "rect";
      j["min"] = xy(r->min);
      j["max"] = xy(r->max);
    } else {
      const auto& c = std::get<Corridor>(z.geometry);
      j["shape"] = "corridor";
      ordered_json pts = ordered_json::array();
      for (Point p : c.polyline) pts.push_back(xy(p));
      j["points"] = std::move(pts);
      j["half_width"] = c.half_width;
    }
    zones.push_back(std::move(j));
  }
  ordered_json doc;
  doc["zones"] = std::move(zones);
  return doc.dump(2);
}

ZoneId classify_zone(const ZoneLayout& layout, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw Error(ErrorCode::out_of_bounds, "point outside the unit square", "x,y");
  }
  Point p{x, y};
  for (const auto& z : layout.zones) {
    if (contains(z.geometry, p)) return z.id;
  }
  return x + y < 1.0 ? ZoneId::jungle_blue : ZoneId::jungle_red;
}

std::vector<double> window_ticks(double t0, double t1, double hz) {
  std::vector<double> ticks;
  if (t1 < t0) return ticks;
  auto n = static_cast<std::size_t>(std::floor((t1 - t0) * hz + 1e-9)) + 1;
  ticks.reserve(n);
  for (std::size_t k = 0; k < n; ++k) ticks.push_back(t0 + static_cast<double>(k) / hz);
  return ticks;
}

void check_window(const MatchTelemetry& match, double t0, double t1) {
  if (!(t0 <= t1)) throw Error(ErrorCode::bad_window, "window start after end", "t0");
  if (t0 < 0.0 || t1 > match.duration()) {
    throw Error(ErrorCode::bad_window, "window outside [0, duration_s]", "t1");
  }
}

double DwellHeatmap::total() const {
  double s = 0.0;
  for (double c : cells) s += c;
  return s;
}

int grid_cell(double coord, int grid_n) {
  int i = static_cast<int>(std::floor(coord * grid_n));
  return std::clamp(i, 0, grid_n - 1);
}

DwellHeatmap dwell_heatmap(const MatchTelemetry& match, const ZoneLayout&, std::string_view player_id, double t0,
                           double t1, int grid_n) {
  match.player_index(player_id);
  check_window(match, t0, t1);
  if (grid_n < 1) throw Error(ErrorCode::bad_window, "grid_n must be >= 1", "grid_n");
  DwellHeatmap h;
  h.grid_n = grid_n;
  h.window = {t0, t1};
  h.cells.assign(static_cast<std::size_t>(grid_n) * grid_n, 0.0);
  for (double t : window_ticks(t0, t1)) {
    if (!match.is_alive(player_id, t)) continue;
    Point p = position_at(match, player_id, t);
    h.cells[static_cast<std::size_t>(grid_cell(p.y, grid_n)) * grid_n + grid_cell(p.x, grid_n)] += 1.0;
  }
  return h;
}

ZoneOccupancy zone_occupancy(const MatchTelemetry& match, const ZoneLayout& layout, std::string_view player_id,
                             double t0, double t1) {
  match.player_index(player_id);
  check_window(match, t0, t1);
  ZoneOccupancy occ;
  for (const auto& [z, name] : kZoneNames) occ[z] = 0.0;
  for (double t : window_ticks(t0, t1)) {
    if (!match.is_alive(player_id, t)) continue;
    occ[classify_zone(layout, position_at(match, player_id, t))] += 1.0;
  }
  return occ;
}

std::vector<Polyline> trajectory(const MatchTelemetry& match, std::string_view player_id, double t0, double t1,
                                 double hz) {
  check_window(match, t0, t1);
  if (!(hz > 0.0)) throw Error(ErrorCode::bad_window, "sample rate must be > 0", "hz");
  const auto& alive = match.alive_of(player_id);
  std::vector<Polyline> out;
  std::size_t current = alive.size();
  for (double t : window_ticks(t0, t1, hz)) {
    std::size_t seg = alive.size();
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (alive[i].contains(t)) {
        seg = i;
        break;
      }
    }
    if (seg == alive.size()) continue;
    if (seg != current) {
      out.emplace_back();
      current = seg;
    }
    Point p = position_at(match, player_id, t);
    out.back().push_back({t, p.x, p.y});
  }
  return out;
}

Displacement path_displacement(const MatchTelemetry& match, std::string_view player_id, double t0, double t1) {
  Displacement d;
  auto lines = trajectory(match, player_id, t0, t1, 1.0);
  const TimedPoint* first = nullptr;
  const TimedPoint* last = nullptr;
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (!first) first = &line[i];
      last = &line[i];
      if (i > 0) d.path_length += std::hypot(line[i].x - line[i - 1].x, line[i].y - line[i - 1].y);
    }
  }
  if (first && last && first != last) d.net = std::hypot(last->x - first->x, last->y - first->y);
  return d;
}

}  // namespace grieferlens
