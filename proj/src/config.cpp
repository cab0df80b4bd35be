#include <cinttypes>
#include <cstdio>
#include <set>

#include "grieferlens/detect.hpp"
#include "json_util.hpp"

namespace grieferlens {

namespace {

enum class Bound { positive, fraction, nonnegative };

// Single table of every numeric config field; shared by load, save and validation.
template <typename Cfg, typename F>
void for_each_field(Cfg& c, F&& f) {
  f("afk", "idle_window_s", c.afk.idle_window_s, Bound::positive);
  f("afk", "idle_min_s", c.afk.idle_min_s, Bound::positive);
  f("afk", "idle_eps", c.afk.idle_eps, Bound::positive);
  f("afk", "fountain_stay_s", c.afk.fountain_stay_s, Bound::positive);
  f("afk", "post_recall_grace_s", c.afk.post_recall_grace_s, Bound::positive);
  f("afk", "respawn_grace_s", c.afk.respawn_grace_s, Bound::positive);
  f("afk", "total_afk_min_s", c.afk.total_afk_min_s, Bound::positive);
  f("afk", "single_interval_s", c.afk.single_interval_s, Bound::positive);
  f("afk", "severity_scale_s", c.afk.severity_scale_s, Bound::positive);
  f("feeding", "min_deaths", c.feeding.min_deaths, Bound::positive);
  f("feeding", "kda_ratio", c.feeding.kda_ratio, Bound::positive);
  f("feeding", "passive_frac", c.feeding.passive_frac, Bound::fraction);
  f("feeding", "pre_death_window_s", c.feeding.pre_death_window_s, Bound::positive);
  f("feeding", "severity_ratio", c.feeding.severity_ratio, Bound::positive);
  f("laning", "laning_start_s", c.laning.laning_start_s, Bound::positive);
  f("laning", "laning_end_s", c.laning.laning_end_s, Bound::positive);
  f("lane_steal", "steal_min_cs", c.lane_steal.steal_min_cs, Bound::positive);
  f("lane_steal", "steal_share", c.lane_steal.steal_share, Bound::fraction);
  f("lane_steal", "laner_alive_frac", c.lane_steal.laner_alive_frac, Bound::fraction);
  f("lane_steal", "severity_share", c.lane_steal.severity_share, Bound::fraction);
  f("lane_steal", "range_window_s", c.lane_steal.range_window_s, Bound::positive);
  f("jungle_steal", "jungle_window_s", c.jungle_steal.jungle_window_s, Bound::positive);
  f("jungle_steal", "jungle_step_s", c.jungle_steal.jungle_step_s, Bound::positive);
  f("jungle_steal", "jungle_share_thresh", c.jungle_steal.jungle_share_thresh, Bound::fraction);
  f("jungle_steal", "jungle_min_gold", c.jungle_steal.jungle_min_gold, Bound::positive);
  f("jungle_steal", "jungler_alive_frac", c.jungle_steal.jungler_alive_frac, Bound::fraction);
  f("jungle_steal", "severity_share", c.jungle_steal.severity_share, Bound::fraction);
  f("non_participation", "participate_radius", c.non_participation.participate_radius, Bound::positive);
  f("non_participation", "min_teammates", c.non_participation.min_teammates, Bound::positive);
  f("non_participation", "min_missed", c.non_participation.min_missed, Bound::positive);
  f("non_participation", "missed_frac", c.non_participation.missed_frac, Bound::fraction);
  f("position_steal", "squat_frac", c.position_steal.squat_frac, Bound::fraction);
  f("position_steal", "own_frac", c.position_steal.own_frac, Bound::fraction);
  f("position_steal", "range_gap_s", c.position_steal.range_gap_s, Bound::positive);
  f("contribution_weights", "damage", c.weights.damage, Bound::nonnegative);
  f("contribution_weights", "objective_damage", c.weights.objective_damage, Bound::nonnegative);
  f("contribution_weights", "heal", c.weights.heal, Bound::nonnegative);
  f("contribution_weights", "gold", c.weights.gold, Bound::nonnegative);
  f("contribution_weights", "cs", c.weights.cs, Bound::nonnegative);
  f("team_fight", "cluster_radius", c.team_fight.cluster_radius, Bound::positive);
  f("team_fight", "time_gap", c.team_fight.time_gap, Bound::positive);
  f("team_fight", "min_duration", c.team_fight.min_duration, Bound::positive);
  f("team_fight", "min_per_team", c.team_fight.min_per_team, Bound::positive);
  f("metrics", "window_s", c.metric_window_s, Bound::positive);
}

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::invalid_config, path + ": " + what, path);
}

}  // namespace

void validate_config(const DetectorConfig& cfg) {
  for_each_field(cfg, [](const char* section, const char* key, auto value, Bound bound) {
    const auto v = static_cast<double>(value);
    std::string path = std::string(section) + "." + key;
    switch (bound) {
      case Bound::positive:
        if (!(v > 0.0)) config_error(path, "must be > 0");
        break;
      case Bound::fraction:
        if (!(v > 0.0 && v <= 1.0)) config_error(path, "must be in (0, 1]");
        break;
      case Bound::nonnegative:
        if (!(v >= 0.0)) config_error(path, "must be >= 0");
        break;
    }
  });
  const auto& w = cfg.weights;
  if (w.damage + w.objective_damage + w.heal + w.gold + w.cs <= 0.0) {
    config_error("contribution_weights", "at least one weight must be > 0");
  }
  if (cfg.laning.laning_end_s <= cfg.laning.laning_start_s) config_error("laning", "laning_end_s <= laning_start_s");
  for (GrieferType g : kAllGrieferTypes) {
    if (!cfg.templates.count(g)) config_error("templates." + std::string(to_string(g)), "missing template");
  }
}

DetectorConfig config_from_json(std::string_view text) {
  using jsonutil::json;
  json doc = jsonutil::parse_or_throw(text);
  if (!doc.is_object()) config_error("", "expected object");
  DetectorConfig cfg;
  std::set<std::string> known;
  for_each_field(cfg, [&](const char* section, const char* key, auto& value, Bound) {
    known.insert(section);
    known.insert(std::string(section) + "." + key);
    auto s = doc.find(section);
    if (s == doc.end()) return;
    auto k = s->find(key);
    if (k == s->end()) return;
    std::string path = std::string(section) + "." + key;
    if (!k->is_number()) config_error(path, "expected number");
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_integral_v<T>) {
      if (!k->is_number_integer()) config_error(path, "expected integer");
    }
    value = k->template get<T>();
  });
  for (const auto& [section, body] : doc.items()) {
    if (section == "templates") {
      if (!body.is_object()) config_error("templates", "expected object");
      for (const auto& [type, tpl] : body.items()) {
        auto g = detail::value_of(kGrieferTypeNames, type);
        if (!g) config_error("templates." + type, "unknown griefer type");
        if (!tpl.is_string()) config_error("templates." + type, "expected string");
        cfg.templates[*g] = tpl.get<std::string>();
      }
      continue;
    }
    if (!known.count(section)) config_error(section, "unknown section");
    if (!body.is_object()) config_error(section, "expected object");
    for (const auto& [key, v] : body.items()) {
      if (!known.count(section + "." + key)) config_error(section + "." + key, "unknown key");
    }
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const DetectorConfig& cfg) {
  jsonutil::ordered_json doc = jsonutil::ordered_json::object();
  for_each_field(cfg, [&](const char* section, const char* key, auto value, Bound) { doc[section][key] = value; });
  for (GrieferType g : kAllGrieferTypes) {
    auto it = cfg.templates.find(g);
    if (it != cfg.templates.end()) doc["templates"][std::string(to_string(g))] = it->second;
  }
  return doc.dump();
}

std::string config_hash(const DetectorConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace grieferlens
