#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "grieferlens/error.hpp"

namespace grieferlens {

namespace detail {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

template <typename E, std::size_t N>
constexpr std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
constexpr std::optional<E> value_of(const NameTable<E, N>& table, std::string_view name) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  return std::nullopt;
}

}  // namespace detail

enum class Team { blue, red };
enum class HeroType { Tank, Fighter, Assassin, Mage, Marksman, Support };
enum class Assignment { top, jungle, mid, bot_carry, bot_support };
enum class EventKind { kill, damage, heal, cs, gold, objective, recall, respawn };
enum class CsSource { top, mid, bot, jungle_blue, jungle_red };
enum class ObjectiveType { tower, crystal, dragon };

inline constexpr detail::NameTable<Team, 2> kTeamNames{{{Team::blue, "blue"}, {Team::red, "red"}}};
inline constexpr detail::NameTable<HeroType, 6> kHeroTypeNames{{{HeroType::Tank, "Tank"},
                                                                 {HeroType::Fighter, "Fighter"},
                                                                 {HeroType::Assassin, "Assassin"},
                                                                 {HeroType::Mage, "Mage"},
                                                                 {HeroType::Marksman, "Marksman"},
                                                                 {HeroType::Support, "Support"}}};
inline constexpr detail::NameTable<Assignment, 5> kAssignmentNames{{{Assignment::top, "top"},
                                                                    {Assignment::jungle, "jungle"},
                                                                    {Assignment::mid, "mid"},
                                                                    {Assignment::bot_carry, "bot_carry"},
                                                                    {Assignment::bot_support, "bot_support"}}};
inline constexpr detail::NameTable<EventKind, 8> kEventKindNames{{{EventKind::kill, "kill"},
                                                                  {EventKind::damage, "damage"},
                                                                  {EventKind::heal, "heal"},
                                                                  {EventKind::cs, "cs"},
                                                                  {EventKind::gold, "gold"},
                                                                  {EventKind::objective, "objective"},
                                                                  {EventKind::recall, "recall"},
                                                                  {EventKind::respawn, "respawn"}}};
inline constexpr detail::NameTable<CsSource, 5> kCsSourceNames{{{CsSource::top, "top"},
                                                                {CsSource::mid, "mid"},
                                                                {CsSource::bot, "bot"},
                                                                {CsSource::jungle_blue, "jungle_blue"},
                                                                {CsSource::jungle_red, "jungle_red"}}};
inline constexpr detail::NameTable<ObjectiveType, 3> kObjectiveNames{
    {{ObjectiveType::tower, "tower"}, {ObjectiveType::crystal, "crystal"}, {ObjectiveType::dragon, "dragon"}}};

constexpr std::string_view to_string(Team v) { return detail::name_of(kTeamNames, v); }
constexpr std::string_view to_string(HeroType v) { return detail::name_of(kHeroTypeNames, v); }
constexpr std::string_view to_string(Assignment v) { return detail::name_of(kAssignmentNames, v); }
constexpr std::string_view to_string(EventKind v) { return detail::name_of(kEventKindNames, v); }
constexpr std::string_view to_string(CsSource v) { return detail::name_of(kCsSourceNames, v); }
constexpr std::string_view to_string(ObjectiveType v) { return detail::name_of(kObjectiveNames, v); }

constexpr Team opponent(Team t) { return t == Team::blue ? Team::red : Team::blue; }

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

/// Closed time interval in seconds.
struct Interval {
  double t0 = 0.0;
  double t1 = 0.0;
  double length() const { return t1 - t0; }
  bool contains(double t) const { return t >= t0 && t <= t1; }
  bool operator==(const Interval&) const = default;
};

/// Sorts and merges intervals; touching intervals, or intervals separated by
/// at most `gap`, are joined.
std::vector<Interval> merge_intervals(std::vector<Interval> intervals, double gap = 0.0);
double total_length(std::span<const Interval> intervals);
/// Measure of the intersection of `intervals` with [t0, t1].
double overlap_length(std::span<const Interval> intervals, double t0, double t1);

struct PlayerInfo {
  std::string player_id;
  Team team = Team::blue;
  HeroType hero_type = HeroType::Tank;
  Assignment assigned_position = Assignment::top;
  int report_count = 0;
  bool operator==(const PlayerInfo&) const = default;
};

struct PositionSample {
  double t = 0.0;
  std::string player_id;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const PositionSample&) const = default;
};

struct KillInfo {
  std::string victim;
  std::vector<std::string> assists;
  Point pos;
  bool operator==(const KillInfo&) const = default;
};
struct DamageInfo {
  std::string target;  // roster id for champions; any other id is a structure/monster
  double amount = 0.0;
  Point pos;
  bool operator==(const DamageInfo&) const = default;
};
struct HealInfo {
  std::string target;
  double amount = 0.0;
  bool operator==(const HealInfo&) const = default;
};
struct CsInfo {
  CsSource source = CsSource::top;
  double gold = 0.0;
  bool operator==(const CsInfo&) const = default;
};
struct GoldInfo {
  double amount = 0.0;
  std::string source;
  bool operator==(const GoldInfo&) const = default;
};
struct ObjectiveInfo {
  ObjectiveType subtype = ObjectiveType::tower;
  Team team = Team::blue;
  Point pos;
  bool operator==(const ObjectiveInfo&) const = default;
};

using EventPayload =
    std::variant<std::monostate, KillInfo, DamageInfo, HealInfo, CsInfo, GoldInfo, ObjectiveInfo>;

struct GameEvent {
  double t = 0.0;
  EventKind kind = EventKind::recall;
  std::string actor;
  EventPayload payload;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }
  bool operator==(const GameEvent&) const = default;
};

/// Plain, unvalidated telemetry document.
struct TelemetryRecord {
  std::string match_id;
  double duration_s = 0.0;
  std::vector<PlayerInfo> players;
  std::vector<PositionSample> position_samples;
  std::vector<GameEvent> events;
  bool operator==(const TelemetryRecord&) const = default;
};

/// A validated, immutable match. Construction checks every telemetry
/// invariant and builds per-player indexes (samples and alive intervals).
class MatchTelemetry {
 public:
  explicit MatchTelemetry(TelemetryRecord record);

  const TelemetryRecord& record() const { return record_; }
  const std::string& match_id() const { return record_.match_id; }
  double duration() const { return record_.duration_s; }
  const std::vector<PlayerInfo>& players() const { return record_.players; }
  const std::vector<GameEvent>& events() const { return record_.events; }

  std::optional<std::size_t> find_player(std::string_view player_id) const;
  /// Throws Error(unknown_player).
  std::size_t player_index(std::string_view player_id) const;
  const PlayerInfo& player(std::string_view player_id) const;
  bool in_roster(std::string_view id) const { return find_player(id).has_value(); }

  std::span<const PositionSample> samples_of(std::string_view player_id) const;
  const std::vector<Interval>& alive_of(std::string_view player_id) const;
  bool is_alive(std::string_view player_id, double t) const;

 private:
  TelemetryRecord record_;
  std::vector<std::vector<PositionSample>> samples_by_player_;
  std::vector<std::vector<Interval>> alive_by_player_;
};

/// Throws Error with code malformed_input, schema_violation or invariant_violation.
MatchTelemetry parse_match(std::string_view raw);
TelemetryRecord parse_record(std::string_view raw);
std::string serialize_match(const TelemetryRecord& record);

std::vector<Interval> alive_intervals(const MatchTelemetry& match, std::string_view player_id);
Point position_at(const MatchTelemetry& match, std::string_view player_id, double t);

struct TimedPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const TimedPoint&) const = default;
};

std::vector<TimedPoint> resample_positions(const MatchTelemetry& match, std::string_view player_id,
                                           double hz);

}  // namespace grieferlens
