#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "grieferlens/telemetry.hpp"

namespace grieferlens::testing {

// Hand-built matches: ten players parked in their home zones unless a test moves them.
class MatchBuilder {
 public:
  explicit MatchBuilder(double duration = 600.0, std::string match_id = "t-1") {
    rec_.match_id = std::move(match_id);
    rec_.duration_s = duration;
    const char* ids[] = {"P01", "P02", "P03", "P04", "P05", "P06", "P07", "P08", "P09", "P10"};
    const Assignment roles[] = {Assignment::top, Assignment::mid, Assignment::bot_support, Assignment::jungle,
                                Assignment::bot_carry};
    const HeroType heroes[] = {HeroType::Fighter, HeroType::Mage, HeroType::Support, HeroType::Assassin,
                               HeroType::Marksman};
    for (int i = 0; i < 10; ++i) {
      rec_.players.push_back({ids[i], i < 5 ? Team::blue : Team::red, heroes[i % 5], roles[i % 5], i % 3});
    }
  }

  static Point home(int index) {
    const Point blue[] = {{0.05, 0.5}, {0.3, 0.3}, {0.5, 0.06}, {0.25, 0.5}, {0.55, 0.05}};
    Point p = blue[index % 5];
    return index < 5 ? p : Point{1.0 - p.x, 1.0 - p.y};
  }

  /// One sample per player at t=0 in its home spot, for players without explicit samples.
  MatchBuilder& park_all() {
    for (int i = 0; i < 10; ++i) {
      const auto& id = rec_.players[static_cast<std::size_t>(i)].player_id;
      bool has = false;
      for (const auto& s : rec_.position_samples) has = has || s.player_id == id;
      if (!has) sample(0.0, id, home(i));
    }
    return *this;
  }

  MatchBuilder& sample(double t, const std::string& id, Point p) {
    rec_.position_samples.push_back({t, id, p.x, p.y});
    return *this;
  }
  MatchBuilder& event(GameEvent e) {
    rec_.events.push_back(std::move(e));
    return *this;
  }
  MatchBuilder& kill(double t, const std::string& actor, const std::string& victim, Point at = {0.5, 0.5},
                     std::vector<std::string> assists = {}) {
    return event({t, EventKind::kill, actor, KillInfo{victim, std::move(assists), at}});
  }
  MatchBuilder& damage(double t, const std::string& actor, const std::string& target, double amount,
                       Point at = {0.5, 0.5}) {
    return event({t, EventKind::damage, actor, DamageInfo{target, amount, at}});
  }
  MatchBuilder& cs(double t, const std::string& actor, CsSource src, double gold) {
    return event({t, EventKind::cs, actor, CsInfo{src, gold}});
  }
  MatchBuilder& gold(double t, const std::string& actor, double amount, std::string source = "kill") {
    return event({t, EventKind::gold, actor, GoldInfo{amount, std::move(source)}});
  }
  MatchBuilder& heal(double t, const std::string& actor, const std::string& target, double amount) {
    return event({t, EventKind::heal, actor, HealInfo{target, amount}});
  }
  MatchBuilder& respawn(double t, const std::string& actor) {
    return event({t, EventKind::respawn, actor, std::monostate{}});
  }
  MatchBuilder& recall(double t, const std::string& actor) {
    return event({t, EventKind::recall, actor, std::monostate{}});
  }

  TelemetryRecord record() {
    park_all();
    auto by_t = [](const auto& a, const auto& b) { return a.t < b.t; };
    std::stable_sort(rec_.position_samples.begin(), rec_.position_samples.end(), by_t);
    std::stable_sort(rec_.events.begin(), rec_.events.end(), by_t);
    return rec_;
  }
  MatchTelemetry build() { return MatchTelemetry(record()); }

 private:
  TelemetryRecord rec_;
};

}  // namespace grieferlens::testing
