#include "grieferlens/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "json_util.hpp"

namespace grieferlens {

using jsonutil::json;
using jsonutil::ordered_json;

namespace {

constexpr double kSpeed = 0.012;
constexpr double kFeederSpeed = 0.015;
constexpr double kFightLength = 15.0;
constexpr std::array<double, 4> kFightFractions{0.30, 0.50, 0.70, 0.95};
constexpr double kLaningEnd = 600.0;

constexpr Point kFountainBlue{0.03, 0.03};
constexpr Point kFountainRed{0.97, 0.97};

Point mirror(Point p) { return {1.0 - p.x, 1.0 - p.y}; }
Point for_team(Point blue_side, Team t) { return t == Team::blue ? blue_side : mirror(blue_side); }
Point fountain(Team t) { return t == Team::blue ? kFountainBlue : kFountainRed; }

struct RosterSlot {
  const char* id;
  Team team;
  Assignment assignment;
  HeroType hero;
};

constexpr std::array<RosterSlot, 10> kRoster{{
    {"P01", Team::blue, Assignment::top, HeroType::Fighter},
    {"P02", Team::blue, Assignment::mid, HeroType::Mage},
    {"P03", Team::blue, Assignment::bot_support, HeroType::Support},
    {"P04", Team::blue, Assignment::jungle, HeroType::Assassin},
    {"P05", Team::blue, Assignment::bot_carry, HeroType::Marksman},
    {"P06", Team::red, Assignment::top, HeroType::Tank},
    {"P07", Team::red, Assignment::mid, HeroType::Mage},
    {"P08", Team::red, Assignment::bot_support, HeroType::Support},
    {"P09", Team::red, Assignment::jungle, HeroType::Fighter},
    {"P10", Team::red, Assignment::bot_carry, HeroType::Marksman},
}};

std::optional<std::size_t> roster_index(std::string_view id) {
  for (std::size_t i = 0; i < kRoster.size(); ++i) {
    if (id == kRoster[i].id) return i;
  }
  return std::nullopt;
}

/// Rectangle aligned with a lane: center, unit axis along the lane, half extents.
struct Box {
  Point center;
  Point along{1.0, 0.0};
  double half_along = 0.03;
  double half_cross = 0.01;
};

Point lane_axis(Lane lane, Team team) {
  if (lane == Lane::mid) return {M_SQRT1_2, M_SQRT1_2};
  const bool vertical = (lane == Lane::top) == (team == Team::blue);
  return vertical ? Point{0.0, 1.0} : Point{1.0, 0.0};
}

// Blue-side laning spots; red spots mirror the opposite lane (blue top <-> red bot).
Point lane_spot(Lane lane, Team team) {
  switch (lane) {
    case Lane::top: return team == Team::blue ? Point{0.05, 0.80} : mirror({0.80, 0.05});
    case Lane::mid: return for_team({0.40, 0.40}, team);
    case Lane::bot: return team == Team::blue ? Point{0.80, 0.05} : mirror({0.05, 0.80});
  }
  return {};
}

/// Lane box shifted `offset` map units toward the team's own fountain.
Box lane_box(Lane lane, Team team, double offset = 0.0, double half_along = 0.03, double half_cross = 0.01) {
  Point c = lane_spot(lane, team);
  Point a = lane_axis(lane, team);
  Point f = fountain(team);
  double sign = ((f.x - c.x) * a.x + (f.y - c.y) * a.y) > 0 ? 1.0 : -1.0;
  return {{c.x + sign * offset * a.x, c.y + sign * offset * a.y}, a, half_along, half_cross};
}

constexpr std::array<Point, 4> kBlueCamps{{{0.22, 0.48}, {0.28, 0.60}, {0.60, 0.28}, {0.48, 0.22}}};

Point camp(Team team, std::size_t i) { return for_team(kBlueCamps[i % kBlueCamps.size()], team); }

std::optional<Lane> lane_of(Assignment a) {
  switch (a) {
    case Assignment::top: return Lane::top;
    case Assignment::mid: return Lane::mid;
    case Assignment::bot_carry:
    case Assignment::bot_support: return Lane::bot;
    case Assignment::jungle: return std::nullopt;
  }
  return std::nullopt;
}

double round4(double v) { return jsonutil::round_to(std::clamp(v, 0.0, 1.0), 4); }
double round1(double v) { return jsonutil::round_to(v, 1); }

struct Fight {
  double start = 0.0;
  Point spot;
};

struct Agent {
  std::size_t idx = 0;
  std::string id;
  Team team = Team::blue;
  Assignment assignment = Assignment::top;
  const Injection* injection = nullptr;
  Interval span;

  Point pos;
  bool alive = true;
  double respawn_at = 0.0;
  Point wander_target;
  bool has_wander = false;
  double wander_until = 0.0;
  double next_cs = 0.0;
  double next_tower_hit = 0.0;
  double next_recall = 0.0;
  double channel_until = -1.0;
  double pause_until = -1.0;
  std::size_t camp_idx = 0;
  bool clearing = false;
  double clear_until = 0.0;
  Point fight_offset;
  bool fight_acted = false;
  int fight_id = -1;

  bool injected(double t) const { return injection && t >= span.t0 && t <= span.t1; }
  bool injected(double t, GrieferType g) const { return injected(t) && injection->type == g; }
  /// Injected behaviors other than non-participation replace fights, trades and recalls.
  bool overridden(double t) const { return injected(t) && injection->type != GrieferType::non_participation; }
};

class Simulator {
 public:
  explicit Simulator(const Scenario& s) : scenario_(s), rng_(s.seed) {}

  GeneratedMatch run();

 private:
  void setup();
  void respawn(Agent& a, int t);
  void kill(Agent& victim, Agent& killer, std::vector<std::string> assists, double t);
  void move_toward(Agent& a, Point target, double speed);
  void wander(Agent& a, const Box& box, int t);
  bool near(const Agent& a, Point p, double r) const { return distance(a.pos, p) <= r; }
  void emit(GameEvent e) { events_.push_back(std::move(e)); }
  void sample(const Agent& a, double t) { samples_.push_back({t, a.id, round4(a.pos.x), round4(a.pos.y)}); }

  void run_fights(int t);
  void run_trades(int t);
  void step(Agent& a, int t);
  void laner_step(Agent& a, int t, Lane lane, const Box& box, CsSource source, bool support);
  void jungle_step(Agent& a, int t, double gold_factor);
  bool fight_step(Agent& a, int t);
  bool recall_step(Agent& a, int t);
  bool in_fight_window(double t, double before, double after) const;
  double respawn_delay(double t) const { return std::ceil(10.0 + t / 60.0); }
  bool jungle_stolen(Team team, double t) const;

  const Scenario& scenario_;
  Rng rng_;
  double duration_ = 0.0;
  std::vector<Agent> agents_;
  std::vector<Fight> fights_;
  std::map<Lane, double> next_trade_;
  std::vector<PositionSample> samples_;
  std::vector<GameEvent> events_;
  std::vector<PlayerInfo> players_;
};

bool Simulator::in_fight_window(double t, double before, double after) const {
  return std::any_of(fights_.begin(), fights_.end(),
                     [&](const Fight& f) { return t >= f.start - before && t <= f.start + kFightLength + after; });
}

bool Simulator::jungle_stolen(Team team, double t) const {
  return std::any_of(agents_.begin(), agents_.end(), [&](const Agent& a) {
    return a.team == team && a.injected(t, GrieferType::jungle_stealing);
  });
}

void Simulator::setup() {
  duration_ = scenario_.duration_s;
  for (std::size_t i = 0; i < kRoster.size(); ++i) {
    const auto& slot = kRoster[i];
    Agent a;
    a.idx = i;
    a.id = slot.id;
    a.team = slot.team;
    a.assignment = slot.assignment;
    a.pos = fountain(slot.team);
    a.next_cs = 0.0;
    a.next_recall = rng_.uniform(200.0, 280.0);
    a.next_tower_hit = rng_.uniform(60.0, 120.0);
    a.fight_offset = {rng_.uniform(-0.03, 0.03), rng_.uniform(-0.03, 0.03)};
    players_.push_back({slot.id, slot.team, slot.hero, slot.assignment, static_cast<int>(rng_.integer(0, 2))});
    agents_.push_back(a);
  }
  for (const auto& inj : scenario_.injections) {
    Agent& a = agents_[*roster_index(inj.player_id)];
    a.injection = &inj;
    players_[a.idx].report_count += static_cast<int>(rng_.integer(1, 4));
    const double laning_end = std::min(kLaningEnd, duration_);
    switch (inj.type) {
      case GrieferType::afk: a.span = {*inj.t0, *inj.t1}; break;
      case GrieferType::feeding: a.span = {inj.t0.value_or(60.0), inj.t1.value_or(duration_)}; break;
      case GrieferType::lane_stealing:
      case GrieferType::position_stealing: a.span = {0.0, laning_end}; break;
      case GrieferType::jungle_stealing: {
        auto stage = *detail::value_of(kStageNames, inj.target);
        double third = duration_ / 3.0;
        double k = static_cast<double>(static_cast<int>(stage));
        a.span = {k * third, (k + 1.0) * third};
        break;
      }
      case GrieferType::non_participation: a.span = {0.0, duration_}; break;
    }
  }
  for (double frac : kFightFractions) {
    double u = rng_.uniform(-0.10, 0.10);
    fights_.push_back({std::round(frac * duration_), {0.5 + u, 0.5 - u}});
  }
  for (Lane l : {Lane::top, Lane::mid, Lane::bot}) next_trade_[l] = rng_.uniform(30.0, 60.0);
}

void Simulator::respawn(Agent& a, int t) {
  a.alive = true;
  a.pos = {fountain(a.team).x + rng_.uniform(-0.01, 0.01), fountain(a.team).y + rng_.uniform(-0.01, 0.01)};
  a.clearing = false;
  a.has_wander = false;
  a.fight_id = -1;
  emit({static_cast<double>(t), EventKind::respawn, a.id, std::monostate{}});
  sample(a, t);
}

void Simulator::kill(Agent& victim, Agent& killer, std::vector<std::string> assists, double t) {
  emit({t, EventKind::kill, killer.id,
        KillInfo{victim.id, assists, {round4(victim.pos.x), round4(victim.pos.y)}}});
  emit({t, EventKind::gold, killer.id, GoldInfo{300.0, "kill"}});
  for (const auto& id : assists) emit({t, EventKind::gold, id, GoldInfo{150.0, "assist"}});
  victim.alive = false;
  victim.respawn_at = std::ceil(t) + respawn_delay(t);
}

void Simulator::move_toward(Agent& a, Point target, double speed) {
  double d = distance(a.pos, target);
  if (d <= speed) {
    a.pos = target;
  } else {
    a.pos = {a.pos.x + (target.x - a.pos.x) * speed / d, a.pos.y + (target.y - a.pos.y) * speed / d};
  }
}

void Simulator::wander(Agent& a, const Box& box, int t) {
  const Point cross{-box.along.y, box.along.x};
  if (!a.has_wander || distance(a.pos, a.wander_target) < 1e-4 || t >= a.wander_until) {
    // Next target at least 0.02 away, so the player never stands still for long.
    Point target = box.center;
    for (int tries = 0; tries < 8; ++tries) {
      double u = rng_.uniform(-box.half_along, box.half_along);
      double v = rng_.uniform(-box.half_cross, box.half_cross);
      target = {box.center.x + u * box.along.x + v * cross.x, box.center.y + u * box.along.y + v * cross.y};
      if (distance(target, a.pos) >= 0.02) break;
    }
    a.wander_target = target;
    a.has_wander = true;
    a.wander_until = t + rng_.uniform(4.0, 7.0);
  }
  move_toward(a, a.wander_target, kSpeed * 0.6);
}

void Simulator::laner_step(Agent& a, int t, Lane lane, const Box& box, CsSource source, bool support) {
  if (!near(a, box.center, 0.05)) {
    a.has_wander = false;
    move_toward(a, box.center, kSpeed);
    return;
  }
  wander(a, box, t);
  if (t >= a.next_cs) {
    emit({t + 0.5, EventKind::cs, a.id, CsInfo{source, std::round(rng_.uniform(18.0, 26.0))}});
    a.next_cs = t + (support ? rng_.uniform(35.0, 50.0) : rng_.uniform(5.0, 9.0));
  }
  if (t >= a.next_tower_hit) {
    std::string tower = "tower_" + std::string(to_string(opponent(a.team))) + "_" + std::string(to_string(lane));
    emit({t + 0.75, EventKind::damage, a.id,
          DamageInfo{tower, round1(rng_.uniform(50.0, 150.0)), {round4(a.pos.x), round4(a.pos.y)}}});
    a.next_tower_hit = t + rng_.uniform(50.0, 90.0);
  }
}

void Simulator::jungle_step(Agent& a, int t, double gold_factor) {
  Point c = camp(a.team, a.camp_idx);
  if (a.clearing) {
    if (t >= a.clear_until) {
      CsSource src = a.team == Team::blue ? CsSource::jungle_blue : CsSource::jungle_red;
      emit({t + 0.25, EventKind::cs, a.id, CsInfo{src, std::round(rng_.uniform(60.0, 90.0) * gold_factor)}});
      a.clearing = false;
      a.camp_idx = (a.camp_idx + 1) % kBlueCamps.size();
    }
    return;
  }
  if (near(a, c, 1e-3)) {
    a.clearing = true;
    a.clear_until = t + 8.0;
    return;
  }
  move_toward(a, c, kSpeed);
}

bool Simulator::fight_step(Agent& a, int t) {
  for (std::size_t i = 0; i < fights_.size(); ++i) {
    const Fight& f = fights_[i];
    const double end = f.start + kFightLength;
    const bool avoid = a.injected(t, GrieferType::non_participation);
    if (avoid) {
      // Head to the enemy camp farthest from the fight and loiter there until it is over.
      Point far = camp(opponent(a.team), 0);
      for (std::size_t k = 1; k < kBlueCamps.size(); ++k) {
        Point c = camp(opponent(a.team), k);
        if (distance(c, f.spot) > distance(far, f.spot)) far = c;
      }
      double need = distance(a.pos, far) / kSpeed;
      if (t < end + 5.0 && (a.fight_id == static_cast<int>(i) || t >= f.start - need - 20.0)) {
        if (a.fight_id != static_cast<int>(i)) {
          a.fight_id = static_cast<int>(i);
          a.clear_until = -1.0;
          a.has_wander = false;
        }
        if (!near(a, far, 0.02) && a.clear_until < 0.0) {
          move_toward(a, far, kSpeed);
        } else {
          if (a.clear_until < 0.0) a.clear_until = t;
          wander(a, Box{far, {1.0, 0.0}, 0.015, 0.015}, t);
        }
        return true;
      }
      continue;
    }
    Point target{f.spot.x + a.fight_offset.x, f.spot.y + a.fight_offset.y};
    double need = distance(a.pos, target) / kSpeed;
    if (t <= end && (a.fight_id == static_cast<int>(i) || t >= f.start - need - 8.0)) {
      if (a.fight_id != static_cast<int>(i)) {
        a.fight_id = static_cast<int>(i);
        a.fight_acted = false;
        a.clearing = false;
        a.has_wander = false;
      }
      if (!near(a, target, 0.01)) {
        move_toward(a, target, kSpeed);
      } else {
        wander(a, Box{target, {1.0, 0.0}, 0.02, 0.02}, t);
      }
      return true;
    }
  }
  return false;
}

bool Simulator::recall_step(Agent& a, int t) {
  if (a.channel_until >= 0.0) {
    if (t >= a.channel_until) {
      emit({static_cast<double>(t), EventKind::recall, a.id, std::monostate{}});
      sample(a, t);
      a.pos = {fountain(a.team).x + rng_.uniform(-0.01, 0.01), fountain(a.team).y + rng_.uniform(-0.01, 0.01)};
      a.channel_until = -1.0;
      a.pause_until = t + 1 + rng_.uniform(2.0, 6.0);
      a.next_recall = t + rng_.uniform(220.0, 280.0);
      a.clearing = false;
      a.has_wander = false;
      return true;
    }
    return true;
  }
  if (t < a.pause_until) return true;
  if (t >= a.next_recall) {
    const bool blocked = in_fight_window(t, 100.0, 20.0) ||
                         (a.injection && t >= a.span.t0 - 60.0 && t <= a.span.t1 + 30.0);
    if (blocked) {
      a.next_recall = t + rng_.uniform(20.0, 40.0);
      return false;
    }
    a.channel_until = t + 3.0;
    return true;
  }
  return false;
}

void Simulator::step(Agent& a, int t) {
  if (!a.alive) {
    if (t >= a.respawn_at) respawn(a, t);
    return;
  }
  if (a.injection && a.injection->type == GrieferType::afk && t >= a.span.t0 - 60.0 && t <= a.span.t0) {
    // walk to the idle spot, arriving exactly when the freeze starts
    Point spot = camp(a.team, 1);
    move_toward(a, spot, distance(a.pos, spot) / (a.span.t0 - t + 1.0));
  } else if (a.injected(t, GrieferType::afk)) {
    // frozen
  } else if (a.injected(t, GrieferType::feeding)) {
    move_toward(a, fountain(opponent(a.team)), kFeederSpeed);
    if (distance(a.pos, fountain(opponent(a.team))) < 0.45) {
      sample(a, t);
      Agent* killer = nullptr;
      std::vector<Agent*> enemies;
      for (auto& e : agents_) {
        if (e.team != a.team && e.alive) enemies.push_back(&e);
      }
      if (!enemies.empty()) {
        killer = *std::min_element(enemies.begin(), enemies.end(), [&](Agent* x, Agent* y) {
          return distance(x->pos, a.pos) < distance(y->pos, a.pos);
        });
        std::vector<std::string> assists;
        if (enemies.size() > 1 && rng_.chance(0.5)) {
          Agent* helper = enemies[static_cast<std::size_t>(rng_.integer(0, static_cast<std::int64_t>(enemies.size()) - 1))];
          if (helper != killer) assists.push_back(helper->id);
        }
        kill(a, *killer, assists, t + 0.5);
      }
      return;
    }
  } else if (a.overridden(t)) {
    const Injection& inj = *a.injection;
    if (inj.type == GrieferType::lane_stealing) {
      Lane lane = *detail::value_of(kLaneNames, inj.target);
      laner_step(a, t, lane, lane_box(lane, a.team, 0.05), cs_source(lane), false);
    } else if (inj.type == GrieferType::jungle_stealing) {
      jungle_step(a, t, 1.0);
    } else if (inj.type == GrieferType::position_stealing) {
      Assignment target = *detail::value_of(kAssignmentNames, inj.target);
      Box box = target == Assignment::jungle ? Box{camp(a.team, 0), {1.0, 0.0}, 0.015, 0.015}
                                             : lane_box(*lane_of(target), a.team, 0.06, 0.03, 0.008);
      if (!near(a, box.center, 0.04)) {
        move_toward(a, box.center, kSpeed);
      } else {
        wander(a, box, t);
      }
    }
  } else if (fight_step(a, t)) {
    // handled
  } else if (recall_step(a, t)) {
    // channelling or resting in the fountain
  } else {
    a.fight_id = -1;
    if (auto lane = lane_of(a.assignment)) {
      laner_step(a, t, *lane, lane_box(*lane, a.team), cs_source(*lane), a.assignment == Assignment::bot_support);
    } else {
      jungle_step(a, t, jungle_stolen(a.team, t) ? 0.5 : 1.0);
    }
  }
  const bool sampled = !samples_.empty() && samples_.back().player_id == a.id && samples_.back().t == t;
  if (!sampled) sample(a, t);
}

void Simulator::run_fights(int t) {
  for (std::size_t fi = 0; fi < fights_.size(); ++fi) {
    const Fight& f = fights_[fi];
    if (t < f.start || t > f.start + kFightLength) continue;
    auto present = [&](const Agent& a) {
      return a.alive && a.fight_id == static_cast<int>(fi) && !a.overridden(t) &&
             !a.injected(t, GrieferType::non_participation) && near(a, f.spot, 0.08);
    };
    std::vector<Agent*> here;
    for (auto& a : agents_) {
      if (present(a)) here.push_back(&a);
    }
    auto pick = [&](std::vector<Agent*>& v) {
      return v[static_cast<std::size_t>(rng_.integer(0, static_cast<std::int64_t>(v.size()) - 1))];
    };
    auto side = [&](Team team) {
      std::vector<Agent*> v;
      for (Agent* a : here) {
        if (a->team == team) v.push_back(a);
      }
      return v;
    };

    if (t < f.start + kFightLength) {
      for (double sub : {0.0, 0.5}) {
        if (here.empty()) break;
        // Everyone present deals damage at least once before repeats.
        std::vector<Agent*> fresh;
        for (Agent* a : here) {
          if (!a->fight_acted) fresh.push_back(a);
        }
        Agent* actor = fresh.empty() ? pick(here) : pick(fresh);
        auto foes = side(opponent(actor->team));
        if (foes.empty()) continue;
        Agent* target = pick(foes);
        actor->fight_acted = true;
        Point mid{(actor->pos.x + target->pos.x) / 2.0, (actor->pos.y + target->pos.y) / 2.0};
        emit({t + sub, EventKind::damage, actor->id,
              DamageInfo{target->id, round1(rng_.uniform(40.0, 200.0)), {round4(mid.x), round4(mid.y)}}});
      }
      if (t == f.start + 3 || t == f.start + 9) {
        for (Agent* a : here) {
          if (a->assignment != Assignment::bot_support) continue;
          auto mates = side(a->team);
          std::erase(mates, a);
          if (mates.empty()) continue;
          emit({t + 0.25, EventKind::heal, a->id, HealInfo{pick(mates)->id, round1(rng_.uniform(60.0, 140.0))}});
        }
      }
      continue;
    }

    // Resolution at the end of the fight.
    std::map<Team, int> deaths;
    const auto n_kills = rng_.integer(1, 2);
    for (std::int64_t k = 0; k < n_kills; ++k) {
      std::vector<Agent*> victims;
      for (Agent* a : here) {
        if (a->alive && !a->injection) victims.push_back(a);
      }
      if (victims.empty()) break;
      Agent* victim = pick(victims);
      std::vector<Agent*> killers;
      for (Agent* a : side(opponent(victim->team))) {
        if (a->alive) killers.push_back(a);
      }
      if (killers.empty()) break;
      Agent* killer = pick(killers);
      std::vector<std::string> assists;
      for (Agent* a : killers) {
        if (a != killer && assists.size() < 2 && rng_.chance(0.6)) assists.push_back(a->id);
      }
      sample(*victim, t);
      kill(*victim, *killer, assists, t + 0.25 * static_cast<double>(k));
      deaths[victim->team]++;
    }
    Team winner = deaths[Team::blue] < deaths[Team::red]   ? Team::blue
                  : deaths[Team::red] < deaths[Team::blue] ? Team::red
                                                           : (rng_.chance(0.5) ? Team::blue : Team::red);
    std::vector<Agent*> takers;
    for (Agent* a : side(winner)) {
      if (a->alive) takers.push_back(a);
    }
    if (!takers.empty()) {
      emit({t + 0.75, EventKind::objective, pick(takers)->id,
            ObjectiveInfo{ObjectiveType::dragon, winner, {round4(f.spot.x), round4(f.spot.y)}}});
    }
  }
}

void Simulator::run_trades(int t) {
  for (auto& [lane, next] : next_trade_) {
    if (t < next) continue;
    std::map<Team, std::vector<Agent*>> sides;
    for (auto& a : agents_) {
      if (!a.alive || a.injected(t) || a.fight_id >= 0) continue;
      if (near(a, lane_spot(lane, a.team), 0.06)) sides[a.team].push_back(&a);
    }
    if (sides[Team::blue].empty() || sides[Team::red].empty()) {
      next = t + 5.0;
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      Team from = k % 2 == 0 ? Team::blue : Team::red;
      auto& attackers = sides[from];
      auto& targets = sides[opponent(from)];
      Agent* actor = attackers[static_cast<std::size_t>(rng_.integer(0, static_cast<std::int64_t>(attackers.size()) - 1))];
      Agent* target = targets[static_cast<std::size_t>(rng_.integer(0, static_cast<std::int64_t>(targets.size()) - 1))];
      Point mid{(actor->pos.x + target->pos.x) / 2.0, (actor->pos.y + target->pos.y) / 2.0};
      emit({t + 0.5 + k, EventKind::damage, actor->id,
            DamageInfo{target->id, round1(rng_.uniform(30.0, 120.0)), {round4(mid.x), round4(mid.y)}}});
    }
    next = t + rng_.uniform(30.0, 60.0);
  }
}

GeneratedMatch Simulator::run() {
  setup();
  const int last = static_cast<int>(std::floor(duration_));
  for (int t = 0; t <= last; ++t) {
    run_fights(t);
    for (auto& a : agents_) step(a, t);
    if (t + 3 <= last) run_trades(t);
  }
  // Sub-second offsets can interleave across ticks; order by time, keeping emission order for ties.
  std::stable_sort(events_.begin(), events_.end(),
                   [](const GameEvent& x, const GameEvent& y) { return x.t < y.t; });
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const PositionSample& x, const PositionSample& y) { return x.t < y.t; });
  std::erase_if(events_, [&](const GameEvent& e) { return e.t > duration_; });

  GeneratedMatch out;
  out.record.match_id = scenario_.match_id.empty() ? "sim-" + std::to_string(scenario_.seed) : scenario_.match_id;
  out.record.duration_s = duration_;
  out.record.players = players_;
  out.record.position_samples = std::move(samples_);
  out.record.events = std::move(events_);
  out.truth.match_id = out.record.match_id;
  for (const auto& a : agents_) {
    if (a.injection) out.truth.labels.push_back({a.id, a.injection->type, a.span});
  }
  std::sort(out.truth.labels.begin(), out.truth.labels.end(),
            [](const GroundTruthLabel& x, const GroundTruthLabel& y) { return x.player_id < y.player_id; });
  out.telemetry = serialize_match(out.record);
  return out;
}

[[noreturn]] void bad_scenario(const std::string& msg) { throw Error(ErrorCode::invalid_scenario, msg, "injections"); }

void validate_scenario(const Scenario& s) {
  if (!(s.duration_s >= 300.0 && s.duration_s <= 7200.0)) {
    throw Error(ErrorCode::invalid_scenario, "duration_s must be within [300, 7200]", "duration_s");
  }
  std::set<std::string> seen;
  for (const auto& inj : s.injections) {
    auto idx = roster_index(inj.player_id);
    if (!idx) bad_scenario("unknown player '" + inj.player_id + "'");
    if (!seen.insert(inj.player_id).second) bad_scenario("more than one injection for " + inj.player_id);
    const auto& slot = kRoster[*idx];
    switch (inj.type) {
      case GrieferType::afk:
        if (!inj.t0 || !inj.t1) bad_scenario("afk needs t0-t1");
        [[fallthrough]];
      case GrieferType::feeding:
        if (inj.t0 && inj.t1 && !(*inj.t0 >= 0.0 && *inj.t0 < *inj.t1 && *inj.t1 <= s.duration_s)) {
          bad_scenario("injection window must satisfy 0 <= t0 < t1 <= duration");
        }
        break;
      case GrieferType::lane_stealing: {
        auto lane = detail::value_of(kLaneNames, inj.target);
        if (!lane) bad_scenario("lane_stealing needs a lane (top, mid, bot)");
        if (assigned_to(slot.assignment, *lane)) bad_scenario(inj.player_id + " is assigned to that lane");
        break;
      }
      case GrieferType::jungle_stealing:
        if (!detail::value_of(kStageNames, inj.target)) bad_scenario("jungle_stealing needs a stage (early, mid, late)");
        if (slot.assignment == Assignment::jungle) bad_scenario(inj.player_id + " is the jungler");
        break;
      case GrieferType::position_stealing: {
        auto target = detail::value_of(kAssignmentNames, inj.target);
        if (!target) bad_scenario("position_stealing needs an assignment (top, jungle, mid, bot_carry, bot_support)");
        if (home_zone(*target, slot.team) == home_zone(slot.assignment, slot.team)) {
          bad_scenario("target shares the home zone of " + inj.player_id);
        }
        break;
      }
      case GrieferType::non_participation: break;
    }
  }
}

std::optional<GrieferType> griefer_type_alias(std::string_view s) {
  if (auto g = detail::value_of(kGrieferTypeNames, s)) return g;
  if (s == "lane_steal") return GrieferType::lane_stealing;
  if (s == "jungle_steal") return GrieferType::jungle_stealing;
  if (s == "position_steal") return GrieferType::position_stealing;
  return std::nullopt;
}

}  // namespace

Injection parse_injection(std::string_view spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  auto bad = [&](const std::string& why) -> Injection {
    throw Error(ErrorCode::invalid_scenario, "injection '" + std::string(spec) + "': " + why, "inject");
  };
  if (parts.size() < 2 || parts.size() > 3) return bad("expected player:type[:params]");
  Injection inj;
  inj.player_id = parts[0];
  auto type = griefer_type_alias(parts[1]);
  if (!type) return bad("unknown type '" + parts[1] + "'");
  inj.type = *type;
  if (parts.size() == 3) {
    const std::string& p = parts[2];
    if (inj.type == GrieferType::afk || inj.type == GrieferType::feeding) {
      auto dash = p.find('-');
      if (dash == std::string::npos) return bad("expected t0-t1");
      try {
        inj.t0 = std::stod(p.substr(0, dash));
        inj.t1 = std::stod(p.substr(dash + 1));
      } catch (const std::exception&) {
        return bad("expected numeric t0-t1");
      }
    } else {
      inj.target = p;
    }
  }
  return inj;
}

GeneratedMatch generate_match(const Scenario& scenario) {
  validate_scenario(scenario);
  return Simulator(scenario).run();
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  ordered_json doc;
  doc["match_id"] = truth.match_id;
  ordered_json labels = ordered_json::array();
  for (const auto& l : truth.labels) {
    labels.push_back({{"player_id", l.player_id}, {"type", to_string(l.type)}, {"t0", l.range.t0}, {"t1", l.range.t1}});
  }
  doc["labels"] = std::move(labels);
  return doc.dump();
}

GroundTruth ground_truth_from_json(std::string_view text) {
  json doc = jsonutil::parse_or_throw(text);
  GroundTruth g;
  g.match_id = jsonutil::string_field(doc, "match_id", "");
  const json& labels = jsonutil::array_field(doc, "labels", "");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::string base = jsonutil::index("labels", i);
    g.labels.push_back({jsonutil::string_field(labels[i], "player_id", base),
                        jsonutil::enum_field(labels[i], "type", base, kGrieferTypeNames),
                        {jsonutil::number_field(labels[i], "t0", base), jsonutil::number_field(labels[i], "t1", base)}});
  }
  return g;
}

Scenario corpus_scenario(std::uint64_t seed, std::optional<GrieferType> archetype, double duration_s) {
  Scenario s;
  s.seed = seed;
  s.duration_s = duration_s;
  if (!archetype) return s;
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  auto pick_player = [&](auto&& allowed) {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < kRoster.size(); ++i) {
      if (allowed(kRoster[i])) ok.push_back(i);
    }
    return ok[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(ok.size()) - 1))];
  };
  auto any = [](const RosterSlot&) { return true; };
  Injection inj;
  inj.type = *archetype;
  switch (*archetype) {
    case GrieferType::afk: {
      inj.player_id = kRoster[pick_player(any)].id;
      double len = static_cast<double>(rng.integer(150, 300));
      double t0 = static_cast<double>(rng.integer(120, static_cast<std::int64_t>(duration_s - len - 60.0)));
      inj.t0 = t0;
      inj.t1 = t0 + len;
      break;
    }
    case GrieferType::feeding:
      inj.player_id = kRoster[pick_player(any)].id;
      break;
    case GrieferType::lane_stealing: {
      const auto& slot = kRoster[pick_player(any)];
      inj.player_id = slot.id;
      std::vector<Lane> lanes;
      for (Lane l : {Lane::top, Lane::mid, Lane::bot}) {
        if (!assigned_to(slot.assignment, l)) lanes.push_back(l);
      }
      inj.target = to_string(lanes[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(lanes.size()) - 1))]);
      break;
    }
    case GrieferType::jungle_stealing:
      inj.player_id = kRoster[pick_player([](const RosterSlot& r) { return r.assignment != Assignment::jungle; })].id;
      inj.target = to_string(static_cast<Stage>(rng.integer(0, 2)));
      break;
    case GrieferType::non_participation:
      inj.player_id = kRoster[pick_player(any)].id;
      break;
    case GrieferType::position_stealing: {
      const auto& slot = kRoster[pick_player(any)];
      inj.player_id = slot.id;
      std::vector<Assignment> targets;
      for (const auto& other : kRoster) {
        if (other.team == slot.team &&
            home_zone(other.assignment, other.team) != home_zone(slot.assignment, slot.team)) {
          targets.push_back(other.assignment);
        }
      }
      inj.target = to_string(
          targets[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(targets.size()) - 1))]);
      break;
    }
  }
  s.injections.push_back(inj);
  return s;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + p.string(), p.string());
}

}  // namespace

CorpusManifest generate_corpus(std::uint64_t base_seed, int per_archetype, int baseline,
                               const std::filesystem::path& out_dir) {
  if (per_archetype < 1 || baseline < 1) {
    throw Error(ErrorCode::invalid_scenario, "per_archetype and baseline must be >= 1", "n");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + out_dir.string() + ": " + ec.message(), out_dir.string());

  CorpusManifest m;
  m.base_seed = base_seed;
  m.per_archetype = per_archetype;
  m.baseline = baseline;
  std::uint64_t seed = base_seed;
  auto add = [&](std::optional<GrieferType> type) {
    Scenario s = corpus_scenario(seed, type);
    s.match_id = "sim-" + std::string(type ? to_string(*type) : "baseline") + "-" + std::to_string(seed);
    GeneratedMatch g = generate_match(s);
    CorpusEntry e{s.match_id, seed, type, out_dir / (s.match_id + ".telemetry.json"),
                  out_dir / (s.match_id + ".truth.json")};
    write_file(e.telemetry_file, g.telemetry);
    write_file(e.truth_file, ground_truth_to_json(g.truth));
    m.entries.push_back(std::move(e));
    ++seed;
  };
  for (GrieferType g : kAllGrieferTypes) {
    for (int i = 0; i < per_archetype; ++i) add(g);
  }
  for (int i = 0; i < baseline; ++i) add(std::nullopt);

  ordered_json doc;
  doc["base_seed"] = base_seed;
  doc["per_archetype"] = per_archetype;
  doc["baseline"] = baseline;
  ordered_json entries = ordered_json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"match_id", e.match_id},
                       {"seed", e.seed},
                       {"archetype", e.archetype ? std::string(to_string(*e.archetype)) : "baseline"},
                       {"telemetry", e.telemetry_file.filename().string()},
                       {"truth", e.truth_file.filename().string()}});
  }
  doc["entries"] = std::move(entries);
  write_file(out_dir / "manifest.json", doc.dump(2));
  return m;
}

CorpusManifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read manifest in " + dir.string(), dir.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc = jsonutil::parse_or_throw(text);
  CorpusManifest m;
  m.base_seed = doc.at("base_seed").get<std::uint64_t>();
  m.per_archetype = doc.at("per_archetype").get<int>();
  m.baseline = doc.at("baseline").get<int>();
  for (const auto& e : doc.at("entries")) {
    std::string arch = e.at("archetype").get<std::string>();
    m.entries.push_back({e.at("match_id").get<std::string>(), e.at("seed").get<std::uint64_t>(),
                         arch == "baseline" ? std::nullopt : detail::value_of(kGrieferTypeNames, arch),
                         dir / e.at("telemetry").get<std::string>(), dir / e.at("truth").get<std::string>()});
  }
  return m;
}

}  // namespace grieferlens
