#include <gtest/gtest.h>

#include <random>

#include "grieferlens/telemetry.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace grieferlens;
using grieferlens::testing::MatchBuilder;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(serialize_match(MatchBuilder(600).record()));
}

Error parse_error(const json& doc) {
  try {
    parse_match(doc.dump());
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected parse failure";
  return Error(ErrorCode::io_failure, "none");
}

}  // namespace

TEST(Telemetry, MinimalFileParses) {
  MatchTelemetry m = parse_match(minimal_doc().dump());
  EXPECT_EQ(m.players().size(), 10u);
  EXPECT_TRUE(m.events().empty());
  EXPECT_EQ(m.record().position_samples.size(), 10u);
  EXPECT_DOUBLE_EQ(m.duration(), 600.0);
}

TEST(Telemetry, NinePlayersIsInvariantViolation) {
  json doc = minimal_doc();
  doc["players"].erase(doc["players"].end() - 1);
  Error e = parse_error(doc);
  EXPECT_EQ(e.code(), ErrorCode::invariant_violation);
  EXPECT_NE(std::string(e.what()).find("players: expected 10, got 9"), std::string::npos) << e.what();
}

TEST(Telemetry, OutOfRangeCoordinateNamesSampleIndex) {
  json doc = minimal_doc();
  doc["position_samples"][3]["x"] = 1.5;
  Error e = parse_error(doc);
  EXPECT_EQ(e.code(), ErrorCode::invariant_violation);
  EXPECT_EQ(e.path(), "position_samples[3].x");
}

TEST(Telemetry, SyntaxErrorIsMalformedInput) {
  try {
    parse_match("{\"match_id\": ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::malformed_input);
  }
}

TEST(Telemetry, MissingFieldIsSchemaViolation) {
  json doc = minimal_doc();
  doc.erase("duration_s");
  Error e = parse_error(doc);
  EXPECT_EQ(e.code(), ErrorCode::schema_violation);
  EXPECT_EQ(e.path(), "duration_s");
  doc = minimal_doc();
  doc["players"][0]["team"] = 3;
  EXPECT_EQ(parse_error(doc).code(), ErrorCode::schema_violation);
}

TEST(Telemetry, RejectsRosterProblems) {
  json doc = minimal_doc();
  doc["players"][1]["player_id"] = "P01";
  EXPECT_EQ(parse_error(doc).code(), ErrorCode::invariant_violation);
  doc = minimal_doc();
  doc["players"][1]["team"] = "red";
  EXPECT_EQ(parse_error(doc).code(), ErrorCode::invariant_violation);
  doc = minimal_doc();
  doc["players"][1]["assigned_position"] = "top";
  EXPECT_EQ(parse_error(doc).code(), ErrorCode::invariant_violation);
}

TEST(Telemetry, RejectsUnsortedAndOutOfRangeTimes) {
  auto rec = MatchBuilder(600).damage(10, "P01", "P06", 5).damage(20, "P01", "P06", 5).record();
  json doc = json::parse(serialize_match(rec));
  std::swap(doc["events"][0], doc["events"][1]);
  Error e = parse_error(doc);
  EXPECT_EQ(e.code(), ErrorCode::invariant_violation);
  EXPECT_EQ(e.path(), "events[1].t");

  doc = json::parse(serialize_match(rec));
  doc["events"][1]["t"] = 601;
  EXPECT_EQ(parse_error(doc).code(), ErrorCode::invariant_violation);
}

TEST(Telemetry, RejectsUnknownIdsAndNegativeAmounts) {
  EXPECT_THROW(MatchBuilder().kill(5, "P01", "P99").build(), Error);
  EXPECT_THROW(MatchBuilder().damage(5, "P11", "P06", 1).build(), Error);
  EXPECT_THROW(MatchBuilder().damage(5, "P01", "P06", -1).build(), Error);
  EXPECT_THROW(MatchBuilder().kill(5, "P01", "P06", {0.5, 0.5}, {"P42"}).build(), Error);
  // structures and monsters are valid damage targets
  EXPECT_NO_THROW(MatchBuilder().damage(5, "P01", "tower_red_top", 100).build());
}

TEST(Telemetry, RespawnNeedsPriorDeath) {
  try {
    MatchBuilder().respawn(30, "P03").build();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invariant_violation);
  }
  EXPECT_NO_THROW(MatchBuilder().kill(10, "P06", "P03").respawn(30, "P03").build());
}

TEST(Telemetry, AliveIntervals) {
  auto m = MatchBuilder(600).build();
  EXPECT_EQ(alive_intervals(m, "P03"), (std::vector<Interval>{{0, 600}}));

  m = MatchBuilder(600).kill(100, "P06", "P03").respawn(130, "P03").build();
  EXPECT_EQ(alive_intervals(m, "P03"), (std::vector<Interval>{{0, 100}, {130, 600}}));

  m = MatchBuilder(600).kill(550, "P06", "P03").build();
  EXPECT_EQ(alive_intervals(m, "P03"), (std::vector<Interval>{{0, 550}}));

  EXPECT_THROW(alive_intervals(m, "P77"), Error);
  try {
    alive_intervals(m, "P77");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_player);
  }
}

TEST(Telemetry, PositionAt) {
  auto m = MatchBuilder(900).sample(0, "P01", {0, 0}).sample(2, "P01", {1, 1}).sample(5, "P02", {0.3, 0.3}).build();
  EXPECT_EQ(position_at(m, "P01", 1), (Point{0.5, 0.5}));
  EXPECT_EQ(position_at(m, "P01", 2), (Point{1, 1}));
  EXPECT_EQ(position_at(m, "P01", 0), (Point{0, 0}));
  EXPECT_EQ(position_at(m, "P02", 0), (Point{0.3, 0.3}));
  EXPECT_EQ(position_at(m, "P02", 900), (Point{0.3, 0.3}));
}

TEST(Telemetry, PositionAtWithoutSamples) {
  TelemetryRecord rec = MatchBuilder(100).record();
  std::erase_if(rec.position_samples, [](const PositionSample& s) { return s.player_id == "P05"; });
  MatchTelemetry m(rec);
  try {
    position_at(m, "P05", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_samples);
  }
}

TEST(Telemetry, Resample) {
  auto m = MatchBuilder(600).build();
  auto ticks = resample_positions(m, "P01", 1.0);
  ASSERT_EQ(ticks.size(), 601u);
  for (const auto& p : ticks) EXPECT_EQ((Point{p.x, p.y}), MatchBuilder::home(0));

  m = MatchBuilder(10).sample(0, "P01", {0, 0}).sample(10, "P01", {1, 1}).build();
  ticks = resample_positions(m, "P01", 1.0);
  ASSERT_EQ(ticks.size(), 11u);
  for (int k = 0; k <= 10; ++k) {
    EXPECT_DOUBLE_EQ(ticks[k].t, k);
    EXPECT_NEAR(ticks[k].x, k / 10.0, 1e-12);
    EXPECT_NEAR(ticks[k].y, k / 10.0, 1e-12);
  }
  EXPECT_EQ(resample_positions(m, "P01", 2.0).size(), 21u);
}

TEST(TelemetryProperty, RoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 20; ++round) {
    MatchBuilder b(300);
    for (int k = 0; k < 50; ++k) {
      double t = std::floor(u(rng) * 3000) / 10.0;
      b.sample(t, "P0" + std::to_string(1 + k % 9), {u(rng), u(rng)});
      b.damage(t, "P01", "P06", std::floor(u(rng) * 1000) / 10.0, {u(rng), u(rng)});
    }
    b.heal(12.5, "P03", "P05", 40).cs(13, "P05", CsSource::bot, 21.5).gold(14, "P05", 300);
    b.event({15, EventKind::objective, "P04", ObjectiveInfo{ObjectiveType::dragon, Team::blue, {0.5, 0.5}}});
    TelemetryRecord rec = b.record();
    MatchTelemetry first = parse_match(serialize_match(rec));
    EXPECT_EQ(first.record(), rec);
    MatchTelemetry second = parse_match(serialize_match(first.record()));
    EXPECT_EQ(second.record(), first.record());
    EXPECT_EQ(serialize_match(second.record()), serialize_match(first.record()));
  }
}

TEST(TelemetryProperty, AliveIntervalsDisjointAndBounded) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    MatchBuilder b(600);
    double t = 0;
    for (int k = 0; k < 5; ++k) {
      t += 1 + static_cast<double>(rng() % 100);
      if (t >= 600) break;
      b.kill(t, "P06", "P02");
      t += 1 + static_cast<double>(rng() % 40);
      if (t > 600) break;
      b.respawn(t, "P02");
    }
    auto m = b.build();
    auto iv = alive_intervals(m, "P02");
    double total = 0;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      EXPECT_LE(iv[i].t0, iv[i].t1);
      if (i > 0) {
        EXPECT_LT(iv[i - 1].t1, iv[i].t0);
      }
      total += iv[i].length();
    }
    EXPECT_LE(total, 600.0);
  }
}

TEST(TelemetryProperty, InterpolationStaysInUnitSquareAndIsContinuous) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatchBuilder b(100);
  for (int k = 0; k <= 100; k += 5) b.sample(k, "P01", {u(rng), u(rng)});
  auto m = b.build();
  for (int i = 0; i < 2000; ++i) {
    double t = u(rng) * 100;
    Point p = position_at(m, "P01", t);
    EXPECT_GE(p.x, 0);
    EXPECT_LE(p.x, 1);
    EXPECT_GE(p.y, 0);
    EXPECT_LE(p.y, 1);
    double t2 = std::min(100.0, t + 1e-7);
    EXPECT_LT(distance(p, position_at(m, "P01", t2)), 1e-5);
  }
}
