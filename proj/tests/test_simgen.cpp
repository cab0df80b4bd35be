#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "grieferlens/detect.hpp"
#include "grieferlens/simgen.hpp"
#include "grieferlens/spatial.hpp"

using namespace grieferlens;
namespace fs = std::filesystem;

namespace {

Scenario scenario(std::uint64_t seed, std::vector<std::string> injections = {}, double duration = 1200) {
  Scenario s;
  s.seed = seed;
  s.duration_s = duration;
  for (const auto& i : injections) s.injections.push_back(parse_injection(i));
  return s;
}

ErrorCode scenario_error(const Scenario& s) {
  try {
    generate_match(s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io_failure;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gl-simgen-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(Rng, FixedEngineSequence) {
  Rng r(5489);
  for (int i = 0; i < 9999; ++i) r.next();
  EXPECT_EQ(r.next(), 9981545732273789042ull);
  Rng a(77), b(77);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.uniform());
    auto k = a.integer(-3, 4);
    EXPECT_GE(k, -3);
    EXPECT_LE(k, 4);
    b.integer(-3, 4);
  }
}

TEST(Simgen, SameScenarioSameBytes) {
  auto s = scenario(9, {"P03:jungle_steal:late", "P07:feeding"});
  auto a = generate_match(s);
  auto b = generate_match(s);
  EXPECT_EQ(a.telemetry, b.telemetry);
  EXPECT_EQ(ground_truth_to_json(a.truth), ground_truth_to_json(b.truth));
  EXPECT_NE(a.telemetry, generate_match(scenario(10, {"P03:jungle_steal:late", "P07:feeding"})).telemetry);
}

TEST(Simgen, BaselineHasNoLabels) {
  auto g = generate_match(scenario(3));
  EXPECT_TRUE(g.truth.labels.empty());
  EXPECT_EQ(g.truth.match_id, "sim-3");
  EXPECT_EQ(g.record.match_id, "sim-3");
}

TEST(Simgen, AfkTruthAndFreeze) {
  auto g = generate_match(scenario(4, {"P03:afk:200-400"}));
  ASSERT_EQ(g.truth.labels.size(), 1u);
  EXPECT_EQ(g.truth.labels[0].player_id, "P03");
  EXPECT_EQ(g.truth.labels[0].type, GrieferType::afk);
  EXPECT_EQ(g.truth.labels[0].range, (Interval{200, 400}));
  MatchTelemetry m(g.record);
  Point start = position_at(m, "P03", 200);
  for (double t = 200; t <= 400; t += 1) {
    EXPECT_EQ(distance(position_at(m, "P03", t), start), 0.0) << t;
  }
  EXPECT_EQ(classify_zone(default_layout(), start), ZoneId::jungle_blue);
}

TEST(Simgen, GroundTruthMirrorsInjections) {
  auto g = generate_match(scenario(5, {"P02:lane_steal:bot", "P03:non_participation", "P09:position_steal:mid"}));
  ASSERT_EQ(g.truth.labels.size(), 3u);
  std::set<std::pair<std::string, GrieferType>> got;
  for (const auto& l : g.truth.labels) {
    got.insert({l.player_id, l.type});
    EXPECT_GE(l.range.t0, 0);
    EXPECT_LE(l.range.t1, 1200);
    EXPECT_LT(l.range.t0, l.range.t1);
  }
  EXPECT_EQ(got, (std::set<std::pair<std::string, GrieferType>>{{"P02", GrieferType::lane_stealing},
                                                                {"P03", GrieferType::non_participation},
                                                                {"P09", GrieferType::position_stealing}}));
  auto back = ground_truth_from_json(ground_truth_to_json(g.truth));
  EXPECT_EQ(ground_truth_to_json(back), ground_truth_to_json(g.truth));
}

TEST(Simgen, ParseInjection) {
  auto a = parse_injection("P03:afk:200-400");
  EXPECT_EQ(a.player_id, "P03");
  EXPECT_EQ(a.type, GrieferType::afk);
  EXPECT_EQ(*a.t0, 200);
  EXPECT_EQ(*a.t1, 400);
  EXPECT_EQ(parse_injection("P02:lane_steal:bot").type, GrieferType::lane_stealing);
  EXPECT_EQ(parse_injection("P02:lane_stealing:bot").target, "bot");
  EXPECT_EQ(parse_injection("P03:jungle_steal:late").type, GrieferType::jungle_stealing);
  EXPECT_EQ(parse_injection("P01:position_steal:mid").type, GrieferType::position_stealing);
  EXPECT_FALSE(parse_injection("P07:feeding").t0.has_value());
  for (const char* bad : {"", "P03", "P03:grief", "P03:afk:abc", "P03:afk:300-"}) {
    EXPECT_THROW(parse_injection(bad), Error) << bad;
  }
}

TEST(Simgen, InvalidScenarios) {
  EXPECT_EQ(scenario_error(scenario(1, {}, 100)), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P11:feeding"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P03:feeding", "P03:non_participation"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P03:afk:400-200"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P03:afk:200-1300"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P03:afk"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P04:jungle_steal:late"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P02:lane_steal:mid"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P05:lane_steal:bot"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P05:position_steal:bot_support"})), ErrorCode::invalid_scenario);
  EXPECT_EQ(scenario_error(scenario(1, {"P02:lane_steal:river"})), ErrorCode::invalid_scenario);
}

TEST(Simgen, Corpus) {
  TempDir dir;
  auto manifest = generate_corpus(1, 10, 20, dir.path);
  ASSERT_EQ(manifest.entries.size(), 80u);
  std::size_t telemetry = 0, truth = 0, other = 0;
  for (const auto& f : fs::directory_iterator(dir.path)) {
    auto name = f.path().filename().string();
    if (name.ends_with(".telemetry.json")) {
      ++telemetry;
    } else if (name.ends_with(".truth.json")) {
      ++truth;
    } else {
      ++other;
      EXPECT_EQ(name, "manifest.json");
    }
  }
  EXPECT_EQ(telemetry, 80u);
  EXPECT_EQ(truth, 80u);
  EXPECT_EQ(other, 1u);

  std::set<std::uint64_t> seeds;
  std::map<std::string, int> per_archetype;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    EXPECT_EQ(e.seed, 1 + i);
    seeds.insert(e.seed);
    per_archetype[e.archetype ? std::string(to_string(*e.archetype)) : "baseline"]++;
    auto m = parse_match(slurp(e.telemetry_file));
    EXPECT_EQ(m.match_id(), e.match_id);
    auto t = ground_truth_from_json(slurp(e.truth_file));
    if (e.archetype) {
      ASSERT_EQ(t.labels.size(), 1u);
      EXPECT_EQ(t.labels[0].type, *e.archetype);
    } else {
      EXPECT_TRUE(t.labels.empty());
    }
  }
  EXPECT_EQ(seeds.size(), 80u);
  EXPECT_EQ(per_archetype["baseline"], 20);
  for (auto g : kAllGrieferTypes) EXPECT_EQ(per_archetype[std::string(to_string(g))], 10);

  auto reread = read_manifest(dir.path);
  ASSERT_EQ(reread.entries.size(), 80u);
  EXPECT_EQ(reread.per_archetype, 10);
  EXPECT_EQ(reread.baseline, 20);
  EXPECT_EQ(reread.entries[79].match_id, manifest.entries[79].match_id);
}

TEST(SimgenProperty, DocumentsSatisfyTelemetryInvariants) {
  for (std::uint64_t seed = 200; seed < 212; ++seed) {
    std::optional<GrieferType> archetype;
    if (seed % 7) archetype = kAllGrieferTypes[seed % 6];
    auto g = generate_match(corpus_scenario(seed, archetype, 300.0 + 100.0 * static_cast<double>(seed % 10)));
    auto m = parse_match(g.telemetry);
    EXPECT_EQ(m.players().size(), 10u);
    EXPECT_EQ(serialize_match(parse_record(g.telemetry)), g.telemetry);
  }
}

TEST(SimgenProperty, BaselineIsClean) {
  const auto layout = default_layout();
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    auto g = generate_match(corpus_scenario(seed, std::nullopt));
    for (const auto& s : run_all_detectors(MatchTelemetry(g.record), layout)) {
      EXPECT_TRUE(s.findings.empty()) << "seed " << seed << " " << s.player_id << ": " << s.suspicion_paragraph;
    }
  }
}

// The detector quantity for each injected archetype clears its default threshold by at least 20%.
TEST(SimgenProperty, InjectionsAreVisible) {
  const auto layout = default_layout();
  const DetectorConfig cfg;
  auto margin = [](GrieferType g) -> std::pair<std::string, double> {
    switch (g) {
      case GrieferType::afk: return {"longest_s", 1.2 * DetectorConfig{}.afk.single_interval_s};
      case GrieferType::feeding: return {"deaths", 1.2 * DetectorConfig{}.feeding.min_deaths};
      case GrieferType::lane_stealing: return {"share_pct", 120 * DetectorConfig{}.lane_steal.steal_share};
      case GrieferType::jungle_stealing: return {"share_pct", 120 * DetectorConfig{}.jungle_steal.jungle_share_thresh};
      case GrieferType::non_participation: return {"missed_frac", 1.2 * DetectorConfig{}.non_participation.missed_frac};
      case GrieferType::position_stealing: return {"squat_pct", 120 * DetectorConfig{}.position_steal.squat_frac};
    }
    return {};
  };
  for (std::size_t k = 0; k < kAllGrieferTypes.size(); ++k) {
    const GrieferType g = kAllGrieferTypes[k];
    for (std::uint64_t i = 0; i < 5; ++i) {
      auto sc = corpus_scenario(1 + 10 * k + i, g);
      auto gen = generate_match(sc);
      const std::string who = sc.injections.at(0).player_id;
      const SuspicionFinding* hit = nullptr;
      auto summaries = run_all_detectors(MatchTelemetry(gen.record), layout, cfg);
      for (const auto& s : summaries) {
        for (const auto& f : s.findings) {
          if (f.player_id == who && f.griefer_type == g) hit = &f;
        }
      }
      ASSERT_NE(hit, nullptr) << to_string(g) << " seed " << sc.seed;
      auto [key, floor] = margin(g);
      const EvidenceValue* v = hit->find(key);
      ASSERT_NE(v, nullptr) << key;
      double x = std::holds_alternative<std::int64_t>(*v) ? static_cast<double>(std::get<std::int64_t>(*v)) : std::get<double>(*v);
      EXPECT_GE(x, floor) << to_string(g) << " seed " << sc.seed << " " << key;
    }
  }
}
