#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "grieferlens/detect.hpp"
#include "grieferlens/telemetry.hpp"

namespace grieferlens {

/// Seeded generator for all simulator sampling. The engine is mt19937_64,
/// whose output sequence is fixed by the C++ standard; the conversions below
/// are spelled out so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// One scripted griefer. `t0`/`t1` are used by afk and feeding; `target` holds
/// the lane (lane_stealing), stage (jungle_stealing) or assignment whose home
/// zone is squatted (position_stealing).
struct Injection {
  std::string player_id;
  GrieferType type = GrieferType::afk;
  std::optional<double> t0;
  std::optional<double> t1;
  std::string target;
};

/// Parses "P03:afk:200-400", "P02:lane_stealing:bot", "P03:jungle_stealing:late",
/// "P07:feeding", "P03:non_participation", "P01:position_stealing:mid".
/// Short aliases lane_steal / jungle_steal / position_steal are accepted.
Injection parse_injection(std::string_view spec);

struct Scenario {
  std::uint64_t seed = 1;
  double duration_s = 1200.0;
  std::vector<Injection> injections;
  std::string match_id;  // defaults to "sim-<seed>"
};

struct GroundTruthLabel {
  std::string player_id;
  GrieferType type = GrieferType::afk;
  Interval range;
};

struct GroundTruth {
  std::string match_id;
  std::vector<GroundTruthLabel> labels;
};

std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(std::string_view text);

struct GeneratedMatch {
  std::string telemetry;  // serialized document
  TelemetryRecord record;
  GroundTruth truth;
};

/// Deterministic in the scenario. Throws Error(invalid_scenario).
GeneratedMatch generate_match(const Scenario& scenario);

/// Scenario used by the corpus for one archetype: injected player and
/// parameters are drawn from the seed.
Scenario corpus_scenario(std::uint64_t seed, std::optional<GrieferType> archetype, double duration_s = 1200.0);

struct CorpusEntry {
  std::string match_id;
  std::uint64_t seed = 0;
  std::optional<GrieferType> archetype;  // nullopt for baseline
  std::filesystem::path telemetry_file;
  std::filesystem::path truth_file;
};

struct CorpusManifest {
  std::uint64_t base_seed = 1;
  int per_archetype = 0;
  int baseline = 0;
  std::vector<CorpusEntry> entries;
};

/// Writes `per_archetype` matches for each griefer type (in declaration order)
/// followed by `baseline` clean matches; seeds run base_seed, base_seed + 1, ...
/// Files: <match_id>.telemetry.json, <match_id>.truth.json, manifest.json.
CorpusManifest generate_corpus(std::uint64_t base_seed, int per_archetype, int baseline,
                               const std::filesystem::path& out_dir);
CorpusManifest read_manifest(const std::filesystem::path& dir);

}  // namespace grieferlens
