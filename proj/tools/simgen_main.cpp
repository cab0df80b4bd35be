#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "grieferlens/simgen.hpp"

using namespace grieferlens;

namespace {

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simgen: seeded synthetic match generator"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double duration = 1200.0;
  std::vector<std::string> injects;
  std::string out, truth, match_id;
  auto* gen = app.add_subcommand("generate", "Generate one match");
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--duration", duration, "Match length in seconds")->capture_default_str();
  gen->add_option("--inject", injects, "player:type[:params], e.g. P03:afk:200-400 or P02:lane_stealing:bot");
  gen->add_option("--match-id", match_id, "Defaults to sim-<seed>");
  gen->add_option("--out", out, "Telemetry file (stdout when omitted)");
  gen->add_option("--truth", truth, "Ground-truth file");

  std::uint64_t base_seed = 1;
  int per_archetype = 10;
  int baseline = 20;
  std::string dir;
  auto* corpus = app.add_subcommand("corpus", "Generate a labelled corpus");
  corpus->add_option("--base-seed", base_seed)->capture_default_str();
  corpus->add_option("--per-archetype", per_archetype)->capture_default_str();
  corpus->add_option("--baseline", baseline)->capture_default_str();
  corpus->add_option("--out", dir)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) {
      Scenario s;
      s.seed = seed;
      s.duration_s = duration;
      s.match_id = match_id;
      for (const auto& spec : injects) s.injections.push_back(parse_injection(spec));
      GeneratedMatch m = generate_match(s);
      write_or_print(out, m.telemetry);
      if (!truth.empty()) write_or_print(truth, ground_truth_to_json(m.truth));
    } else if (*corpus) {
      CorpusManifest m = generate_corpus(base_seed, per_archetype, baseline, dir);
      std::fprintf(stderr, "wrote %zu matches to %s\n", m.entries.size(), dir.c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 1;
  }
  return 0;
}
