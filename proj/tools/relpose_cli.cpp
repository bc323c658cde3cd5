// Command line front end: generate corpora, solve pairs, benchmark, tune.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relpose/bench.hpp"
#include "relpose/io.hpp"
#include "relpose/solver.hpp"
#include "relpose/synth.hpp"
#include "relpose/tuner.hpp"

namespace fs = std::filesystem;
using namespace relpose;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnsolved = 2;

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(text)};
    const std::uint64_t first = std::stoull(text.substr(0, dots));
    const std::uint64_t last = std::stoull(text.substr(dots + 2));
    if (last < first) throw InvalidArgument("empty seed range " + text);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
    return seeds;
  } catch (const std::logic_error&) {
    throw InvalidArgument("--seeds expects a..b or a single integer, got '" + text + "'");
  }
}

std::vector<GenSpec> load_grid(const fs::path& path) {
  return load_file(path, [](const JsonReader& j) {
    std::vector<GenSpec> grid;
    if (j.raw().is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) grid.push_back(gen_spec_from_json(j[i]));
    } else {
      grid.push_back(gen_spec_from_json(j));
    }
    return grid;
  });
}

KeypointSet load_keypoints(const fs::path& path) {
  return load_file(path, [](const JsonReader& j) { return keypoint_set_from_json(j); });
}

std::vector<ScenarioPair> load_corpus(const fs::path& manifest) {
  std::vector<ScenarioPair> pairs;
  for (const ManifestEntry& e : load_manifest(manifest)) pairs.push_back(load_scenario(e.path));
  return pairs;
}

struct Inputs {
  std::string gamma_path;
  std::string config_path;
};

// Gamma and config files are optional; per-iteration gammas from a tuner
// output override the config's.
std::pair<ConsistencyParams, SolverConfig> load_gamma_and_config(const Inputs& in) {
  SolverConfig config = in.config_path.empty() ? SolverConfig{} : load_config(in.config_path);
  ConsistencyParams gamma;
  if (!in.gamma_path.empty()) {
    GammaFile g = load_gamma(in.gamma_path);
    gamma = g.gamma;
    if (g.per_iter_gammas) {
      config.per_iter_gammas = std::move(g.per_iter_gammas);
      config.validate();
    }
  }
  return {gamma, config};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust relative pose estimation: spectral matching + reweighted fitting"};
  app.require_subcommand(1);

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic corpus and manifest");
  std::string spec_path, seeds_text, out_dir;
  generate_cmd->add_option("--spec", spec_path, "GenSpec JSON (object or array)")->required();
  generate_cmd->add_option("--seeds", seeds_text, "Seed range a..b (inclusive)")->required();
  generate_cmd->add_option("--out", out_dir, "Output directory")->required();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Estimate the pose between two keypoint sets");
  std::string source_path, target_path, pair_path, out_path;
  Inputs solve_in;
  auto* src_opt = solve_cmd->add_option("--source", source_path, "Source KeypointSet JSON");
  auto* tgt_opt = solve_cmd->add_option("--target", target_path, "Target KeypointSet JSON");
  auto* pair_opt = solve_cmd->add_option("--pair", pair_path, "ScenarioPair JSON (instead of --source/--target)");
  src_opt->needs(tgt_opt);
  tgt_opt->needs(src_opt);
  pair_opt->excludes(src_opt)->excludes(tgt_opt);
  solve_cmd->add_option("--gamma", solve_in.gamma_path, "ConsistencyParams JSON");
  solve_cmd->add_option("--config", solve_in.config_path, "SolverConfig JSON");
  solve_cmd->add_option("--out", out_path, "MatchResult JSON output")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Evaluate the solver over a corpus");
  std::string manifest_path, report_path, json_path, mode_name;
  Inputs bench_in;
  bench_cmd->add_option("--manifest", manifest_path, "Corpus manifest")->required();
  bench_cmd->add_option("--gamma", bench_in.gamma_path, "ConsistencyParams JSON");
  bench_cmd->add_option("--config", bench_in.config_path, "SolverConfig JSON");
  bench_cmd->add_option("--mode", mode_name, "nr | r | sm | r_sm (overrides config)")
      ->check(CLI::IsMember({"nr", "r", "sm", "r_sm"}));
  bench_cmd->add_option("--report", report_path, "CSV report output");
  bench_cmd->add_option("--json", json_path, "JSON report output");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Fit consistency parameters to ground truth");
  std::string tune_manifest, tune_out;
  Inputs tune_in;
  bool layerwise = false;
  int max_iters = -1;
  double fd_step = 1e-2;
  tune_cmd->add_option("--manifest", tune_manifest, "Training corpus manifest")->required();
  tune_cmd->add_option("--gamma-init", tune_in.gamma_path, "Initial ConsistencyParams JSON");
  tune_cmd->add_option("--config", tune_in.config_path, "SolverConfig JSON");
  tune_cmd->add_flag("--layerwise", layerwise, "Also tune one gamma per outer iteration");
  tune_cmd->add_option("--max-iters", max_iters, "Iteration cap (default 30, layer-wise 20)");
  tune_cmd->add_option("--fd-step", fd_step, "Log-space finite-difference step");
  tune_cmd->add_option("--out", tune_out, "Tuned gamma JSON output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate_cmd->parsed()) {
      const auto manifest =
          generate_corpus(load_grid(spec_path), parse_seed_range(seeds_text), out_dir);
      std::cout << "wrote " << manifest.size() << " pairs to " << out_dir << "\n";
      return kExitOk;
    }

    if (solve_cmd->parsed()) {
      if (pair_path.empty() && source_path.empty()) {
        throw InvalidArgument("solve needs --source/--target or --pair");
      }
      std::optional<ScenarioPair> pair;
      if (!pair_path.empty()) pair = load_scenario(pair_path);
      const KeypointSet source = pair ? pair->source : load_keypoints(source_path);
      const KeypointSet target = pair ? pair->target : load_keypoints(target_path);
      const auto [gamma, config] = load_gamma_and_config(solve_in);
      const MatchResult result = solve(source, target, gamma, config);
      write_json_file(out_path, to_json(result));
      if (!result.ok()) {
        std::cerr << to_string(result.status) << ": " << result.message << "\n";
        return kExitUnsolved;
      }
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      auto [gamma, config] = load_gamma_and_config(bench_in);
      if (!mode_name.empty()) config.mode = mode_from_string(mode_name);
      const MetricsReport report = evaluate(load_corpus(manifest_path), gamma, config);
      const std::string csv = report_csv(report);
      if (!report_path.empty()) {
        write_text_file(report_path, csv);
      } else {
        std::cout << csv;
      }
      if (!json_path.empty()) write_json_file(json_path, to_json(report));
      return kExitOk;
    }

    if (tune_cmd->parsed()) {
      auto [gamma, config] = load_gamma_and_config(tune_in);
      const TrainingSet train = load_corpus(tune_manifest);
      const TuneResult base = tune(train, gamma, config, fd_step, max_iters < 0 ? 30 : max_iters);
      Json out = {{"gamma", to_json(base.gamma)},
                  {"initial_loss", base.report.initial_loss},
                  {"final_loss", base.report.final_loss},
                  {"iterations", base.report.iterations}};
      if (layerwise) {
        const LayerwiseResult layers =
            tune_layerwise(train, base.gamma, config, fd_step, max_iters < 0 ? 20 : max_iters);
        Json list = Json::array();
        for (const auto& g : layers.gammas) list.push_back(to_json(g));
        out["per_iter_gammas"] = std::move(list);
        out["layerwise_loss"] = layers.final_loss;
      }
      write_json_file(tune_out, out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
