#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikereg/experiment.hpp"
#include "spikereg/pruning.hpp"

namespace fs = std::filesystem;
using namespace spikereg;

namespace {

AerMode parse_mode(const std::string& s) {
  if (s == "symmetric") return AerMode::Symmetric;
  if (s == "literal") return AerMode::Literal;
  throw Error(ErrorCode::InvalidConfig, "mode must be 'symmetric' or 'literal'");
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int cmd_encode(const fs::path& manifest, const fs::path& out_dir, double factor,
               const std::string& mode, int window) {
  Dataset d = load_csv_dataset(manifest);
  d.validate();
  if (window > 1)
    for (auto& s : d.samples) s = reduce_window(s, window);
  const auto encoded = encode_dataset(d, factor, parse_mode(mode));
  fs::create_directories(out_dir);
  json doc = {{"format", "spikereg-spikes"},
              {"version", 1},
              {"factor", factor},
              {"mode", mode},
              {"reduce_window", window},
              {"classes", d.class_names},
              {"samples", json::array()}};
  char name[32];
  for (std::size_t k = 0; k < encoded.size(); ++k) {
    std::snprintf(name, sizeof(name), "spikes_%05zu.csv", k);
    write_spike_csv(out_dir / name, encoded[k]);
    doc["samples"].push_back({{"file", name}, {"label", d.class_names[d.labels[k]]}});
  }
  write_json_file(out_dir / "manifest.json", doc);
  std::cout << "encoded " << encoded.size() << " samples into " << out_dir.string() << "\n";
  return 0;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, int threads, bool quiet) {
  const ExperimentConfig config = load_experiment_config(config_path);
  const ProgressFn progress = [quiet](const std::string& msg) {
    if (!quiet) std::cerr << "[run] " << msg << "\n";
  };
  const ExperimentOutcome outcome = run_experiment(config, out_dir, threads, progress);
  for (const auto& r : outcome.split_reports)
    std::cout << to_string(r.approach) << ": split accuracy " << r.accuracy.mean << " (sd "
              << r.accuracy.std << "), mean rate " << r.mean_rate.mean << "\n";
  return 0;
}

int cmd_stats(const fs::path& model_path, const std::optional<fs::path>& manifest,
              const fs::path& out_dir, double factor, const std::string& mode, int window) {
  const Network net = Network::from_model(load_model(model_path));
  fs::create_directories(out_dir);
  if (net.training_stats()) {
    write_json_file(out_dir / "firing_stats_training.json", to_json(*net.training_stats()));
    write_rate_histogram(out_dir / "rate_histogram_training.csv", *net.training_stats());
    write_avalanches(out_dir / "avalanches_training.csv", *net.training_stats());
  }
  if (manifest) {
    Dataset d = load_csv_dataset(*manifest);
    d.validate();
    if (window > 1)
      for (auto& s : d.samples) s = reduce_window(s, window);
    const auto encoded = encode_dataset(d, factor, parse_mode(mode));
    const FiringStats stats = write_raster(out_dir / "raster.csv", net, encoded);
    write_json_file(out_dir / "firing_stats.json", to_json(stats));
    write_rate_histogram(out_dir / "rate_histogram.csv", stats);
    write_avalanches(out_dir / "avalanches.csv", stats);
    std::cout << "mean rate " << stats.mean_rate << ", entropy " << stats.entropy_bits
              << " bits, active fraction " << stats.active_fraction << "\n";
  }
  return 0;
}

int cmd_prune(const fs::path& model_path, const std::optional<double>& threshold, int suggest_k,
              double gap_factor, const std::optional<fs::path>& out_path) {
  Network net = Network::from_model(load_model(model_path));
  if (!net.training_stats()) throw Error(ErrorCode::NotTrained, "model has no training statistics");
  if (!threshold) {
    const ThresholdSuggestion s = suggest_thresholds(*net.training_stats(), suggest_k, gap_factor);
    json j = {{"thresholds", s.thresholds}, {"fewer_clusters_than_k", s.fewer_clusters_than_k}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  const PruneReport report = prune_by_rate(net, *threshold);
  std::cout << to_json(report).dump(2) << "\n";
  if (out_path) save_model(*out_path, net.to_model());
  return 0;
}

int cmd_tune(const fs::path& config_path, const fs::path& out_dir, int threads) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (config.tuning.theta_pos_grid.empty() || config.tuning.theta_neg_grid.empty())
    throw Error(ErrorCode::EmptyGrid, "tuning grids are empty");
  const PreparedData data = prepare_data(config);
  config.network.channel_count = data.analog.channel_count();
  const TuningResult result = run_tuning(config, data, threads);
  fs::create_directories(out_dir);
  write_tuning_curve(out_dir / "tuning_curve.csv", result);
  write_json_file(out_dir / "tuning.json",
                  {{"theta_pos", result.best.theta_pos}, {"theta_neg", result.best.theta_neg}});
  std::cout << "selected theta_pos " << result.best.theta_pos << ", theta_neg "
            << result.best.theta_neg << "\n";
  return 0;
}

int cmd_gen_synthetic(const SyntheticSpec& spec, const std::string& family, const fs::path& out_dir) {
  SyntheticSpec s = spec;
  s.family = signal_family_from_string(family);
  s.validate();
  const fs::path manifest = save_csv_dataset(generate_synthetic(s), out_dir);
  std::cout << manifest.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking network engine and experiment harness"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for whole network runs")
      ->check(CLI::PositiveNumber);

  std::string mode = "symmetric";
  double factor = kDefaultAerFactor;
  int window = 1;

  auto* encode = app.add_subcommand("encode", "AER-encode a CSV dataset into ternary spike CSVs");
  fs::path enc_manifest, enc_out;
  encode->add_option("--input", enc_manifest, "Dataset manifest")->required();
  encode->add_option("--out", enc_out, "Output directory")->required();
  encode->add_option("--factor", factor, "Threshold factor (multiples of the std)");
  encode->add_option("--mode", mode, "symmetric or literal");
  encode->add_option("--window", window, "Mean-reduce window applied before encoding");

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  fs::path run_config, run_out;
  bool quiet = false;
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_out, "Results directory")->required();
  run->add_flag("--quiet", quiet, "No progress messages");

  auto* stats = app.add_subcommand("stats", "Firing statistics and raster from a model snapshot");
  fs::path stats_model, stats_out;
  std::optional<fs::path> stats_manifest;
  stats->add_option("--model", stats_model, "Model snapshot")->required();
  stats->add_option("--input", stats_manifest, "Dataset manifest to re-propagate");
  stats->add_option("--out", stats_out, "Output directory")->required();
  stats->add_option("--factor", factor, "Threshold factor for encoding --input");
  stats->add_option("--mode", mode, "symmetric or literal");
  stats->add_option("--window", window, "Mean-reduce window for --input");

  auto* prune = app.add_subcommand("prune", "Prune a model snapshot or suggest thresholds");
  fs::path prune_model;
  std::optional<double> prune_threshold;
  std::optional<fs::path> prune_out;
  int suggest_k = 3;
  double gap_factor = 3.0;
  prune->add_option("--model", prune_model, "Model snapshot")->required();
  prune->add_option("--threshold", prune_threshold, "Firing-rate threshold; omit to list suggestions");
  prune->add_option("--suggest", suggest_k, "Number of thresholds to suggest");
  prune->add_option("--gap-factor", gap_factor, "Gap multiple of the median gap that splits clusters");
  prune->add_option("--out", prune_out, "Write the pruned snapshot here");

  auto* tune = app.add_subcommand("tune", "IP-rate grid search from a config file");
  fs::path tune_config, tune_out;
  tune->add_option("--config", tune_config, "Experiment config (JSON)")->required();
  tune->add_option("--out", tune_out, "Output directory")->required();

  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic CSV dataset with a manifest");
  SyntheticSpec spec;
  std::string family(to_string(spec.family));
  fs::path gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--classes", spec.classes);
  gen->add_option("--channels", spec.channels);
  gen->add_option("--timepoints", spec.timepoints);
  gen->add_option("--per-class", spec.per_class_count);
  gen->add_option("--family", family, "noise_transient or sinusoid_mixture");
  gen->add_option("--noise", spec.noise_level);
  gen->add_option("--seed", spec.seed);

  auto* defaults = app.add_subcommand("print-defaults", "Print the default experiment config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) return cmd_encode(enc_manifest, enc_out, factor, mode, window);
    if (*run) return cmd_run(run_config, run_out, threads, quiet);
    if (*stats) return cmd_stats(stats_model, stats_manifest, stats_out, factor, mode, window);
    if (*prune) return cmd_prune(prune_model, prune_threshold, suggest_k, gap_factor, prune_out);
    if (*tune) return cmd_tune(tune_config, tune_out, threads);
    if (*gen) return cmd_gen_synthetic(spec, family, gen_out);
    if (*defaults) {
      std::cout << to_json(experiment_config_from_json(json::object())).dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
