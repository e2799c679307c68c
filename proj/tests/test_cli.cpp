#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "spikereg/experiment.hpp"

using namespace spikereg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("spikereg_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with stdout redirected to `out`; returns the exit status.
int cli(const std::string& args, const fs::path& out = "/dev/null") {
  const std::string cmd =
      std::string(SPIKEREG_CLI) + " " + args + " > " + out.string() + " 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("print-defaults emits the default config") {
  TempDir dir("defaults");
  REQUIRE(cli("print-defaults", dir.path / "d.json") == 0);
  const json j = json::parse(slurp(dir.path / "d.json"));
  CHECK(j.dump() == to_json(experiment_config_from_json(json::object())).dump());
  CHECK(j["encoding"]["factor"] == 0.5);
}

TEST_CASE("gen-synthetic then encode keeps the sample shapes") {
  TempDir dir("encode");
  REQUIRE(cli("gen-synthetic --out " + (dir.path / "data").string() +
              " --per-class 2 --channels 5 --timepoints 40") == 0);
  REQUIRE(cli("encode --input " + (dir.path / "data" / "manifest.json").string() + " --out " +
              (dir.path / "spikes").string()) == 0);
  const json m = json::parse(slurp(dir.path / "spikes" / "manifest.json"));
  CHECK(m["factor"] == 0.5);
  CHECK(m["samples"].size() == 6);
  for (const auto& s : m["samples"]) {
    const auto spikes = read_spike_csv(dir.path / "spikes" / s["file"].get<std::string>());
    CHECK(spikes.rows() == 5);
    CHECK(spikes.cols() == 40);
  }
}

TEST_CASE("constant signals encode to silent files") {
  TempDir dir("const");
  Dataset d;
  d.samples = {AnalogSample::Constant(3, 16, 2.5), AnalogSample::Constant(3, 16, -1.0)};
  d.labels = {0, 1};
  d.class_names = {"a", "b"};
  const auto manifest = save_csv_dataset(d, dir.path / "data");
  REQUIRE(cli("encode --input " + manifest.string() + " --out " + (dir.path / "s").string()) == 0);
  for (const char* f : {"spikes_00000.csv", "spikes_00001.csv"})
    CHECK(read_spike_csv(dir.path / "s" / f).isZero());
}

TEST_CASE("encode reports parse errors with a non-zero exit") {
  TempDir dir("badcsv");
  std::ofstream(dir.path / "a.csv") << "1,2,3\n4,5\n";
  std::ofstream(dir.path / "m.json") << R"({"samples": [{"file": "a.csv", "label": "x"}]})";
  CHECK(cli("encode --input " + (dir.path / "m.json").string() + " --out " +
            (dir.path / "o").string()) == 1);
}

TEST_CASE("run, stats and prune") {
  TempDir dir("run");
  std::ofstream(dir.path / "cfg.json") << R"({
    "dataset": {"synthetic": {"channels": 4, "timepoints": 40, "per_class_count": 5}},
    "network": {"hidden_count": 20},
    "approaches": ["ensemble"],
    "evaluation": {"kfold": 0, "repeats": 2}
  })";
  REQUIRE(cli("--threads 2 run --quiet --config " + (dir.path / "cfg.json").string() + " --out " +
              (dir.path / "out").string()) == 0);
  CHECK(json::parse(slurp(dir.path / "out" / "status.json"))["complete"] == true);

  const auto model = dir.path / "out" / "model_ensemble.json";
  REQUIRE(cli("gen-synthetic --out " + (dir.path / "data").string() +
              " --per-class 2 --channels 4 --timepoints 40") == 0);
  const std::string stats_args = "stats --model " + model.string() + " --input " +
                                 (dir.path / "data" / "manifest.json").string() + " --out ";
  REQUIRE(cli(stats_args + (dir.path / "s1").string()) == 0);
  REQUIRE(cli(stats_args + (dir.path / "s2").string()) == 0);
  for (const char* f : {"raster.csv", "firing_stats.json", "rate_histogram.csv", "avalanches.csv",
                        "firing_stats_training.json"})
    CHECK(slurp(dir.path / "s1" / f) == slurp(dir.path / "s2" / f));

  std::istringstream hist(slurp(dir.path / "s1" / "rate_histogram.csv"));
  std::string line;
  std::getline(hist, line);
  double total = 0;
  while (std::getline(hist, line)) total += std::stod(line.substr(line.rfind(',') + 1));
  CHECK(std::abs(total - 1.0) <= 1e-9);

  CHECK(cli("prune --model " + model.string(), dir.path / "suggest.json") == 0);
  CHECK(json::parse(slurp(dir.path / "suggest.json")).contains("thresholds"));
  REQUIRE(cli("prune --model " + model.string() + " --threshold 0.001 --out " +
              (dir.path / "pruned.json").string()) == 0);
  CHECK(load_model(dir.path / "pruned.json").prune_report.has_value());
  CHECK(cli("prune --model " + model.string() + " --threshold 1.0") == 1);
}

TEST_CASE("stats of a silent model") {
  TempDir dir("silent");
  NetworkConfig nc;
  nc.channel_count = 3;
  nc.hidden_count = 10;
  Network net(nc);
  const std::vector<SpikeTrain> silent(2, SpikeTrain::Zero(3, 16));
  net.train_unsupervised(silent, TrainingMode::Ensemble);
  save_model(dir.path / "m.json", net.to_model());
  Dataset d;
  d.samples = {AnalogSample::Constant(3, 16, 1.0)};
  d.labels = {0};
  d.class_names = {"a"};
  const auto manifest = save_csv_dataset(d, dir.path / "data");
  REQUIRE(cli("stats --model " + (dir.path / "m.json").string() + " --input " + manifest.string() +
              " --out " + (dir.path / "s").string()) == 0);
  CHECK(slurp(dir.path / "s" / "raster.csv") == "sample_id,neuron_id,timestep\n");
  CHECK(json::parse(slurp(dir.path / "s" / "firing_stats.json"))["entropy_bits"] == 0.0);
}

TEST_CASE("config and snapshot errors") {
  TempDir dir("errors");
  std::ofstream(dir.path / "bad.json") << R"({"unknown_key": 1})";
  CHECK(cli("run --config " + (dir.path / "bad.json").string() + " --out " +
            (dir.path / "o").string()) == 2);
  std::ofstream(dir.path / "model.json") << R"({"format": "spikereg-model", "version": 99})";
  CHECK(cli("stats --model " + (dir.path / "model.json").string() + " --out " +
            (dir.path / "o").string()) == 1);
  CHECK(cli("no-such-command") != 0);
}
