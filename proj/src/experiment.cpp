#include "spikereg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spikereg/error.hpp"
#include "spikereg/parallel.hpp"
#include "spikereg/pruning.hpp"
#include "spikereg/random.hpp"

namespace spikereg {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string_view to_string(AerMode m) { return m == AerMode::Symmetric ? "symmetric" : "literal"; }

AerMode aer_mode_from_string(const std::string& s) {
  if (s == "symmetric") return AerMode::Symmetric;
  if (s == "literal") return AerMode::Literal;
  throw Error(ErrorCode::InvalidConfig, "unknown encoding mode '" + s + "'");
}

std::string_view to_string(F1Average a) {
  switch (a) {
    case F1Average::Macro: return "macro";
    case F1Average::Weighted: return "weighted";
    case F1Average::Binary: return "binary";
  }
  return "?";
}

F1Average f1_average_from_string(const std::string& s) {
  if (s == "macro") return F1Average::Macro;
  if (s == "weighted") return F1Average::Weighted;
  if (s == "binary") return F1Average::Binary;
  throw Error(ErrorCode::InvalidConfig, "unknown f1_average '" + s + "'");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json synthetic_json(const SyntheticSpec& s) {
  return {{"classes", s.classes},
          {"channels", s.channels},
          {"timepoints", s.timepoints},
          {"per_class_count", s.per_class_count},
          {"family", to_string(s.family)},
          {"noise_level", s.noise_level},
          {"seed", s.seed}};
}

SyntheticSpec synthetic_from_json(const json& j) {
  require_known_keys(
      j, {"classes", "channels", "timepoints", "per_class_count", "family", "noise_level", "seed"},
      "dataset.synthetic");
  SyntheticSpec s;
  read_opt(j, "classes", s.classes);
  read_opt(j, "channels", s.channels);
  read_opt(j, "timepoints", s.timepoints);
  read_opt(j, "per_class_count", s.per_class_count);
  read_opt(j, "noise_level", s.noise_level);
  read_opt(j, "seed", s.seed);
  if (j.contains("family")) s.family = signal_family_from_string(j["family"].get<std::string>());
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return s;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json dataset;
  if (c.dataset.manifest)
    dataset["manifest"] = c.dataset.manifest->generic_string();
  else
    dataset["synthetic"] = synthetic_json(c.dataset.synthetic);
  json approaches = json::array();
  for (Approach a : c.approaches) approaches.push_back(to_string(a));
  return {
      {"format", kExperimentFormat},
      {"version", kExperimentVersion},
      {"seed", c.seed},
      {"dataset", dataset},
      {"preprocess", {{"reduce_window", c.reduce_window}}},
      {"encoding", {{"factor", c.aer_factor}, {"mode", to_string(c.aer_mode)}}},
      {"network", to_json(c.network)},
      {"approaches", approaches},
      {"evaluation",
       {{"kfold", c.evaluation.kfold},
        {"train_fraction", c.evaluation.train_fraction},
        {"repeats", c.evaluation.repeats},
        {"f1_average", to_string(c.evaluation.f1_average)}}},
      {"ip_tuning",
       {{"enabled", c.tuning.enabled},
        {"theta_pos_grid", c.tuning.theta_pos_grid},
        {"theta_neg_grid", c.tuning.theta_neg_grid}}},
      {"pruning",
       {{"thresholds", c.pruning.thresholds},
        {"suggest_k", c.pruning.suggest_k},
        {"gap_factor", c.pruning.gap_factor}}},
  };
}

ExperimentConfig experiment_config_from_json(const json& j) {
  require_known_keys(j,
                     {"format", "version", "seed", "dataset", "preprocess", "encoding", "network",
                      "approaches", "evaluation", "ip_tuning", "pruning"},
                     "experiment config");
  if (j.contains("format") && j["format"] != kExperimentFormat)
    throw Error(ErrorCode::InvalidConfig, "config format must be 'spikereg-experiment'");
  if (j.contains("version") && j["version"] != kExperimentVersion)
    throw Error(ErrorCode::InvalidConfig, "unsupported config version");

  ExperimentConfig c;
  c.tuning.theta_pos_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  c.tuning.theta_neg_grid = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  read_opt(j, "seed", c.seed);

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    require_known_keys(d, {"manifest", "synthetic"}, "dataset");
    if (d.contains("manifest") && d.contains("synthetic"))
      throw Error(ErrorCode::InvalidConfig, "dataset takes either 'manifest' or 'synthetic'");
    if (d.contains("manifest")) c.dataset.manifest = fs::path(d["manifest"].get<std::string>());
    if (d.contains("synthetic")) c.dataset.synthetic = synthetic_from_json(d["synthetic"]);
  }
  if (j.contains("preprocess")) {
    require_known_keys(j["preprocess"], {"reduce_window"}, "preprocess");
    read_opt(j["preprocess"], "reduce_window", c.reduce_window);
  }
  if (j.contains("encoding")) {
    const auto& e = j["encoding"];
    require_known_keys(e, {"factor", "mode"}, "encoding");
    read_opt(e, "factor", c.aer_factor);
    if (e.contains("mode")) c.aer_mode = aer_mode_from_string(e["mode"].get<std::string>());
  }
  NetworkConfig net_defaults;
  net_defaults.channel_count = c.dataset.synthetic.channels;
  c.network = j.contains("network") ? network_config_from_json(j["network"], net_defaults) : net_defaults;
  if (!c.dataset.manifest) c.network.channel_count = c.dataset.synthetic.channels;

  if (j.contains("approaches")) {
    c.approaches.clear();
    for (const auto& a : j["approaches"]) c.approaches.push_back(approach_from_string(a.get<std::string>()));
    if (c.approaches.empty()) throw Error(ErrorCode::InvalidConfig, "no approaches requested");
  }
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    require_known_keys(e, {"kfold", "train_fraction", "repeats", "f1_average"}, "evaluation");
    read_opt(e, "kfold", c.evaluation.kfold);
    read_opt(e, "train_fraction", c.evaluation.train_fraction);
    read_opt(e, "repeats", c.evaluation.repeats);
    if (e.contains("f1_average"))
      c.evaluation.f1_average = f1_average_from_string(e["f1_average"].get<std::string>());
  }
  if (j.contains("ip_tuning")) {
    const auto& t = j["ip_tuning"];
    require_known_keys(t, {"enabled", "theta_pos_grid", "theta_neg_grid"}, "ip_tuning");
    read_opt(t, "enabled", c.tuning.enabled);
    read_opt(t, "theta_pos_grid", c.tuning.theta_pos_grid);
    read_opt(t, "theta_neg_grid", c.tuning.theta_neg_grid);
  }
  if (j.contains("pruning")) {
    const auto& p = j["pruning"];
    require_known_keys(p, {"thresholds", "suggest_k", "gap_factor"}, "pruning");
    read_opt(p, "thresholds", c.pruning.thresholds);
    read_opt(p, "suggest_k", c.pruning.suggest_k);
    read_opt(p, "gap_factor", c.pruning.gap_factor);
  }

  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (c.reduce_window < 1) fail("preprocess.reduce_window must be >= 1");
  if (!(c.aer_factor >= 0)) fail("encoding.factor must be >= 0");
  if (c.evaluation.kfold == 1 || c.evaluation.kfold < 0) fail("evaluation.kfold must be 0 or >= 2");
  if (!(c.evaluation.train_fraction > 0 && c.evaluation.train_fraction < 1))
    fail("evaluation.train_fraction must lie in (0, 1)");
  if (c.evaluation.repeats < 1) fail("evaluation.repeats must be >= 1");
  if (c.pruning.suggest_k < 1) fail("pruning.suggest_k must be >= 1");
  if (!(c.pruning.gap_factor > 0)) fail("pruning.gap_factor must be > 0");
  for (double t : c.pruning.thresholds)
    if (!(t >= 0 && t <= 1)) fail("pruning thresholds must lie in [0, 1]");
  std::sort(c.pruning.thresholds.begin(), c.pruning.thresholds.end());
  if (c.tuning.enabled && (c.tuning.theta_pos_grid.empty() || c.tuning.theta_neg_grid.empty()))
    fail("ip_tuning grids must be non-empty");
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  ExperimentConfig c = experiment_config_from_json(j);
  if (c.dataset.manifest && c.dataset.manifest->is_relative())
    c.dataset.manifest = (path.parent_path() / *c.dataset.manifest).lexically_normal();
  return c;
}

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData out;
  out.analog = config.dataset.manifest ? load_csv_dataset(*config.dataset.manifest)
                                       : generate_synthetic(config.dataset.synthetic);
  out.analog.validate();
  if (config.reduce_window > 1)
    for (auto& s : out.analog.samples) s = reduce_window(s, config.reduce_window);
  out.encoded = encode_dataset(out.analog, config.aer_factor, config.aer_mode);
  return out;
}

namespace {

template <typename T>
std::vector<T> gather(const std::vector<T>& items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

struct Partition {
  std::vector<SpikeTrain> train, test;
  std::vector<Label> train_labels, test_labels;
};

Partition partition(const PreparedData& data, double fraction, std::uint64_t seed) {
  const SplitIndices split = stratified_split(data.analog.labels, fraction, seed);
  return {gather(data.encoded, split.train), gather(data.encoded, split.test),
          gather(data.analog.labels, split.train), gather(data.analog.labels, split.test)};
}

ConfusionMatrix evaluate(const Network& net, const Partition& p, int classes) {
  ConfusionMatrix cm(classes);
  for (std::size_t k = 0; k < p.test.size(); ++k) cm.add(p.test_labels[k], net.infer(p.test[k]).label);
  return cm;
}

struct SweepEntry {
  int repeat = 0;
  int level = 0;  // index among the ascending thresholds
  PruneReport report;
  Metrics metrics;
  bool skipped = false;  // threshold would prune every neuron
};

struct RepeatOutput {
  std::vector<RunRecord> cv;
  RunRecord split;
  std::optional<Network> network;  // kept for repeat 0
  Partition part;                  // kept for repeat 0
  std::vector<SweepEntry> sweep;
};

void write_runs_csv(const fs::path& path, const std::vector<const EvalReport*>& reports) {
  std::ostringstream out;
  out << "protocol,run,seed,accuracy,f1,kappa,mean_rate,entropy_bits,active_fraction,"
         "prune_threshold,pruned_fraction,prune_refused,train_count,test_count\n";
  for (const EvalReport* r : reports)
    for (const auto& rec : r->runs)
      out << r->protocol << ',' << rec.run << ',' << rec.seed << ',' << num(rec.metrics.accuracy) << ','
          << num(rec.metrics.f1) << ',' << num(rec.metrics.kappa) << ',' << num(rec.mean_rate) << ','
          << num(rec.entropy_bits) << ',' << num(rec.active_fraction) << ','
          << (rec.prune_threshold ? num(*rec.prune_threshold) : std::string()) << ','
          << num(rec.pruned_fraction) << ',' << (rec.prune_refused ? 1 : 0) << ',' << rec.train_count << ',' << rec.test_count << '\n';
  write_text(path, out.str());
}

json t_test_json(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) return nullptr;
  const TTestResult t = two_sample_t(a, b);
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"); };
  return {{"t", finite(t.t)}, {"p", t.p}, {"df", t.df}};
}

}  // namespace

void write_tuning_curve(const fs::path& path, const TuningResult& result) {
  std::ostringstream out;
  out << "theta_pos,theta_neg,active_fraction,entropy_bits,selected\n";
  for (const auto& pt : result.table) {
    const bool sel = pt.rates.theta_pos == result.best.theta_pos &&
                     pt.rates.theta_neg == result.best.theta_neg;
    out << num(pt.rates.theta_pos) << ',' << num(pt.rates.theta_neg) << ','
        << num(pt.active_fraction) << ',' << num(pt.entropy_bits) << ',' << (sel ? 1 : 0) << '\n';
  }
  write_text(path, out.str());
}

void write_rate_histogram(const fs::path& path, const FiringStats& stats) {
  std::ostringstream out;
  out << "bin_low,bin_high,probability\n";
  for (std::size_t k = 0; k < stats.rate_pdf.size(); ++k)
    out << num(stats.bin_edges[k]) << ',' << num(stats.bin_edges[k + 1]) << ','
        << num(stats.rate_pdf[k]) << '\n';
  write_text(path, out.str());
}

void write_avalanches(const fs::path& path, const FiringStats& stats) {
  std::ostringstream out;
  out << "size,count\n";
  for (const auto& [size, count] : stats.avalanche_sizes) out << size << ',' << count << '\n';
  write_text(path, out.str());
}

FiringStats write_raster(const fs::path& path, const Network& network,
                         std::span<const SpikeTrain> samples) {
  std::ostringstream out;
  out << "sample_id,neuron_id,timestep\n";
  ActivityRecord record;
  record.spike_counts.assign(network.config().hidden_count, 0);
  record.active = network.active_mask();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Propagation p = network.propagate(samples[s]);
    // Events in time order, neurons ascending within a step.
    std::vector<std::pair<int, int>> events;
    for (std::size_t i = 0; i < p.hidden_raster.size(); ++i)
      for (int t : p.hidden_raster[i]) {
        events.emplace_back(t, static_cast<int>(i));
        ++record.spike_counts[i];
      }
    std::sort(events.begin(), events.end());
    for (const auto& [t, i] : events) out << s << ',' << i << ',' << t << '\n';
    record.total_steps += p.window;
    record.population_trace.push_back(p.population_trace);
  }
  write_text(path, out.str());
  if (record.total_steps == 0) record.total_steps = 1;
  return compute_firing_stats(record, network.config().stats_bins);
}

TuningResult run_tuning(const ExperimentConfig& config, const PreparedData& data, int threads) {
  const std::uint64_t seed = repeat_seed(config.seed, 0);
  const Partition part = partition(data, config.evaluation.train_fraction, seed);
  NetworkConfig base = config.network;
  base.channel_count = data.analog.channel_count();
  base.seed = seed;
  const TrainCallback train = [&](const IpRates<double>& rates) {
    NetworkConfig nc = base;
    nc.ip = rates;
    Network net(nc);
    return net.train_unsupervised(part.train, TrainingMode::Ensemble);
  };
  return tune_ip_rates(train, config.tuning.theta_pos_grid, config.tuning.theta_neg_grid, threads);
}

ExperimentOutcome run_experiment(const ExperimentConfig& config_in, const fs::path& out_dir,
                                 int threads, const ProgressFn& progress) {
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  fs::create_directories(out_dir);
  ExperimentOutcome outcome;
  std::string stage = "prepare_data";
  auto write_status = [&](bool complete, const std::string& error) {
    json s = {{"complete", complete}, {"completed_stages", outcome.completed_stages}};
    if (!complete) {
      s["pending_stage"] = stage;
      if (!error.empty()) s["error"] = error;
    }
    write_json(out_dir / "status.json", s);
  };

  try {
    write_status(false, "");
    ExperimentConfig config = config_in;
    say("preparing data");
    const PreparedData data = prepare_data(config);
    config.network.channel_count = data.analog.channel_count();
    config.network.validate();
    const int classes = static_cast<int>(data.analog.class_names.size());
    write_json(out_dir / "resolved_config.json", to_json(config));
    outcome.completed_stages.push_back(stage);

    NetworkConfig tuned = config.network;
    if (config.tuning.enabled) {
      stage = "ip_tuning";
      write_status(false, "");
      say("tuning IP rates over " +
          std::to_string(config.tuning.theta_pos_grid.size() * config.tuning.theta_neg_grid.size()) +
          " grid points");
      outcome.tuning = run_tuning(config, data, threads);
      tuned.ip = outcome.tuning->best;
      write_tuning_curve(out_dir / "tuning_curve.csv", *outcome.tuning);
      write_json(out_dir / "tuning.json", {{"theta_pos", tuned.ip.theta_pos},
                                           {"theta_neg", tuned.ip.theta_neg}});
      outcome.completed_stages.push_back(stage);
    }

    json summary = json::object();
    std::map<Approach, std::vector<double>> rate_by_approach, acc_by_approach;
    std::vector<SweepEntry> sweep;

    for (Approach approach : config.approaches) {
      const std::string name(to_string(approach));
      stage = "evaluate_" + name;
      write_status(false, "");
      say("evaluating " + name + " over " + std::to_string(config.evaluation.repeats) + " repeats");

      PipelineOptions options;
      options.network = approach == Approach::StdpOnly ? config.network : tuned;
      options.approach = approach;
      if (!config.pruning.thresholds.empty()) options.prune_threshold = config.pruning.thresholds.front();
      options.gap_factor = config.pruning.gap_factor;
      options.f1_average = config.evaluation.f1_average;

      std::vector<RepeatOutput> reps(config.evaluation.repeats);
      parallel_for(reps.size(), threads, [&](std::size_t r) {
        const std::uint64_t seed = repeat_seed(config.seed, static_cast<int>(r));
        Partition part = partition(data, config.evaluation.train_fraction, seed);
        RepeatOutput& out = reps[r];
        if (config.evaluation.kfold >= 2) {
          EvalReport cv = run_kfold(part.train, part.train_labels, classes, options,
                                    config.evaluation.kfold, seed, 1);
          out.cv = std::move(cv.runs);
        }
        Network net(options.network);
        const PipelineResult res = run_pipeline(part.train, part.train_labels, part.test,
                                                part.test_labels, classes, options, seed, &net);
        out.split = make_run_record(static_cast<int>(r), seed, res, part.train.size(), part.test.size());

        if (approach == Approach::Ensemble) {
          std::vector<double> thresholds = config.pruning.thresholds;
          if (thresholds.empty())
            thresholds = suggest_thresholds(res.train_stats, config.pruning.suggest_k,
                                            config.pruning.gap_factor)
                             .thresholds;
          for (std::size_t level = 0; level < thresholds.size(); ++level) {
            SweepEntry e;
            e.repeat = static_cast<int>(r);
            e.level = static_cast<int>(level);
            try {
              e.report = prune_by_rate(net, thresholds[level]);
              e.metrics = compute_metrics(evaluate(net, part, classes), options.f1_average);
            } catch (const Error& err) {
              if (err.code() != ErrorCode::AllNeuronsPruned) throw;
              e.report.threshold = thresholds[level];
              e.skipped = true;
            }
            out.sweep.push_back(std::move(e));
          }
          net.restore_all_neurons();
        }
        if (r == 0) {
          out.network = std::move(net);
          out.part = std::move(part);
        }
      });

      EvalReport cv_report, split_report;
      cv_report.approach = split_report.approach = approach;
      cv_report.protocol = "kfold";
      split_report.protocol = "split";
      for (std::size_t r = 0; r < reps.size(); ++r) {
        for (auto rec : reps[r].cv) {
          rec.run = static_cast<int>(r * config.evaluation.kfold) + rec.run;
          cv_report.runs.push_back(rec);
        }
        split_report.runs.push_back(reps[r].split);
        for (auto& e : reps[r].sweep) sweep.push_back(e);
      }
      cv_report.aggregate();
      split_report.aggregate();

      json eval = {{"split", to_json(split_report)}, {"cv", nullptr}};
      std::vector<const EvalReport*> both{&split_report};
      if (config.evaluation.kfold >= 2) {
        eval["cv"] = to_json(cv_report);
        both.insert(both.begin(), &cv_report);
        outcome.cv_reports.push_back(cv_report);
      }
      outcome.split_reports.push_back(split_report);
      write_json(out_dir / ("eval_" + name + ".json"), eval);
      write_runs_csv(out_dir / ("runs_" + name + ".csv"), both);

      const Network& net0 = *reps[0].network;
      save_model(out_dir / ("model_" + name + ".json"), net0.to_model());
      write_json(out_dir / ("firing_stats_" + name + ".json"), to_json(*net0.training_stats()));
      write_rate_histogram(out_dir / ("rate_histogram_" + name + ".csv"), *net0.training_stats());
      write_avalanches(out_dir / ("avalanches_" + name + ".csv"), *net0.training_stats());
      write_raster(out_dir / ("raster_" + name + ".csv"), net0, reps[0].part.train);

      for (const auto& rec : split_report.runs) {
        rate_by_approach[approach].push_back(rec.mean_rate);
        acc_by_approach[approach].push_back(rec.metrics.accuracy);
      }
      summary[name] = {{"split_accuracy", split_report.accuracy.mean},
                       {"split_f1", split_report.f1.mean},
                       {"split_kappa", split_report.kappa.mean},
                       {"mean_rate", split_report.mean_rate.mean},
                       {"cv_accuracy", config.evaluation.kfold >= 2 ? json(cv_report.accuracy.mean)
                                                                    : json(nullptr)}};
      outcome.completed_stages.push_back(stage);
    }

    if (!sweep.empty()) {
      stage = "pruning_sweep";
      // Surviving counts must not increase with the threshold within a repeat.
      bool monotone = true;
      std::map<int, std::vector<const SweepEntry*>> by_repeat;
      for (const auto& e : sweep) by_repeat[e.repeat].push_back(&e);
      for (auto& [r, entries] : by_repeat) {
        for (std::size_t k = 1; k < entries.size(); ++k) {
          if (entries[k]->skipped || entries[k - 1]->skipped) continue;
          if (entries[k]->report.surviving_count > entries[k - 1]->report.surviving_count)
            monotone = false;
        }
      }
      json entries = json::array();
      std::ostringstream csv;
      csv << "repeat,level,threshold,pruned_fraction,surviving_count,accuracy,f1,kappa,skipped\n";
      std::map<int, std::vector<double>> acc_by_level, frac_by_level, thr_by_level;
      for (const auto& e : sweep) {
        json pr = to_json(e.report);
        entries.push_back({{"repeat", e.repeat},
                           {"level", e.level},
                           {"skipped", e.skipped},
                           {"report", pr},
                           {"accuracy", e.metrics.accuracy},
                           {"f1", e.metrics.f1},
                           {"kappa", e.metrics.kappa}});
        csv << e.repeat << ',' << e.level << ',' << num(e.report.threshold) << ','
            << num(e.report.pruned_fraction) << ',' << e.report.surviving_count << ','
            << num(e.metrics.accuracy) << ',' << num(e.metrics.f1) << ',' << num(e.metrics.kappa)
            << ',' << (e.skipped ? 1 : 0) << '\n';
        if (!e.skipped) {
          acc_by_level[e.level].push_back(e.metrics.accuracy);
          frac_by_level[e.level].push_back(e.report.pruned_fraction);
          thr_by_level[e.level].push_back(e.report.threshold);
        }
      }
      json levels = json::array();
      for (const auto& [level, accs] : acc_by_level)
        levels.push_back({{"level", level},
                          {"runs", accs.size()},
                          {"mean_threshold", summarize(thr_by_level[level]).mean},
                          {"mean_pruned_fraction", summarize(frac_by_level[level]).mean},
                          {"mean_accuracy", summarize(accs).mean}});
      write_json(out_dir / "prune_sweep.json",
                 {{"monotone_surviving_count", monotone}, {"levels", levels}, {"entries", entries}});
      write_text(out_dir / "prune_sweep.csv", csv.str());
      if (!monotone)
        throw Error(ErrorCode::InvalidThreshold, "pruning sweep surviving counts are not monotone");
      outcome.completed_stages.push_back(stage);
    }

    if (rate_by_approach.count(Approach::StdpOnly) && rate_by_approach.count(Approach::Ensemble)) {
      summary["ensemble_vs_stdp_only"] = {
          {"mean_rate_t_test",
           t_test_json(rate_by_approach[Approach::StdpOnly], rate_by_approach[Approach::Ensemble])},
          {"accuracy_t_test",
           t_test_json(acc_by_approach[Approach::Ensemble], acc_by_approach[Approach::StdpOnly])}};
    }
    write_json(out_dir / "summary.json", summary);
    stage = "done";
    write_status(true, "");
  } catch (const std::exception& e) {
    write_status(false, e.what());
    throw;
  }
  return outcome;
}

}  // namespace spikereg
