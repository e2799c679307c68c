#include "spikereg/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "spikereg/error.hpp"

namespace spikereg {

namespace fs = std::filesystem;

void require_known_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view where) {
  if (!obj.is_object())
    throw Error(ErrorCode::InvalidConfig, std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + std::string(where));
  }
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string_view to_string(DriftScope s) {
  switch (s) {
    case DriftScope::FromFirstSpike: return "from_first_spike";
    case DriftScope::WholeWindow: return "whole_window";
    case DriftScope::AllNeurons: return "all_neurons";
  }
  return "?";
}

DriftScope drift_scope_from_string(const std::string& s) {
  if (s == "from_first_spike") return DriftScope::FromFirstSpike;
  if (s == "whole_window") return DriftScope::WholeWindow;
  if (s == "all_neurons") return DriftScope::AllNeurons;
  throw Error(ErrorCode::InvalidConfig, "unknown drift_scope '" + s + "'");
}

json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"range", s.range()}};
}

}  // namespace

json to_json(const NetworkConfig& c) {
  return {
      {"channel_count", c.channel_count},
      {"hidden_count", c.hidden_count},
      {"seed", c.seed},
      {"permute_inputs", c.permute_inputs},
      {"stats_bins", c.stats_bins},
      {"lif",
       {{"v_init", c.lif.v_init},
        {"v_rest", c.lif.v_rest},
        {"r", c.lif.r},
        {"c", c.lif.c},
        {"t_refractory", c.lif.t_refractory},
        {"dt", c.lif.dt},
        {"v_thr_floor_ratio", c.lif.v_thr_floor_ratio}}},
      {"stdp",
       {{"a_pos", c.stdp.a_pos},
        {"a_neg", c.stdp.a_neg},
        {"tau_pos", c.stdp.tau_pos},
        {"tau_neg", c.stdp.tau_neg},
        {"w_max", c.stdp.w_max},
        {"w_min", c.stdp.w_min}}},
      {"ip", {{"theta_pos", c.ip.theta_pos}, {"theta_neg", c.ip.theta_neg}}},
      {"rank_order",
       {{"alpha", c.rank_order.alpha},
        {"mod", c.rank_order.mod},
        {"drift", c.rank_order.drift},
        {"drift_scope", to_string(c.rank_order.scope)}}},
  };
}

NetworkConfig network_config_from_json(const json& j, const NetworkConfig& defaults) {
  require_known_keys(j,
                     {"channel_count", "hidden_count", "seed", "permute_inputs", "stats_bins", "lif",
                      "stdp", "ip", "rank_order"},
                     "network");
  NetworkConfig c = defaults;
  read_opt(j, "channel_count", c.channel_count);
  read_opt(j, "hidden_count", c.hidden_count);
  read_opt(j, "seed", c.seed);
  read_opt(j, "permute_inputs", c.permute_inputs);
  read_opt(j, "stats_bins", c.stats_bins);
  if (j.contains("lif")) {
    const auto& l = j["lif"];
    require_known_keys(l, {"v_init", "v_rest", "r", "c", "t_refractory", "dt", "v_thr_floor_ratio"},
                       "network.lif");
    read_opt(l, "v_init", c.lif.v_init);
    read_opt(l, "v_rest", c.lif.v_rest);
    read_opt(l, "r", c.lif.r);
    read_opt(l, "c", c.lif.c);
    read_opt(l, "t_refractory", c.lif.t_refractory);
    read_opt(l, "dt", c.lif.dt);
    read_opt(l, "v_thr_floor_ratio", c.lif.v_thr_floor_ratio);
  }
  if (j.contains("stdp")) {
    const auto& s = j["stdp"];
    require_known_keys(s, {"a_pos", "a_neg", "tau_pos", "tau_neg", "w_max", "w_min"}, "network.stdp");
    read_opt(s, "a_pos", c.stdp.a_pos);
    read_opt(s, "a_neg", c.stdp.a_neg);
    read_opt(s, "tau_pos", c.stdp.tau_pos);
    read_opt(s, "tau_neg", c.stdp.tau_neg);
    read_opt(s, "w_max", c.stdp.w_max);
    read_opt(s, "w_min", c.stdp.w_min);
  }
  if (j.contains("ip")) {
    const auto& s = j["ip"];
    require_known_keys(s, {"theta_pos", "theta_neg"}, "network.ip");
    read_opt(s, "theta_pos", c.ip.theta_pos);
    read_opt(s, "theta_neg", c.ip.theta_neg);
  }
  if (j.contains("rank_order")) {
    const auto& s = j["rank_order"];
    require_known_keys(s, {"alpha", "mod", "drift", "drift_scope"}, "network.rank_order");
    read_opt(s, "alpha", c.rank_order.alpha);
    read_opt(s, "mod", c.rank_order.mod);
    read_opt(s, "drift", c.rank_order.drift);
    if (s.contains("drift_scope"))
      c.rank_order.scope = drift_scope_from_string(s["drift_scope"].get<std::string>());
  }
  c.validate();
  return c;
}

json to_json(const FiringStats& st) {
  json aval = json::array();
  for (const auto& [size, count] : st.avalanche_sizes) aval.push_back({size, count});
  return {
      {"total_steps", st.total_steps},
      {"active_count", st.active_count},
      {"mean_rate", st.mean_rate},
      {"entropy_bits", st.entropy_bits},
      {"active_fraction", st.active_fraction},
      {"per_neuron_rate",
       std::vector<double>(st.per_neuron_rate.data(),
                           st.per_neuron_rate.data() + st.per_neuron_rate.size())},
      {"bin_edges", st.bin_edges},
      {"rate_pdf", st.rate_pdf},
      {"avalanche_sizes", aval},
  };
}

FiringStats firing_stats_from_json(const json& j) {
  FiringStats st;
  st.total_steps = j.at("total_steps").get<std::int64_t>();
  st.active_count = j.at("active_count").get<int>();
  st.mean_rate = j.at("mean_rate").get<double>();
  st.entropy_bits = j.at("entropy_bits").get<double>();
  st.active_fraction = j.at("active_fraction").get<double>();
  const auto rates = j.at("per_neuron_rate").get<std::vector<double>>();
  st.per_neuron_rate = Eigen::Map<const Vector<double>>(rates.data(), rates.size());
  st.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  st.rate_pdf = j.at("rate_pdf").get<std::vector<double>>();
  for (const auto& pair : j.at("avalanche_sizes"))
    st.avalanche_sizes[pair.at(0).get<std::int64_t>()] = pair.at(1).get<std::int64_t>();
  return st;
}

json to_json(const PruneReport& r) {
  return {{"threshold", r.threshold},
          {"pruned_indices", r.pruned_indices},
          {"pruned_fraction", r.pruned_fraction},
          {"surviving_count", r.surviving_count}};
}

PruneReport prune_report_from_json(const json& j) {
  PruneReport r;
  r.threshold = j.at("threshold").get<double>();
  r.pruned_indices = j.at("pruned_indices").get<std::vector<int>>();
  r.pruned_fraction = j.at("pruned_fraction").get<double>();
  r.surviving_count = j.at("surviving_count").get<int>();
  return r;
}

json to_json(const EvalReport& r) {
  json runs = json::array();
  for (const auto& rec : r.runs) {
    runs.push_back({
        {"run", rec.run},
        {"seed", rec.seed},
        {"accuracy", rec.metrics.accuracy},
        {"f1", rec.metrics.f1},
        {"kappa", rec.metrics.kappa},
        {"mean_rate", rec.mean_rate},
        {"entropy_bits", rec.entropy_bits},
        {"active_fraction", rec.active_fraction},
        {"prune_threshold", rec.prune_threshold ? json(*rec.prune_threshold) : json(nullptr)},
        {"pruned_fraction", rec.pruned_fraction},
        {"prune_refused", rec.prune_refused},
        {"train_count", rec.train_count},
        {"test_count", rec.test_count},
    });
  }
  return {{"approach", to_string(r.approach)},
          {"protocol", r.protocol},
          {"accuracy", summary_json(r.accuracy)},
          {"f1", summary_json(r.f1)},
          {"kappa", summary_json(r.kappa)},
          {"mean_rate", summary_json(r.mean_rate)},
          {"runs", runs}};
}

json to_json(const TrainedModel& m) {
  json neurons = {{"v", json::array()},
                  {"v_thr", json::array()},
                  {"refractory_remaining", json::array()},
                  {"spike_count", json::array()},
                  {"active", json::array()}};
  for (const auto& n : m.neuron_states) {
    neurons["v"].push_back(n.v);
    neurons["v_thr"].push_back(n.v_thr);
    neurons["refractory_remaining"].push_back(n.refractory_remaining);
    neurons["spike_count"].push_back(n.spike_count);
    neurons["active"].push_back(n.active);
  }
  std::vector<double> w(m.synapses.data(), m.synapses.data() + m.synapses.size());
  json gallery = json::array();
  for (const auto& g : m.gallery)
    gallery.push_back({{"sample_id", g.sample_id},
                       {"label", g.label},
                       {"weights", std::vector<double>(g.weights.data(),
                                                       g.weights.data() + g.weights.size())}});
  return {
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"config", to_json(m.config)},
      {"input_mapping", m.input_mapping},
      {"synapses", {{"rows", m.synapses.rows()}, {"cols", m.synapses.cols()}, {"row_major", w}}},
      {"neurons", neurons},
      {"gallery", gallery},
      {"training_steps", m.training_steps},
      {"stats", m.stats ? to_json(*m.stats) : json(nullptr)},
      {"prune_report", m.prune_report ? to_json(*m.prune_report) : json(nullptr)},
  };
}

TrainedModel model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kModelFormat)
    throw Error(ErrorCode::SnapshotVersionMismatch, "not a spikereg model snapshot");
  if (j.value("version", -1) != kModelVersion)
    throw Error(ErrorCode::SnapshotVersionMismatch,
                "snapshot version " + std::to_string(j.value("version", -1)) + ", expected " +
                    std::to_string(kModelVersion));
  try {
    TrainedModel m;
    m.config = network_config_from_json(j.at("config"));
    m.input_mapping = j.at("input_mapping").get<std::vector<int>>();
    const auto& syn = j.at("synapses");
    const auto rows = syn.at("rows").get<Eigen::Index>();
    const auto cols = syn.at("cols").get<Eigen::Index>();
    const auto w = syn.at("row_major").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols)
      throw Error(ErrorCode::ParseError, "synapse data length does not match its shape");
    m.synapses = Eigen::Map<const WeightMatrix<double>>(w.data(), rows, cols);

    const auto& n = j.at("neurons");
    const auto v = n.at("v").get<std::vector<double>>();
    const auto thr = n.at("v_thr").get<std::vector<double>>();
    const auto refr = n.at("refractory_remaining").get<std::vector<int>>();
    const auto count = n.at("spike_count").get<std::vector<std::int64_t>>();
    const auto active = n.at("active").get<std::vector<bool>>();
    if (thr.size() != v.size() || refr.size() != v.size() || count.size() != v.size() ||
        active.size() != v.size())
      throw Error(ErrorCode::ParseError, "neuron arrays differ in length");
    m.neuron_states.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      m.neuron_states[i] = {v[i], thr[i], refr[i], count[i], active[i]};

    for (const auto& g : j.at("gallery")) {
      OutputNeuron o;
      o.sample_id = g.at("sample_id").get<std::int64_t>();
      o.label = g.at("label").get<Label>();
      const auto gw = g.at("weights").get<std::vector<double>>();
      o.weights = Eigen::Map<const Vector<double>>(gw.data(), gw.size());
      m.gallery.push_back(std::move(o));
    }
    m.training_steps = j.at("training_steps").get<std::int64_t>();
    if (!j.at("stats").is_null()) m.stats = firing_stats_from_json(j["stats"]);
    if (!j.at("prune_report").is_null()) m.prune_report = prune_report_from_json(j["prune_report"]);
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model snapshot: ") + e.what());
  }
}

void save_model(const fs::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(model).dump(1) << '\n';
}

TrainedModel load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace spikereg
