#include "spikereg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "spikereg/error.hpp"
#include "spikereg/random.hpp"

namespace spikereg {

namespace fs = std::filesystem;
using json = nlohmann::json;

void Dataset::validate() const {
  if (samples.size() != labels.size())
    throw Error(ErrorCode::LabelCountMismatch, std::to_string(samples.size()) + " samples but " +
                                                   std::to_string(labels.size()) + " labels");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].rows() != samples.front().rows())
      throw Error(ErrorCode::MixedChannelCounts,
                  "sample " + std::to_string(k) + " has " + std::to_string(samples[k].rows()) +
                      " channels, expected " + std::to_string(samples.front().rows()));
    if (labels[k] < 0 || labels[k] >= static_cast<Label>(class_names.size()))
      throw Error(ErrorCode::MissingLabel, "sample " + std::to_string(k) + " has unknown label");
  }
}

std::string_view to_string(SignalFamily family) {
  return family == SignalFamily::SinusoidMixture ? "sinusoid_mixture" : "noise_transient";
}

SignalFamily signal_family_from_string(std::string_view name) {
  if (name == "sinusoid_mixture") return SignalFamily::SinusoidMixture;
  if (name == "noise_transient") return SignalFamily::NoiseTransient;
  throw Error(ErrorCode::InvalidSpec, "unknown signal family '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
  if (classes < 1 || channels < 1 || timepoints < 1 || per_class_count < 1)
    throw Error(ErrorCode::InvalidSpec, "synthetic counts must all be >= 1");
  if (!(noise_level >= 0) || !std::isfinite(noise_level))
    throw Error(ErrorCode::InvalidSpec, "noise_level must be finite and >= 0");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Tone {
  double cycles;  // per sample window
  double amplitude;
  double phase;
};

// Sinusoid-mixture template: three tones per channel, drawn per class.
std::vector<std::vector<Tone>> class_tones(const SyntheticSpec& spec, Label label) {
  Rng rng(derive_seed(derive_seed(spec.seed, stream::kSynthetic), 1000 + label));
  std::uniform_real_distribution<double> cycles(1.0, 12.0), amp(0.5, 1.5), phase(0.0, kTwoPi);
  std::vector<std::vector<Tone>> tones(spec.channels);
  for (auto& ch : tones)
    for (int k = 0; k < 3; ++k) ch.push_back({cycles(rng), amp(rng), phase(rng)});
  return tones;
}

struct Transient {
  std::vector<int> channels;
  double onset;   // timestep of the bump centre
  double width;   // gaussian sigma, timesteps
  double amplitude;
};

// A third of the channels (at least one) carry a gaussian bump whose centre
// and sign pattern are class specific.
Transient class_transient(const SyntheticSpec& spec, Label label) {
  Rng rng(derive_seed(derive_seed(spec.seed, stream::kSynthetic), 2000 + label));
  Transient tr;
  std::vector<int> all(spec.channels);
  for (int c = 0; c < spec.channels; ++c) all[c] = c;
  std::shuffle(all.begin(), all.end(), rng);
  const int count = std::max(1, spec.channels / 3);
  tr.channels.assign(all.begin(), all.begin() + count);
  std::sort(tr.channels.begin(), tr.channels.end());
  // Onsets spread over the window so classes do not overlap in time.
  const double slot = static_cast<double>(spec.timepoints) / (spec.classes + 1);
  tr.onset = slot * (label + 1);
  tr.width = std::max(1.0, spec.timepoints / 64.0);
  tr.amplitude = 4.0;
  return tr;
}

}  // namespace

AnalogSample synthesize_sample(const SyntheticSpec& spec, Label label, int index) {
  spec.validate();
  const int m = spec.channels;
  const int n = spec.timepoints;
  AnalogSample x = AnalogSample::Zero(m, n);
  Rng rng(derive_seed(derive_seed(spec.seed, stream::kSynthetic),
                      (static_cast<std::uint64_t>(label) << 32) + static_cast<std::uint64_t>(index)));
  std::normal_distribution<double> gauss(0.0, 1.0);

  if (spec.family == SignalFamily::SinusoidMixture) {
    const auto tones = class_tones(spec, label);
    for (int c = 0; c < m; ++c)
      for (int t = 0; t < n; ++t) {
        double v = 0;
        for (const auto& tone : tones[c])
          v += tone.amplitude * std::sin(kTwoPi * tone.cycles * t / n + tone.phase);
        x(c, t) = v;
      }
    if (spec.noise_level > 0)
      for (int c = 0; c < m; ++c)
        for (int t = 0; t < n; ++t) x(c, t) += spec.noise_level * gauss(rng);
  } else {
    // Background: eight random tones per channel below n/8 cycles, scaled by
    // noise_level, plus the class transient.
    std::uniform_real_distribution<double> cycles(1.0, std::max(1.0, n / 8.0));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    if (spec.noise_level > 0)
      for (int c = 0; c < m; ++c)
        for (int k = 0; k < 8; ++k) {
          const double f = cycles(rng);
          const double ph = phase(rng);
          const double a = spec.noise_level * gauss(rng) / std::sqrt(8.0);
          for (int t = 0; t < n; ++t) x(c, t) += a * std::sin(kTwoPi * f * t / n + ph);
        }
    const Transient tr = class_transient(spec, label);
    for (std::size_t k = 0; k < tr.channels.size(); ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      for (int t = 0; t < n; ++t) {
        const double z = (t - tr.onset) / tr.width;
        x(tr.channels[k], t) += sign * tr.amplitude * std::exp(-0.5 * z * z);
      }
    }
  }
  return x;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Dataset d;
  for (int c = 0; c < spec.classes; ++c) d.class_names.push_back("class_" + std::to_string(c));
  d.samples.reserve(static_cast<std::size_t>(spec.classes) * spec.per_class_count);
  for (int i = 0; i < spec.per_class_count; ++i)
    for (int c = 0; c < spec.classes; ++c) {
      d.samples.push_back(synthesize_sample(spec, c, i));
      d.labels.push_back(c);
    }
  std::ostringstream prov;
  prov << "synthetic:" << to_string(spec.family) << " classes=" << spec.classes
       << " channels=" << spec.channels << " timepoints=" << spec.timepoints
       << " per_class=" << spec.per_class_count << " noise=" << spec.noise_level
       << " seed=" << spec.seed;
  d.provenance = prov.str();
  return d;
}

AnalogSample reduce_window(const AnalogSample& sample, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
  const Eigen::Index n = sample.cols();
  const Eigen::Index out_n = (n + window - 1) / window;
  AnalogSample out(sample.rows(), out_n);
  for (Eigen::Index k = 0; k < out_n; ++k) {
    const Eigen::Index begin = k * window;
    const Eigen::Index len = std::min<Eigen::Index>(window, n - begin);
    out.col(k) = sample.middleCols(begin, len).rowwise().mean();
  }
  return out;
}

std::vector<SpikeTrain> encode_dataset(const Dataset& dataset, double factor, AerMode mode) {
  std::vector<SpikeTrain> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(aer_encode(s, factor, mode));
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    std::string_view field = trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Matrix<double> read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": row has " +
                                             std::to_string(row.size()) + " columns, expected " +
                                             std::to_string(rows.front().size()));
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
  Matrix<double> m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_csv_matrix(const fs::path& path, const Matrix<double>& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_spike_csv(const fs::path& path, const SpikeTrain& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(s(r, c));
    }
    out << '\n';
  }
}

SpikeTrain read_spike_csv(const fs::path& path) {
  const Matrix<double> m = read_csv_matrix(path);
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double v = m.data()[k];
    if (v != -1.0 && v != 0.0 && v != 1.0)
      throw Error(ErrorCode::ParseError, path.string() + ": spike entries must be -1, 0 or 1");
  }
  return m.cast<std::int8_t>();
}

Dataset load_csv_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + manifest_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array())
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": manifest needs a 'samples' array");
  if (doc["samples"].empty())
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": manifest lists no samples");

  Dataset d;
  std::map<std::string, Label> by_name;
  if (doc.contains("classes")) {
    for (const auto& c : doc["classes"]) {
      by_name.emplace(c.get<std::string>(), static_cast<Label>(d.class_names.size()));
      d.class_names.push_back(c.get<std::string>());
    }
  }
  const fs::path base = manifest_path.parent_path();
  std::size_t k = 0;
  for (const auto& entry : doc["samples"]) {
    const std::string where = manifest_path.string() + ": sample " + std::to_string(k++);
    if (!entry.contains("file") || !entry["file"].is_string())
      throw Error(ErrorCode::ParseError, where + " has no 'file'");
    if (!entry.contains("label")) throw Error(ErrorCode::MissingLabel, where + " has no 'label'");
    const auto& lab = entry["label"];
    Label label = -1;
    if (lab.is_string()) {
      auto it = by_name.find(lab.get<std::string>());
      if (it == by_name.end()) {
        if (doc.contains("classes"))
          throw Error(ErrorCode::MissingLabel, where + " label '" + lab.get<std::string>() +
                                                   "' not in the class table");
        it = by_name.emplace(lab.get<std::string>(), static_cast<Label>(d.class_names.size())).first;
        d.class_names.push_back(lab.get<std::string>());
      }
      label = it->second;
    } else if (lab.is_number_integer()) {
      label = lab.get<Label>();
      if (label < 0 || label >= static_cast<Label>(d.class_names.size()))
        throw Error(ErrorCode::MissingLabel, where + " label index out of range");
    } else {
      throw Error(ErrorCode::MissingLabel, where + " label must be a class name or index");
    }
    d.samples.push_back(read_csv_matrix(base / entry["file"].get<std::string>()));
    d.labels.push_back(label);
    if (d.samples.back().rows() != d.samples.front().rows())
      throw Error(ErrorCode::MixedChannelCounts, where + " has a different channel count");
  }
  d.provenance = "csv:" + manifest_path.string();
  return d;
}

fs::path save_csv_dataset(const Dataset& dataset, const fs::path& dir) {
  dataset.validate();
  fs::create_directories(dir);
  json doc;
  doc["format"] = "spikereg-manifest";
  doc["version"] = 1;
  doc["classes"] = dataset.class_names;
  doc["samples"] = json::array();
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu.csv", k);
    write_csv_matrix(dir / name, dataset.samples[k]);
    doc["samples"].push_back({{"file", name}, {"label", dataset.class_names[dataset.labels[k]]}});
  }
  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest);
  out << doc.dump(2) << '\n';
  return manifest;
}

}  // namespace spikereg
