#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spikereg/encoding.hpp"
#include "spikereg/types.hpp"

namespace spikereg {

struct Dataset {
  std::vector<AnalogSample> samples;
  std::vector<Label> labels;  // index into class_names
  std::vector<std::string> class_names;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  int channel_count() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
  /// Throws MixedChannelCounts / LabelCountMismatch / MissingLabel.
  void validate() const;
};

enum class SignalFamily {
  // Class-specific sums of sinusoids plus white noise.
  SinusoidMixture,
  // Band-limited background noise plus a class-specific transient.
  NoiseTransient,
};

std::string_view to_string(SignalFamily family);
SignalFamily signal_family_from_string(std::string_view name);

struct SyntheticSpec {
  int classes = 3;
  int channels = 14;
  int timepoints = 128;
  int per_class_count = 20;
  SignalFamily family = SignalFamily::NoiseTransient;
  double noise_level = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Sample `index` of class `label`; pure in (spec, label, index).
AnalogSample synthesize_sample(const SyntheticSpec& spec, Label label, int index);

/// per_class_count samples per class, classes interleaved (0, 1, .., 0, 1, ..).
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Means of consecutive non-overlapping windows along time; a trailing
/// partial window is averaged over its own length.
AnalogSample reduce_window(const AnalogSample& sample, int window);

std::vector<SpikeTrain> encode_dataset(const Dataset& dataset, double factor,
                                       AerMode mode = AerMode::Symmetric);

/// One row per channel, comma separated, no header. A first line that does
/// not parse as numbers is skipped as a header.
Matrix<double> read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Matrix<double>& m);
void write_spike_csv(const std::filesystem::path& path, const SpikeTrain& s);
SpikeTrain read_spike_csv(const std::filesystem::path& path);

/// Reads a JSON manifest (see docs/formats.md); sample paths are relative to
/// the manifest's directory.
Dataset load_csv_dataset(const std::filesystem::path& manifest_path);

/// Writes sample CSVs plus manifest.json into `dir`; returns the manifest path.
std::filesystem::path save_csv_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace spikereg
