#pragma once

#include <filesystem>
#include <initializer_list>
#include <string_view>

#include <json.hpp>

#include "spikereg/evaluation.hpp"
#include "spikereg/network.hpp"

namespace spikereg {

using json = nlohmann::json;

inline constexpr std::string_view kModelFormat = "spikereg-model";
inline constexpr int kModelVersion = 1;

/// Throws InvalidConfig naming the first key of `obj` not in `allowed`.
void require_known_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view where);

json to_json(const NetworkConfig& config);
/// Keys absent from `j` keep the value from `defaults`; unknown keys throw.
NetworkConfig network_config_from_json(const json& j, const NetworkConfig& defaults = {});

json to_json(const FiringStats& stats);
FiringStats firing_stats_from_json(const json& j);

json to_json(const PruneReport& report);
PruneReport prune_report_from_json(const json& j);

json to_json(const EvalReport& report);

json to_json(const TrainedModel& model);
/// Throws SnapshotVersionMismatch for another format tag or version.
TrainedModel model_from_json(const json& j);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace spikereg
