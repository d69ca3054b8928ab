#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nematic/dynamics.hpp"

namespace nematic {

/// Header of trajectory.csv, one StepReport per row.
extern const char* const kTrajectoryHeader;

std::string trajectory_csv(const std::vector<StepReport>& reports);
/// Throws std::runtime_error naming the file and line on malformed input.
std::vector<StepReport> read_trajectory_csv(const std::filesystem::path& path);

nlohmann::ordered_json run_info_to_json(const RunInfo& info);
RunInfo run_info_from_json(const nlohmann::json& j);

/// SHA-1 of "blob <size>\0<content>", as printed by git hash-object.
std::string git_blob_hash(const std::string& content);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace nematic
