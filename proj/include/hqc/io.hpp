#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hqc/config.hpp"
#include "hqc/record.hpp"

namespace hqc {

using json = nlohmann::json;

inline constexpr std::string_view kArtifactVersion = "1.0.0";

/// Strict structured-text config. Unknown keys and type mismatches raise
/// ConfigError with the dotted field path. coupling.lambda and
/// coupling.sigma are required; everything else has a default.
HybridConfig config_from_json(const json& j);
json config_to_json(const HybridConfig& config);

/// Reads and validates a JSON config file. An empty file is treated as an
/// empty object (and therefore fails on the required fields).
HybridConfig parse_config(const std::filesystem::path& path);
HybridConfig parse_config_text(std::string_view text);

/// Canonical text form (sorted keys, round-trip doubles).
std::string serialize_config(const HybridConfig& config);

/// SHA-256 of the canonical form, hex encoded.
std::string config_hash(const HybridConfig& config);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

inline constexpr std::string_view kCsvColumns = "t,X,P,x_expect,p_expect,x_variance,x_bar,prenorm,dW";

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record);

/// Reads the data rows of a file written by write_trajectory_csv.
std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path);

struct OutputFile {
    std::string path;  ///< relative to the manifest's directory
    std::string sha256;
};

/// Everything needed to rerun a CLI invocation and check its outputs.
struct RunManifest {
    std::string command;
    json options = json::object();
    HybridConfig config;
    std::uint64_t master_seed = 0;
    std::uint64_t trajectories = 1;
    std::string version{kArtifactVersion};
    std::vector<OutputFile> outputs;
    double wall_clock_seconds = 0.0;
    std::uint64_t steps = 0;
};

json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

/// Hashes every output under `dir`, fills `m.outputs` and writes
/// `dir/manifest.json` last.
void write_manifest(const std::filesystem::path& dir, RunManifest& m, const std::vector<std::string>& files);
RunManifest read_manifest(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);

}  // namespace hqc
