#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimoq/config.hpp"
#include "mimoq/efie.hpp"
#include "mimoq/geometry.hpp"

namespace mimoq {

struct RunOptions {
  std::string out_dir = ".";
  std::string cache_dir;                 // empty disables the operator cache
  std::optional<std::uint64_t> seed;     // overrides [solver] seed
  int threads = 1;
};

struct RunReport {
  std::vector<std::string> outputs;  // paths of files written
  std::string summary_json;          // checkpoint values, serialized JSON
};

/// Validates every section/key against the schema; throws ConfigError with
/// the offending line for unknown keys, bad enums, or inconsistent blocks.
void validate_config(const Config& cfg);

/// Executes one experiment described by a validated config. Throws
/// ConfigError for config-level problems and std::runtime_error for
/// numerical failures.
RunReport run_experiment(const Config& cfg, const RunOptions& opt);

/// Figure ids with bundled configs.
std::vector<std::string> known_figures();

/// Bundled config text for a figure id; throws ConfigError on unknown ids.
std::vector<std::pair<std::string, std::string>> bundled_configs(
    const std::string& figure_id);

/// Runs every bundled config of the figure, prefixing outputs with the id.
RunReport reproduce_figure(const std::string& figure_id, const RunOptions& opt);

/// Primal-vs-dual gap certificate over the shipped verification instances;
/// writes the gap report CSV.
RunReport run_verify(const RunOptions& opt);

/// Geometry described by a config's [geometry] block, with the current
/// sweep override applied. Ports empty means current-level analysis.
struct GeometryModel {
  std::string type;
  Mesh mesh;
  std::vector<int> ports;
  SubregionMask mask;   // nonempty only for plate-subregion
  double k = 2.0 * 3.14159265358979323846;
};

GeometryModel build_geometry(const Config& cfg, const std::string& sweep_param,
                             double sweep_value);

/// Operator assembly with a binary disk cache keyed by mesh hash, k and
/// assembly options; empty cache_dir assembles unconditionally.
OperatorSet assemble_cached(const Mesh& mesh, double k,
                            const AssemblyOptions& opts,
                            const std::string& cache_dir);

}  // namespace mimoq
