#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sirsurv/abm.hpp"
#include "sirsurv/ode_engine.hpp"
#include "sirsurv/sir_core.hpp"

namespace sirsurv::io {

/// Deterministic ODE run. With `fractions` the magnitudes are shares of the
/// population and b applies as given; otherwise s0/i0/r_init are counts out
/// of `n` and b is divided by n before integration.
struct OdeRunConfig {
  ModelVariant variant = ModelVariant::Classic;
  double b = 0.0;
  double c = 0.0;
  double m = 0.0;
  double m_prime = 0.0;
  double l = 0.0;
  double n = 10000.0;
  double s0 = 0.0;
  double i0 = 0.0;
  double r_init = 0.0;
  double t_end = 200.0;
  double dt = ode::kDefaultDt;
  bool fractions = false;

  friend bool operator==(const OdeRunConfig&, const OdeRunConfig&) = default;
};

/// ModelParams after the convention scaling.
ModelParams model_params(const OdeRunConfig& config);
CompartmentState initial_state(const OdeRunConfig& config);
/// Population the initial magnitudes are measured against (1 in fractions).
double population(const OdeRunConfig& config);

struct SweepConfig {
  abm::AbmConfig base;
  abm::SweepAxis axis;
  int seeds = 1;

  friend bool operator==(const SweepConfig& a, const SweepConfig& b) {
    return a.base == b.base && a.axis.fields == b.axis.fields && a.axis.points == b.axis.points &&
           a.seeds == b.seeds;
  }
};

struct CompareConfig {
  abm::AbmConfig abm;
  int seeds = 32;
  double dt = ode::kDefaultDt;

  friend bool operator==(const CompareConfig&, const CompareConfig&) = default;
};

using RunConfig = std::variant<OdeRunConfig, abm::AbmConfig, SweepConfig, CompareConfig>;

/// Throws ValidationError naming the offending field.
void validate(const OdeRunConfig& config);
void validate(const SweepConfig& config);
void validate(const CompareConfig& config);

/// Parses one config object. `type` selects the schema (ode when absent);
/// unknown keys are rejected and defaults are filled in.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Reads a config file, or a manifest.json written by a previous run.
/// Throws ParseError with line/column for malformed JSON, ValidationError for
/// schema problems and IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
void save_config(const RunConfig& config, const std::filesystem::path& path);

/// Everything needed to regenerate a run's outputs.
struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Each writes its CSV plus manifest.json into `out_dir` (created if needed)
/// and returns the paths written, CSV first. Throws IoError naming the path.
std::vector<std::filesystem::path> write_results(const ode::Trajectory& traj, RunManifest manifest,
                                                 const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_results(const abm::AbmResult& result, RunManifest manifest,
                                                 const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_results(const abm::SweepTable& table, RunManifest manifest,
                                                 const std::filesystem::path& out_dir);

/// Writes `contents` to out_dir/name, creating out_dir. Throws IoError.
std::filesystem::path write_text(const std::filesystem::path& out_dir, const std::string& name,
                                 const std::string& contents);
std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

}  // namespace sirsurv::io
