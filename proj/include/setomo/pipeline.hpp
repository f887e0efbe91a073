#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setomo/io.hpp"
#include "setomo/jsa.hpp"
#include "setomo/reconstruction.hpp"
#include "setomo/signals.hpp"

namespace setomo {

inline constexpr int kSchemaVersion = 1;
const char* toolkit_version();

struct GridConfig {
  double center = 0.0;
  double span = 20.0;
  int n = 64;
};

struct JsaConfig {
  std::string type = "gaussian";  // gaussian | pump-phasematch | file
  double sigma_plus = 1.0;
  double sigma_minus = 3.0;
  double chirp = 0.0;
  double pump_sigma = 1.0;
  double pm_sigma = 3.0;
  std::string file;
};

struct SeedConfig {
  std::string type = "flat";  // flat | gaussian | point | file
  double amplitude = 1.0;
  double phase = 0.0;
  double center = 0.0;
  double sigma = 1.0;
  std::string file;
};

struct InterferometerConfig {
  double q_sigma = 0.0;
  double q_eta = 0.0;
  double theta = 0.0;
  // Record grids; when absent the grids dual to the mode grid are used.
  std::optional<GridConfig> grid_sigma;
  std::optional<GridConfig> grid_eta;
};

struct MeasurementConfig {
  std::string model = "lowgain";  // lowgain | exact
  std::string record_file;
};

struct NoiseConfig {
  std::vector<double> delta_sigma{0.0};
  std::vector<double> delta_eta{0.0};
  bool monte_carlo = false;
  int mc_samples = 1000;
};

struct GainSweepConfig {
  double gain_min = 1e-3;
  double gain_max = 1e-1;
  int points = 9;
};

struct OracleConfig {
  int trials = 100;
  int max_modes = 8;
  double max_gain = 2.0;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  GridConfig grid;
  JsaConfig jsa;
  CouplingParams coupling{0.01, 0.0, std::nullopt, std::nullopt};
  SeedConfig seed;
  InterferometerConfig interferometer;
  MeasurementConfig measurement;
  NoiseConfig noise;
  double reg_eps = kDefaultRegEps;
  double schmidt_tol = 1e-12;
  GainSweepConfig gain_sweep;
  OracleConfig oracle;
  std::uint64_t rng_seed = 0;
  std::string output_dir = "setomo-out";
  bool report_runtime = false;
  // Directory that relative input paths are resolved against.
  std::filesystem::path base_dir;
};

struct ConfigReport {
  ScenarioConfig config;
  std::vector<std::string> errors;
  bool ok() const noexcept { return errors.empty(); }
};

inline const std::vector<std::string> kScenarioNames{"jsa",         "schmidt",     "direct",    "interf",
                                                     "reconstruct", "noise-sweep", "gain-sweep", "oracle-check"};

// Parses and schema-checks a config document; every problem is collected.
ConfigReport parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ConfigReport load_config(const std::filesystem::path& path);
// Extra checks that only apply to one scenario (required fields, file existence).
std::vector<std::string> check_scenario(const ScenarioConfig& cfg, const std::string& scenario);

json config_to_json(const ScenarioConfig& cfg);
// FNV-1a 64 of the canonical effective config, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

ModeGrid make_mode_grid(const GridConfig& g);
JointAmplitude build_jsa(const ScenarioConfig& cfg);
SeedProfile build_seed(const ScenarioConfig& cfg, const ModeGrid& grid);

// Rendered output files, keyed by file name.
struct ScenarioOutput {
  std::map<std::string, std::string> files;
  json summary;
};

// Runs entirely in memory; nothing touches the disk.
ScenarioOutput run_scenario(const ScenarioConfig& cfg, const std::string& scenario);
// Writes every file of `out` under `dir` (created if needed).
void write_outputs(const ScenarioOutput& out, const std::filesystem::path& dir);

struct OracleTrial {
  int n = 0;
  double gain = 0.0;
  double rel_spectrum = 0.0;
  double rel_total = 0.0;
  double rel_interf = 0.0;
};

struct OracleCheckResult {
  std::vector<OracleTrial> trials;
  double max_rel = 0.0;
};

// Random kernels, seeds, gains and interferometer settings; exact mode-basis
// predictions against the Gaussian-state oracle.
OracleCheckResult run_oracle_check(int trials, int max_modes, double max_gain, std::uint64_t rng_seed);

struct GainSweepPoint {
  double gain = 0.0;
  double exact = 0.0;
  double lowgain = 0.0;
  double abs_error = 0.0;
};

struct GainSweepResult {
  std::vector<GainSweepPoint> points;
  double slope = 0.0;  // least-squares slope of log|error| against log gain
};

GainSweepResult run_gain_sweep(const JointAmplitude& jsa, const SeedProfile& seed,
                               const InterferometerSettings& settings, double gain_min, double gain_max, int points,
                               double schmidt_tol = kDefaultSchmidtTol);

}  // namespace setomo
