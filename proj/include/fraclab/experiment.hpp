#ifndef FRACLAB_EXPERIMENT_HPP
#define FRACLAB_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/io.hpp"

namespace fraclab {

// One experiment: scenario geometry + drift/forcing/initial data specs +
// analysis parameters. Serialized as a versioned, human-editable JSON tree;
// the canonical dump is hashed for the output layout.
struct ExperimentConfig {
  int schema_version = 1;
  std::string scenario = "custom";
  double s = 0.5;
  double period = 16.0 * M_PI;
  std::uint64_t n_points = 512;
  double dt = 1e-3;
  double t_start = -2.0;
  double t_end = 0.0;

  struct DriftCfg {
    std::string kind = "zero";  // zero | constant | rough_bounded | holder
    double sup_norm = 0.0;
    double value = 0.0;     // constant kind
    int modes = 24;         // rough kind
    int octaves = 14;       // holder kind
    std::uint64_t seed = 1;
  } drift;

  struct ForcingCfg {
    std::string kind = "zero";  // zero | constant | cosine
    double amplitude = 0.0;
    double frequency = 2.0;  // cosine kind: cycles per period
    double phase = 0.0;
  } forcing;

  struct InitCfg {
    std::string kind = "cosine";  // cosine | constant | rough | well
    double amplitude = 1.0;
    int modes = 16;
    std::uint64_t seed = 2;
  } u0;

  std::vector<double> eps_visc = {0.0};

  struct AnalysisCfg {
    double ratio = 0.0;  // 0 -> r = 1/(2R)
    int levels = 4;
    std::optional<double> anchor_x;  // absent -> anchor at the max-gradient point
    int pair_budget = 1500;
  } analysis;

  struct KitCfg {
    std::string source = "search";  // search | file
    std::string path;
    double mu = 1.0;
    double speed = 0.0;  // 0 -> derived from the drift
  } kit;

  bool gauge = true;

  void validate() const;
  json to_json() const;
  static ExperimentConfig from_json(const json& j);
};

std::uint64_t config_hash(const ExperimentConfig& cfg);

// per-run outcome; exit codes: 0 all-pass, 2 hypothesis violation,
// 3 verdict failure, 1 internal error
struct RunReport {
  ExperimentConfig config;
  std::uint64_t hash = 0;
  json body;
  int exit_code = 0;
};

struct RunOptions {
  std::filesystem::path out_root = "out";
  std::optional<std::uint64_t> seed_override;
  bool write_artifacts = true;
};

RunReport run(const ExperimentConfig& cfg, const RunOptions& opt);

struct BatterySummary {
  std::vector<RunReport> reports;
  std::vector<std::string> errors;  // per failed config, empty string if ok
  json aggregate;                   // one row per config
};

BatterySummary run_battery(const std::vector<ExperimentConfig>& configs, const RunOptions& opt,
                           int jobs = 1);

// stock scenario library
std::vector<std::string> scenario_ids();
ExperimentConfig stock_scenario(const std::string& id);

// kit cache helpers (used by the calibrate subcommand and by run)
std::filesystem::path kit_cache_path(const std::filesystem::path& out_root, double s, double speed,
                                     double mu);
BarrierKit obtain_kit(const ExperimentConfig& cfg, const RunOptions& opt, FractionalOrder order,
                      double speed);

extern const char* kToolVersion;

}  // namespace fraclab

#endif
