#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "growbatch/config.hpp"

namespace growbatch {

/// One finished run in a summary or ranking record.
struct RunRecord {
  std::string method;  // method label from the config
  std::uint64_t seed = 0;
  double step = std::numeric_limits<double>::quiet_NaN();  // sweep grid value
  std::string trace_file;                                  // name within out_dir
  std::int64_t rows = 0;
  std::int64_t cum_evals = 0;
  double eff_passes = 0.0;
  double f_final = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();  // NaN without a known f*
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::string summary_file;  // full path of the written summary / ranking CSV
};

/// Executes every (method, seed) pair in the config and writes one trace CSV
/// per run (<label>_s<seed>.csv) plus summary.csv under out_dir.  Byte
/// deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Step sizes {1e0, ..., 1e-6} swept by sweep_experiment.
extern const double kSweepGrid[7];

/// Runs the first stochastic-gd method of the config once per (grid step,
/// seed), writing <label>_step<step>_s<seed>.csv traces plus ranking.csv
/// ordered by mean final objective across seeds.  Throws ConfigError when the
/// config has no stochastic-gd method.  threads > 1 runs grid points
/// concurrently; outputs are identical either way.
ExperimentResult sweep_experiment(const ExperimentConfig& cfg, int threads = 1);

/// CLI entry point: growbatch <run|sweep|stats|verify-rates> with flags
/// --config, --out, --seed, --threads, --suite.  Returns 0 on success, 1 when
/// a verification suite reports a violation, 2 for usage, config or data
/// errors.
int run_cli(int argc, const char* const* argv);

}  // namespace growbatch
