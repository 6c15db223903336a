#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "growbatch/optimize.hpp"
#include "growbatch/problem.hpp"
#include "growbatch/sampling.hpp"
#include "growbatch/theory.hpp"

namespace growbatch {

/// Raised for malformed or invalid configuration; the message always carries
/// the offending [section].key path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key=value file with [section] headers.  '#' starts a comment, blank
/// lines are ignored, later sections with the same header stay separate
/// entries (method blocks repeat).
struct ConfigSection {
  std::string header;
  std::vector<std::pair<std::string, std::string>> entries;  // file order

  const std::string* find(const std::string& key) const;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;

  static ConfigFile parse(std::istream& in);
  static ConfigFile parse_file(const std::string& path);

  const ConfigSection* find(const std::string& header) const;
};

struct ProblemSpec {
  enum class Model { BinaryLogistic, Multinomial, LeastSquares, Quadratic };
  enum class Source { Synthetic, File };

  Model model = Model::BinaryLogistic;
  Source source = Source::Synthetic;
  double lambda = 0.0;

  // file source
  std::string path;
  std::int64_t declared_n = 0;

  // synthetic logistic / least-squares source
  std::int64_t m = 1000;
  std::int64_t features = 20;
  int classes = 3;
  double sparsity = 0.5;
  double separation = 4.0;
  std::uint64_t data_seed = 7;

  // quadratic model: linspace diagonal over [quad_min, quad_max], centers
  // from the axis displacement pattern
  int quad_dim = 10;
  std::int64_t quad_terms = 4;
  double quad_min = 0.5;
  double quad_max = 2.0;
  double quad_shift = 1.0;
};

struct MethodSpec {
  enum class Kind { ControlledErrorGd, StochasticGd, HybridQn, DeterministicQn, SampledGd };

  std::string label;  // section tag; also the trace file stem
  Kind kind = Kind::HybridQn;

  // hybrid-qn / sampled-gd
  Schedule schedule;
  SampleMode sample_mode = SampleMode::Uniform;

  // hybrid-qn / deterministic-qn
  int memory = 10;
  double eta = 1e-4;
  LineSearchKind line_search = LineSearchKind::Wolfe;
  double c1 = 1e-4;
  double c2 = 0.9;

  // stochastic-gd
  double step = 0.1;
  bool decay = false;

  // controlled-error-gd
  NoiseBoundSequence noise = NoiseBoundSequence::geometric(0.25, 0.8);
  NoiseMode noise_mode = NoiseMode::ExactNorm;

  // controlled-error-gd / sampled-gd
  std::int64_t iterations = 0;  // 0: derive from the pass budget
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  std::int64_t pass_budget = 10;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = ".";
  TruePolicy true_policy = TruePolicy::PassBoundary;

  /// Validates everything it reads; unknown keys, bad values and missing
  /// required keys raise ConfigError with the [section].key path.
  static ExperimentConfig load(const ConfigFile& file);
  static ExperimentConfig load_file(const std::string& path);
};

/// Instantiates the configured problem.  File-backed sources read and
/// validate the dataset here; logistic and least-squares models certify a
/// Lipschitz bound and record mu = lambda when lambda > 0.
std::unique_ptr<SumProblem> build_problem(const ProblemSpec& spec);

const char* to_string(ProblemSpec::Model model);
const char* to_string(MethodSpec::Kind kind);

}  // namespace growbatch
