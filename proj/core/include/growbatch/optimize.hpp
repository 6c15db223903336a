#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include <Eigen/Core>

#include "growbatch/problem.hpp"
#include "growbatch/sampling.hpp"
#include "growbatch/theory.hpp"
#include "growbatch/trace.hpp"

namespace growbatch {

/// When the true (full) objective gets evaluated for the trace.  These
/// evaluations are instrumentation: they never enter cum_evals.
enum class TruePolicy {
  EveryIteration,
  PassBoundary,  // whenever eff_passes crosses an integer, plus first and last rows
  Never,
};

struct SampledValueGrad {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Mean over the sample plus the ridge term, same chunked reduction as the
/// full-set evaluators, so a sample holding every index reproduces
/// full_value / full_gradient bit for bit.
double sampled_value(const SumProblem& p, const SampleSet& s,
                     const Eigen::VectorXd& x);
Eigen::VectorXd sampled_gradient(const SumProblem& p, const SampleSet& s,
                                 const Eigen::VectorXd& x);
SampledValueGrad sampled_value_gradient(const SumProblem& p,
                                        const SampleSet& s,
                                        const Eigen::VectorXd& x);

struct RunResult {
  Trace trace;
  Eigen::VectorXd x;
  double f_final = std::numeric_limits<double>::quiet_NaN();  // true objective at x
};

/// Per-iteration callback payload for the controlled-error engine.  gap_*
/// fields are NaN when the problem has no known optimal value.
struct ControlledErrorStep {
  std::int64_t k = 0;
  double gap_before = 0.0;
  double gap_after = 0.0;
  double err_sq = 0.0;    // realized squared error norm
  double bound = 0.0;     // B_k used for the draw
  double grad_sq = 0.0;   // squared full-gradient norm at x_k
  double step_sq = 0.0;   // squared displacement of this iteration
  const Eigen::VectorXd* x_after = nullptr;  // iterate reached, valid during the callback only
};

struct ControlledErrorOptions {
  std::int64_t iterations = 500;
  NoiseBoundSequence noise = NoiseBoundSequence::geometric(1.0, 0.5);
  NoiseMode mode = NoiseMode::ExactNorm;
  std::uint64_t seed = 1;
  TruePolicy true_policy = TruePolicy::EveryIteration;
  std::function<void(const ControlledErrorStep&)> observer;
};

/// Steepest descent with step 1/L on the full gradient, perturbed by an
/// injected error that respects the configured bound sequence.  Requires
/// constants L (and mu plus f_star for strong-rate bound sequences).
RunResult run_controlled_error_gd(const SumProblem& p,
                                  const Eigen::VectorXd& x0,
                                  const ControlledErrorOptions& opt);

struct StochasticGdOptions {
  double step = 0.1;
  bool decay = false;  // alpha_t = step / (t + 1)
  std::int64_t pass_budget = 10;
  std::uint64_t seed = 1;
  TruePolicy true_policy = TruePolicy::PassBoundary;
};

/// One uniformly drawn term per update.  Trace rows appear only at pass
/// boundaries (batch_size reports 1, k the update index).
RunResult run_stochastic_gd(const SumProblem& p, const Eigen::VectorXd& x0,
                            const StochasticGdOptions& opt);

struct HybridStep {
  std::int64_t k = 0;
  std::int64_t batch = 0;
  double alpha = 0.0;
  double f_base = 0.0;  // sampled objective at x_k
  bool pair_accepted = false;
};

struct HybridQnOptions {
  Schedule schedule;
  SampleMode sample_mode = SampleMode::Uniform;
  int memory = 10;
  double eta = 1e-4;  // Armijo sufficient-decrease constant
  int max_backtracks = 50;
  std::int64_t pass_budget = 50;
  std::int64_t max_iterations = 0;  // 0: no cap
  std::uint64_t seed = 1;
  TruePolicy true_policy = TruePolicy::PassBoundary;
  std::function<void(const HybridStep&)> observer;
};

/// Growing-batch L-BFGS.  Per iteration: one combined evaluation at x_k,
/// the Armijo trials, then one gradient evaluation of the same sampled
/// objective at x_{k+1} for the curvature pair, all on batch |B_k|, so
/// cum_evals advances by (ls_evals + 1) * |B_k| exactly.
RunResult run_hybrid_qn(const SumProblem& p, const Eigen::VectorXd& x0,
                        const HybridQnOptions& opt);

enum class LineSearchKind { Wolfe, Armijo };

struct DeterministicQnOptions {
  int memory = 10;
  LineSearchKind line_search = LineSearchKind::Wolfe;
  double c1 = 1e-4;
  double c2 = 0.9;
  double eta = 1e-4;  // Armijo variant
  int max_backtracks = 50;
  std::int64_t pass_budget = 0;  // 0: no cap
  std::int64_t max_iterations = 200;
  double grad_tol = 0.0;  // stop when the full gradient norm drops below
  TruePolicy true_policy = TruePolicy::EveryIteration;
};

/// Full-batch L-BFGS reference.  The Armijo variant performs the same
/// evaluation pattern as the hybrid driver (fresh base evaluation, value-only
/// trials, curvature gradient at the accepted point), so with a full-set
/// sample the hybrid run reproduces its iterates exactly.
RunResult run_deterministic_qn(const SumProblem& p, const Eigen::VectorXd& x0,
                               const DeterministicQnOptions& opt);

struct SampledGdOptions {
  Schedule schedule;
  SampleMode sample_mode = SampleMode::Uniform;
  std::int64_t iterations = 100;
  std::int64_t pass_budget = 0;  // 0: no cap
  std::uint64_t seed = 1;
  TruePolicy true_policy = TruePolicy::PassBoundary;
};

/// Fixed 1/L step on the sampled gradient with a growing batch.  Requires
/// constant L.
RunResult run_sampled_gd(const SumProblem& p, const Eigen::VectorXd& x0,
                         const SampledGdOptions& opt);

}  // namespace growbatch
