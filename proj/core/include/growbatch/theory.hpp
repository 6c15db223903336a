#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "growbatch/problem.hpp"

namespace growbatch {

// ---- per-iteration bounds ---------------------------------------------------

/// One-step guarantee for x+ = x - (1/L)(grad f(x) + e):
///   gap(x+) <= (1 - mu/L) gap(x) + ||e||^2 / (2L).
double lemma_bound(double gap, double err_sq, double mu, double L);

/// Noise budget that preserves a (1 - rho) contraction:  B = 2 L (mu/L - rho) pi
/// with 0 <= pi <= gap.  Requires 0 < rho <= mu/L.
double strong_rate_noise_bound(double pi, double mu, double L, double rho);

/// Computable stand-ins for pi (both are certified lower bounds on the gap;
/// the step form additionally assumes the iterate distance to the optimum is
/// non-increasing).
double pi_gradient_heuristic(double grad_norm, double mu, double L);
double pi_step_heuristic(double step_norm, double mu);

// ---- noise bound sequences ---------------------------------------------------

/// Schedule of bounds B_k on ||e_k||^2 (or its expectation).
///
///   Geometric   B_k = B0 gamma^k        (gamma in (0, 1])
///   Polynomial  B_k = B0 / (k+1)^power
///   Summable    B_k = B0 / (k+1)^(2 power); power > 1 makes sum_k ||e_k||
///               finite since ||e_k|| = sqrt(B0) / (k+1)^power
///   StrongRate  B_k from strong_rate_noise_bound; evaluated by the driver,
///               which owns the pi source
struct NoiseBoundSequence {
  enum class Kind { Geometric, Polynomial, Summable, StrongRate };
  enum class PiSource { OracleGap, GradientHeuristic, StepHeuristic };

  Kind kind = Kind::Geometric;
  double b0 = 1.0;
  double gamma = 0.5;
  double power = 2.0;
  double rho = 0.0;
  PiSource pi_source = PiSource::OracleGap;

  /// B_k for the closed-form kinds; StrongRate has no standalone value.
  double value(std::int64_t k) const;

  static NoiseBoundSequence geometric(double b0, double gamma);
  static NoiseBoundSequence polynomial(double b0, double power);
  static NoiseBoundSequence summable(double b0, double power);
  static NoiseBoundSequence strong_rate(double rho, PiSource source = PiSource::OracleGap);
};

enum class NoiseMode {
  ExactNorm,    // ||e||^2 == target exactly, direction uniform on the sphere
  Expectation,  // ||e||^2 ~ U[0, 2 target], so E||e||^2 == target
  Biased,       // fixed direction (normalized all-ones), exact norm
};

/// Error vector for iteration k; reproducible from (seed, k) alone.
VectorXd inject_noise(double target_b, int dim, std::uint64_t seed, std::int64_t k,
                      NoiseMode mode);

// ---- certification and empirical rates ---------------------------------------

struct BetaCertificate {
  double beta1 = 0.0;
  double beta2 = 1.0;
  double median_grad_sq = 0.0;  // median ||grad f||^2 over the probes
};

/// Smallest beta1 over a fixed grid of beta2 >= 1 such that
/// ||grad f_i(x)||^2 <= beta1 + beta2 ||grad f(x)||^2 at every probe and term.
/// Per-term gradients include the ridge contribution so the certificate
/// applies to the aggregate actually optimized.  Reports the pair minimizing
/// beta1 + beta2 * median(||grad f||^2).
BetaCertificate certify_beta(const SumProblem& p, const std::vector<VectorXd>& probes);

struct RateEstimate {
  double sigma = 1.0;      // fitted per-iteration contraction factor
  double residual = 0.0;   // RMS residual of the log-linear fit
  std::int64_t points = 0;
};

/// Least-squares slope of log(gap_k) vs k over [begin, end); errors on
/// non-positive gaps inside the window or a window with fewer than 2 points.
RateEstimate fit_linear_rate(const std::vector<double>& gaps, std::size_t begin, std::size_t end);

/// Default fit window: the last half of the run, dropping trailing values at
/// or below the relative noise floor 1e2 * eps * gap_0.
std::pair<std::size_t, std::size_t> default_rate_window(const std::vector<double>& gaps);

/// sup over k of k * gap_k, gaps indexed from k = 1.  A stabilized value
/// certifies the O(1/k) rate of the averaged iterates.
double check_sublinear(const std::vector<double>& avg_gaps);

}  // namespace growbatch
