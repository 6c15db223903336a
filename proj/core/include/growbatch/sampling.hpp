#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "growbatch/problem.hpp"

namespace growbatch {

/// Index set drawn for one iteration.  Indices are 0-based, sorted, unique.
struct SampleSet {
  std::vector<std::int64_t> indices;
  std::int64_t iteration = 0;
  std::uint64_t seed = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }
};

enum class SampleMode {
  Prefix,   // deterministic: {0, ..., b-1}
  Uniform,  // uniform without replacement
};

/// Reproducible draw: the stream is keyed by (seed, k), so batch k can be
/// regenerated without replaying earlier iterations.  Uniform mode is a
/// partial Fisher-Yates shuffle.
SampleSet draw_sample(std::int64_t m, std::int64_t b, SampleMode mode, std::uint64_t seed,
                      std::int64_t k);

// ---- batch-size laws ------------------------------------------------------

/// ceil(min(1.1 b + 1, M)), evaluated in exact integer arithmetic so the
/// decimal 1.1 never rounds the ceiling upward.
std::int64_t next_batch_size_paper(std::int64_t b, std::int64_t m);

/// Smallest b with (M - b)/M <= gamma^(k/2): b = ceil(M (1 - gamma^(k/2))),
/// clamped to [1, M].
std::int64_t batch_size_geometric_det(std::int64_t k, std::int64_t m, double gamma);

/// Smallest b in [1, M] with (M - b)/(M b) <= gamma^k.
std::int64_t batch_size_geometric_stoch(std::int64_t k, std::int64_t m, double gamma);

/// Minimal b whose worst-case residual bound respects the strong-rate noise
/// budget:  4 ((M-b)/M)^2 (beta1 + 2 beta2 L gap) <= L (mu/L - rho) gap.
/// Requires gap > 0, 0 < rho <= mu/L.
std::int64_t batch_size_strong_rate(std::int64_t m, double L, double mu, double rho, double beta1,
                                    double beta2, double gap);

struct StrongRateContext {
  double L = 0.0;
  double mu = 0.0;
  double gap = 0.0;  // current sub-optimality estimate
};

/// Batch-size schedule.  next_size() clamps into [1, M] and never shrinks,
/// so emitted sizes are nondecreasing along a run.
struct Schedule {
  enum class Kind { Constant, PaperLinear, GeometricDet, GeometricStoch, StrongRate, AddOne };

  Kind kind = Kind::PaperLinear;
  std::int64_t b0 = 1;   // Constant / PaperLinear / AddOne
  double gamma = 0.9;    // GeometricDet / GeometricStoch
  double rho = 0.0;      // StrongRate
  double beta1 = 0.0;    // StrongRate
  double beta2 = 1.0;    // StrongRate

  std::int64_t next_size(std::int64_t k, std::int64_t prev, std::int64_t m,
                         const StrongRateContext* ctx = nullptr) const;
};

// ---- residual and its bounds ------------------------------------------------

/// Gradient residual e = g_S(x) - grad f(x) of the unregularized averages
/// (the ridge term cancels).  Computed both from the definition and from the
/// sampled/unsampled split; the two routes must agree to 1e-10 relative or
/// this throws.
VectorXd sampled_gradient_residual(const SumProblem& p, const SampleSet& s, const VectorXd& x);

/// S(x) = 1/(M-1) sum_i ||grad f_i(x) - gbar(x)||^2 with gbar the plain
/// average of the term gradients.  Population variance behind the
/// without-replacement identity; requires M >= 2.
double sample_variance(const SumProblem& p, const VectorXd& x);

/// E ||e||^2 = ((M - b)/M) S / b for uniform sampling without replacement.
double expected_residual_sq(double variance, std::int64_t m, std::int64_t b);

/// Worst-case bound 4 ((M-b)/M)^2 (beta1 + 2 beta2 L gap), valid for every
/// subset of size b once (beta1, beta2) certify the term gradients.
double deterministic_residual_bound(std::int64_t m, std::int64_t b, double beta1, double beta2,
                                    double L, double gap);

struct ResidualBound {
  enum class Kind { Deterministic, StochasticVariance, StochasticBeta };
  Kind kind = Kind::Deterministic;
  double value = 0.0;
  // StochasticBeta with beta2 == 1 collapses to beta1-only and can report 0
  // for a nonzero gap; flagged rather than patched.
  bool degenerate = false;
};

/// Expectation bound ((M-b)/(M b)) (M/(M-1)) (beta1 + 2 (beta2 - 1) L gap).
ResidualBound stochastic_beta_bound(std::int64_t m, std::int64_t b, double beta1, double beta2,
                                    double L, double gap);

}  // namespace growbatch
