#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace growbatch {

using Eigen::VectorXd;

/// One feature of a sparse example row.  Rows keep entries sorted by index.
struct Feature {
  std::int32_t index;
  double value;
};

using SparseRow = std::vector<Feature>;

inline double sparse_dot(const SparseRow& a, const VectorXd& x) {
  double s = 0.0;
  for (const Feature& f : a) s += f.value * x[f.index];
  return s;
}

/// acc += scale * a
inline void sparse_axpy(double scale, const SparseRow& a, VectorXd& acc) {
  for (const Feature& f : a) acc[f.index] += scale * f.value;
}

/// Known analytic facts about a problem instance.  Synthetic problems fill
/// everything they can in closed form; data-backed problems leave unknown
/// fields empty and may have estimates attached later (a reference solve for
/// f_star, a certified (beta1, beta2) pair, ...).
struct ProblemConstants {
  std::optional<double> mu;      // strong convexity modulus
  std::optional<double> L;       // gradient Lipschitz constant (upper bound)
  std::optional<double> f_star;  // optimal value
  std::optional<VectorXd> x_star;
  std::optional<double> beta1;   // ||grad f_i||^2 <= beta1 + beta2 ||grad f||^2
  std::optional<double> beta2;

  void validate() const {
    if (mu && *mu < 0) throw std::invalid_argument("ProblemConstants: mu < 0");
    if (mu && L && !(*mu <= *L)) throw std::invalid_argument("ProblemConstants: mu > L");
    if (L && !(*L > 0)) throw std::invalid_argument("ProblemConstants: L <= 0");
    if (beta1 && *beta1 < 0) throw std::invalid_argument("ProblemConstants: beta1 < 0");
    if (beta2 && *beta2 < 1) throw std::invalid_argument("ProblemConstants: beta2 < 1");
  }
};

/// Finite-sum objective
///
///   f(x) = (1/M) sum_i f_i(x) + (lambda/2) ||x||^2
///
/// Terms are unregularized; the ridge term enters once at the aggregate
/// level, and sampled approximations add it after averaging so the
/// regularizer never contributes to the gradient residual.
///
/// Per-term evaluation is pure (const, no caches), so terms may be evaluated
/// concurrently; aggregation goes through deterministic_* reductions with a
/// fixed order regardless of scheduling.
class SumProblem {
 public:
  virtual ~SumProblem() = default;

  std::int64_t term_count() const { return m_; }
  int dim() const { return n_; }
  double lambda() const { return lambda_; }

  virtual double term_value(std::int64_t i, const VectorXd& x) const = 0;

  /// acc += weight * grad f_i(x)
  virtual void add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                                 VectorXd& acc) const = 0;

  /// Returns f_i(x) and accumulates weight * grad f_i(x).  Overridden where
  /// value and gradient share work (one dot product for the linear models).
  virtual double term_value_and_gradient(std::int64_t i, const VectorXd& x, double weight,
                                         VectorXd& acc) const {
    add_term_gradient(i, x, weight, acc);
    return term_value(i, x);
  }

  /// Dense per-term gradient; convenience for tests and diagnostics.
  VectorXd term_gradient(std::int64_t i, const VectorXd& x) const {
    VectorXd g = VectorXd::Zero(n_);
    add_term_gradient(i, x, 1.0, g);
    return g;
  }

  double full_value(const VectorXd& x) const;
  VectorXd full_gradient(const VectorXd& x) const;

  const ProblemConstants& constants() const { return constants_; }
  ProblemConstants& constants() { return constants_; }

  void check_dim(const VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("SumProblem: dimension mismatch");
  }

 protected:
  SumProblem(std::int64_t m, int n, double lambda) : m_(m), n_(n), lambda_(lambda) {
    if (m <= 0) throw std::invalid_argument("SumProblem: need at least one term");
    if (n <= 0) throw std::invalid_argument("SumProblem: dimension must be positive");
    if (lambda < 0) throw std::invalid_argument("SumProblem: lambda < 0");
  }

  std::int64_t m_;
  int n_;
  double lambda_;
  ProblemConstants constants_;
};

}  // namespace growbatch
