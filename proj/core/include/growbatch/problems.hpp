#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "growbatch/problem.hpp"

namespace growbatch {

/// f_i(x) = 1/2 (x - m_i)' diag(d) (x - m_i) with a shared diagonal and
/// per-term centers.  Everything about the aggregate is available in closed
/// form, which makes this the reference instance for rate verification.
///
/// Zero entries in d are allowed (flat directions, used by the sublinear
/// tests); strong-convexity-dependent consumers must check mu > 0.
class SyntheticQuadratic : public SumProblem {
 public:
  SyntheticQuadratic(VectorXd d, Eigen::MatrixXd centers, double lambda = 0.0);

  /// Centers built from a shift pattern: term i displaces coordinate i mod n
  /// by +-shift[i mod n], the sign alternating each full cycle so centers
  /// average to zero when M is a multiple of 2n.
  static SyntheticQuadratic axis_pattern(VectorXd d, const VectorXd& shift, std::int64_t m,
                                         double lambda = 0.0);

  double term_value(std::int64_t i, const VectorXd& x) const override;
  void add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                         VectorXd& acc) const override;
  double term_value_and_gradient(std::int64_t i, const VectorXd& x, double weight,
                                 VectorXd& acc) const override;

  const VectorXd& diagonal() const { return d_; }
  const Eigen::MatrixXd& centers() const { return centers_; }

 private:
  void fill_constants();

  VectorXd d_;
  Eigen::MatrixXd centers_;  // M x n, row i is m_i
};

/// f_i(x) = 1/2 (a_i' x - b_i)^2 over sparse rows.
class LeastSquaresProblem : public SumProblem {
 public:
  LeastSquaresProblem(std::vector<SparseRow> rows, std::vector<double> targets, int n,
                      double lambda = 0.0);

  double term_value(std::int64_t i, const VectorXd& x) const override;
  void add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                         VectorXd& acc) const override;
  double term_value_and_gradient(std::int64_t i, const VectorXd& x, double weight,
                                 VectorXd& acc) const override;

 private:
  std::vector<SparseRow> rows_;
  std::vector<double> targets_;
};

/// f_i(x) = log(1 + exp(-b_i a_i' x)), b_i in {-1, +1}.
///
/// With ridge lambda > 0 the aggregate is lambda-strongly convex; constants()
/// carries mu = lambda as the conservative default.
class BinaryLogisticProblem : public SumProblem {
 public:
  BinaryLogisticProblem(std::vector<SparseRow> rows, std::vector<double> labels, int n,
                        double lambda = 0.0);

  double term_value(std::int64_t i, const VectorXd& x) const override;
  void add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                         VectorXd& acc) const override;
  double term_value_and_gradient(std::int64_t i, const VectorXd& x, double weight,
                                 VectorXd& acc) const override;

  const std::vector<SparseRow>& rows() const { return rows_; }
  const std::vector<double>& labels() const { return labels_; }

 private:
  std::vector<SparseRow> rows_;
  std::vector<double> labels_;
};

/// Softmax loss with one parameter block per class, flattened row-major:
/// block j occupies x[j*n .. (j+1)*n).  f_i = logsumexp_j(s_j) - s_{b_i}
/// where s_j = x_j' a_i.
class MultinomialLogisticProblem : public SumProblem {
 public:
  MultinomialLogisticProblem(std::vector<SparseRow> rows, std::vector<int> labels, int n,
                             int classes, double lambda = 0.0);

  double term_value(std::int64_t i, const VectorXd& x) const override;
  void add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                         VectorXd& acc) const override;
  double term_value_and_gradient(std::int64_t i, const VectorXd& x, double weight,
                                 VectorXd& acc) const override;

  int classes() const { return classes_; }
  int features() const { return features_; }

 private:
  void scores(std::int64_t i, const VectorXd& x, VectorXd& s) const;

  std::vector<SparseRow> rows_;
  std::vector<int> labels_;
  int classes_;
  int features_;  // n per class; dim() == classes_ * features_
};

/// Standalone term evaluators (value, dense gradient); the problem classes
/// use the same formulas through their accumulate interfaces.
std::pair<double, VectorXd> binary_logistic_term(const SparseRow& a, double b, const VectorXd& x);
std::pair<double, VectorXd> multinomial_logistic_term(const SparseRow& a, int label,
                                                      const VectorXd& x, int classes,
                                                      int features);

struct LipschitzEstimate {
  double bound = 0.0;     // 0.25 * sigma_max(A)^2 / M + lambda
  double sigma_sq = 0.0;  // sigma_max(A)^2 estimate
  int iterations = 0;
  bool converged = false;
};

/// Upper bound on the gradient Lipschitz constant of the averaged logistic
/// loss via power iteration on A'A.  Reported non-converged after the
/// iteration cap; the bound then still reflects the last Rayleigh quotient.
LipschitzEstimate lipschitz_bound_logistic(const std::vector<SparseRow>& rows, int n,
                                           double lambda, int max_iterations = 1000,
                                           double rel_tol = 1e-6);

/// Least-squares variant: sigma_max(A)^2 / M + lambda (no 1/4 curvature cap).
LipschitzEstimate lipschitz_bound_least_squares(const std::vector<SparseRow>& rows, int n,
                                                double lambda, int max_iterations = 1000,
                                                double rel_tol = 1e-6);

/// Softmax variant: 0.5 sigma_max(A)^2 / M + lambda, uniform over classes.
LipschitzEstimate lipschitz_bound_multinomial(const std::vector<SparseRow>& rows, int n,
                                              double lambda, int max_iterations = 1000,
                                              double rel_tol = 1e-6);

}  // namespace growbatch
