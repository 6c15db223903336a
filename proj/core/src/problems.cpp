#include "growbatch/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "growbatch/reduce.hpp"
#include "growbatch/rng.hpp"

namespace growbatch {

namespace {

// log(1 + e^u) without overflow on either tail
double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

// sigma(-u) = 1 / (1 + e^u)
double sigmoid_neg(double u) {
  if (u > 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

void require_binary_label(double b) {
  if (b != 1.0 && b != -1.0)
    throw std::invalid_argument("binary logistic labels must be +1 or -1");
}

}  // namespace

// ---- SyntheticQuadratic ---------------------------------------------------

SyntheticQuadratic::SyntheticQuadratic(VectorXd d, Eigen::MatrixXd centers, double lambda)
    : SumProblem(centers.rows(), static_cast<int>(d.size()), lambda),
      d_(std::move(d)),
      centers_(std::move(centers)) {
  if (centers_.cols() != d_.size())
    throw std::invalid_argument("SyntheticQuadratic: centers/diagonal dimension mismatch");
  double dmax = 0.0;
  for (int j = 0; j < d_.size(); ++j) {
    if (d_[j] < 0) throw std::invalid_argument("SyntheticQuadratic: negative curvature");
    dmax = std::max(dmax, d_[j]);
  }
  if (dmax + lambda <= 0)
    throw std::invalid_argument("SyntheticQuadratic: zero objective");
  fill_constants();
}

SyntheticQuadratic SyntheticQuadratic::axis_pattern(VectorXd d, const VectorXd& shift,
                                                    std::int64_t m, double lambda) {
  const int n = static_cast<int>(d.size());
  if (shift.size() != n)
    throw std::invalid_argument("SyntheticQuadratic: shift dimension mismatch");
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(m, n);
  for (std::int64_t i = 0; i < m; ++i) {
    const int j = static_cast<int>(i % n);
    const double sign = ((i / n) % 2 == 0) ? 1.0 : -1.0;
    centers(i, j) = sign * shift[j];
  }
  return SyntheticQuadratic(std::move(d), std::move(centers), lambda);
}

void SyntheticQuadratic::fill_constants() {
  const int n = n_;
  VectorXd mean = centers_.colwise().mean();
  VectorXd xstar(n);
  for (int j = 0; j < n; ++j) {
    const double denom = d_[j] + lambda_;
    xstar[j] = denom > 0 ? d_[j] * mean[j] / denom : 0.0;
  }
  // spread of the centers around their mean, in the metric of diag(d)
  const double v = deterministic_sum(m_, [&](std::int64_t i) {
                     double s = 0.0;
                     for (int j = 0; j < n; ++j) {
                       const double t = centers_(i, j) - mean[j];
                       s += d_[j] * t * t;
                     }
                     return s;
                   }) /
                   (2.0 * static_cast<double>(m_));
  double fstar = v + 0.5 * lambda_ * xstar.squaredNorm();
  for (int j = 0; j < n; ++j) {
    const double t = xstar[j] - mean[j];
    fstar += 0.5 * d_[j] * t * t;
  }
  constants_.mu = d_.minCoeff() + lambda_;
  constants_.L = d_.maxCoeff() + lambda_;
  constants_.x_star = xstar;
  constants_.f_star = fstar;
  constants_.validate();
}

double SyntheticQuadratic::term_value(std::int64_t i, const VectorXd& x) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double t = x[j] - centers_(i, j);
    s += d_[j] * t * t;
  }
  return 0.5 * s;
}

void SyntheticQuadratic::add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                                           VectorXd& acc) const {
  for (int j = 0; j < n_; ++j) acc[j] += weight * d_[j] * (x[j] - centers_(i, j));
}

double SyntheticQuadratic::term_value_and_gradient(std::int64_t i, const VectorXd& x,
                                                   double weight, VectorXd& acc) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double t = x[j] - centers_(i, j);
    s += d_[j] * t * t;
    acc[j] += weight * d_[j] * t;
  }
  return 0.5 * s;
}

// ---- LeastSquaresProblem --------------------------------------------------

LeastSquaresProblem::LeastSquaresProblem(std::vector<SparseRow> rows, std::vector<double> targets,
                                         int n, double lambda)
    : SumProblem(static_cast<std::int64_t>(rows.size()), n, lambda),
      rows_(std::move(rows)),
      targets_(std::move(targets)) {
  if (rows_.size() != targets_.size())
    throw std::invalid_argument("LeastSquaresProblem: rows/targets size mismatch");
}

double LeastSquaresProblem::term_value(std::int64_t i, const VectorXd& x) const {
  const double r = sparse_dot(rows_[i], x) - targets_[i];
  return 0.5 * r * r;
}

void LeastSquaresProblem::add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                                            VectorXd& acc) const {
  const double r = sparse_dot(rows_[i], x) - targets_[i];
  sparse_axpy(weight * r, rows_[i], acc);
}

double LeastSquaresProblem::term_value_and_gradient(std::int64_t i, const VectorXd& x,
                                                    double weight, VectorXd& acc) const {
  const double r = sparse_dot(rows_[i], x) - targets_[i];
  sparse_axpy(weight * r, rows_[i], acc);
  return 0.5 * r * r;
}

// ---- BinaryLogisticProblem --------------------------------------------------

BinaryLogisticProblem::BinaryLogisticProblem(std::vector<SparseRow> rows,
                                             std::vector<double> labels, int n, double lambda)
    : SumProblem(static_cast<std::int64_t>(rows.size()), n, lambda),
      rows_(std::move(rows)),
      labels_(std::move(labels)) {
  if (rows_.size() != labels_.size())
    throw std::invalid_argument("BinaryLogisticProblem: rows/labels size mismatch");
  for (double b : labels_) require_binary_label(b);
  // mu = lambda is the conservative default; the data term only adds curvature.
  if (lambda > 0) constants_.mu = lambda;
}

double BinaryLogisticProblem::term_value(std::int64_t i, const VectorXd& x) const {
  const double t = labels_[i] * sparse_dot(rows_[i], x);
  return softplus(-t);
}

void BinaryLogisticProblem::add_term_gradient(std::int64_t i, const VectorXd& x, double weight,
                                              VectorXd& acc) const {
  const double b = labels_[i];
  const double t = b * sparse_dot(rows_[i], x);
  sparse_axpy(-weight * b * sigmoid_neg(t), rows_[i], acc);
}

double BinaryLogisticProblem::term_value_and_gradient(std::int64_t i, const VectorXd& x,
                                                      double weight, VectorXd& acc) const {
  const double b = labels_[i];
  const double t = b * sparse_dot(rows_[i], x);
  sparse_axpy(-weight * b * sigmoid_neg(t), rows_[i], acc);
  return softplus(-t);
}

// ---- MultinomialLogisticProblem ---------------------------------------------

MultinomialLogisticProblem::MultinomialLogisticProblem(std::vector<SparseRow> rows,
                                                       std::vector<int> labels, int n, int classes,
                                                       double lambda)
    : SumProblem(static_cast<std::int64_t>(rows.size()), classes * n, lambda),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      classes_(classes),
      features_(n) {
  if (classes < 2) throw std::invalid_argument("MultinomialLogisticProblem: need >= 2 classes");
  if (rows_.size() != labels_.size())
    throw std::invalid_argument("MultinomialLogisticProblem: rows/labels size mismatch");
  for (int c : labels_)
    if (c < 0 || c >= classes)
      throw std::invalid_argument("MultinomialLogisticProblem: label out of range");
  if (lambda > 0) constants_.mu = lambda;
}

void MultinomialLogisticProblem::scores(std::int64_t i, const VectorXd& x, VectorXd& s) const {
  for (int c = 0; c < classes_; ++c) {
    double dot = 0.0;
    const std::int64_t base = static_cast<std::int64_t>(c) * features_;
    for (const Feature& f : rows_[i]) dot += f.value * x[base + f.index];
    s[c] = dot;
  }
}

double MultinomialLogisticProblem::term_value(std::int64_t i, const VectorXd& x) const {
  VectorXd s(classes_);
  scores(i, x, s);
  const double shift = s.maxCoeff();
  double z = 0.0;
  for (int c = 0; c < classes_; ++c) z += std::exp(s[c] - shift);
  return shift + std::log(z) - s[labels_[i]];
}

void MultinomialLogisticProblem::add_term_gradient(std::int64_t i, const VectorXd& x,
                                                   double weight, VectorXd& acc) const {
  VectorXd s(classes_);
  scores(i, x, s);
  const double shift = s.maxCoeff();
  double z = 0.0;
  for (int c = 0; c < classes_; ++c) z += std::exp(s[c] - shift);
  for (int c = 0; c < classes_; ++c) {
    const double p = std::exp(s[c] - shift) / z;
    const double coef = weight * (p - (c == labels_[i] ? 1.0 : 0.0));
    const std::int64_t base = static_cast<std::int64_t>(c) * features_;
    for (const Feature& f : rows_[i]) acc[base + f.index] += coef * f.value;
  }
}

double MultinomialLogisticProblem::term_value_and_gradient(std::int64_t i, const VectorXd& x,
                                                           double weight, VectorXd& acc) const {
  VectorXd s(classes_);
  scores(i, x, s);
  const double shift = s.maxCoeff();
  double z = 0.0;
  for (int c = 0; c < classes_; ++c) z += std::exp(s[c] - shift);
  for (int c = 0; c < classes_; ++c) {
    const double p = std::exp(s[c] - shift) / z;
    const double coef = weight * (p - (c == labels_[i] ? 1.0 : 0.0));
    const std::int64_t base = static_cast<std::int64_t>(c) * features_;
    for (const Feature& f : rows_[i]) acc[base + f.index] += coef * f.value;
  }
  return shift + std::log(z) - s[labels_[i]];
}

// ---- standalone term evaluators ---------------------------------------------

std::pair<double, VectorXd> binary_logistic_term(const SparseRow& a, double b,
                                                 const VectorXd& x) {
  require_binary_label(b);
  const double t = b * sparse_dot(a, x);
  VectorXd g = VectorXd::Zero(x.size());
  sparse_axpy(-b * sigmoid_neg(t), a, g);
  return {softplus(-t), std::move(g)};
}

std::pair<double, VectorXd> multinomial_logistic_term(const SparseRow& a, int label,
                                                      const VectorXd& x, int classes,
                                                      int features) {
  if (x.size() != static_cast<std::int64_t>(classes) * features)
    throw std::invalid_argument("multinomial_logistic_term: parameter size mismatch");
  if (label < 0 || label >= classes)
    throw std::invalid_argument("multinomial_logistic_term: label out of range");
  VectorXd s(classes);
  for (int c = 0; c < classes; ++c) {
    double dot = 0.0;
    const std::int64_t base = static_cast<std::int64_t>(c) * features;
    for (const Feature& f : a) dot += f.value * x[base + f.index];
    s[c] = dot;
  }
  const double shift = s.maxCoeff();
  double z = 0.0;
  for (int c = 0; c < classes; ++c) z += std::exp(s[c] - shift);
  VectorXd g = VectorXd::Zero(x.size());
  for (int c = 0; c < classes; ++c) {
    const double p = std::exp(s[c] - shift) / z;
    const double coef = p - (c == label ? 1.0 : 0.0);
    const std::int64_t base = static_cast<std::int64_t>(c) * features;
    for (const Feature& f : a) g[base + f.index] += coef * f.value;
  }
  return {shift + std::log(z) - s[label], std::move(g)};
}

// ---- Lipschitz bound --------------------------------------------------------

LipschitzEstimate lipschitz_bound_logistic(const std::vector<SparseRow>& rows, int n,
                                           double lambda, int max_iterations, double rel_tol) {
  const std::int64_t m = static_cast<std::int64_t>(rows.size());
  LipschitzEstimate est;
  if (m == 0 || n == 0) {
    est.bound = lambda;
    est.converged = true;
    return est;
  }
  CounterRng rng(0x9b1f5eedULL);
  VectorXd v = rng.unit_vector(n);
  VectorXd av(m), w(n);
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::int64_t i = 0; i < m; ++i) av[i] = sparse_dot(rows[i], v);
    est.sigma_sq = av.squaredNorm();  // Rayleigh quotient, v is unit
    est.iterations = it;
    if (est.sigma_sq == 0.0) {  // v orthogonal to the row space; bail out as zero
      est.converged = true;
      break;
    }
    w.setZero();
    for (std::int64_t i = 0; i < m; ++i) sparse_axpy(av[i], rows[i], w);
    if (it > 1 && std::abs(est.sigma_sq - prev) <= rel_tol * est.sigma_sq) {
      est.converged = true;
      break;
    }
    prev = est.sigma_sq;
    v = w / w.norm();
  }
  est.bound = 0.25 * est.sigma_sq / static_cast<double>(m) + lambda;
  return est;
}

LipschitzEstimate lipschitz_bound_least_squares(const std::vector<SparseRow>& rows, int n,
                                                double lambda, int max_iterations,
                                                double rel_tol) {
  // Same spectral quantity; the per-term Hessian is a_i a_i' outright, so the
  // curvature cap 1/4 of the logistic loss does not apply.
  LipschitzEstimate est = lipschitz_bound_logistic(rows, n, lambda, max_iterations, rel_tol);
  if (!rows.empty() && n != 0)
    est.bound = est.sigma_sq / static_cast<double>(rows.size()) + lambda;
  return est;
}

LipschitzEstimate lipschitz_bound_multinomial(const std::vector<SparseRow>& rows, int n,
                                              double lambda, int max_iterations, double rel_tol) {
  // Softmax Hessian diag(p) - p p' has eigenvalues at most 1/2.
  LipschitzEstimate est = lipschitz_bound_logistic(rows, n, lambda, max_iterations, rel_tol);
  if (!rows.empty() && n != 0)
    est.bound = 0.5 * est.sigma_sq / static_cast<double>(rows.size()) + lambda;
  return est;
}

}  // namespace growbatch
