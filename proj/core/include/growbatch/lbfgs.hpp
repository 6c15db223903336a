#pragma once

#include <deque>

#include <Eigen/Core>

#include "growbatch/problem.hpp"

namespace growbatch {

/// Initial inverse-Hessian multiplier gamma = (y's)/(y'y) from the most
/// recent pair.  Errors on y's <= 0 (such a pair must be skipped, not scaled).
double shanno_phua_scale(const VectorXd& s, const VectorXd& y);

/// Limited-memory BFGS pair store with the standard two-loop recursion.
///
/// Pairs with s'y <= 1e-10 ||s|| ||y|| are rejected, which keeps every stored
/// pair positively curved and the implied inverse Hessian positive definite;
/// direction(g) is then always a descent direction for g != 0.
class LbfgsMemory {
 public:
  enum class Scaling { ShannoPhua, Identity };

  explicit LbfgsMemory(int capacity = 10, Scaling scaling = Scaling::ShannoPhua);

  /// Stores (s, y) unless the curvature test rejects it; evicts the oldest
  /// pair beyond capacity.  Returns whether the pair was accepted.
  bool push(const VectorXd& s, const VectorXd& y);

  /// -H g via the two-loop recursion; -g when no pairs are stored.
  VectorXd direction(const VectorXd& g) const;

  /// Current H0 multiplier (1 when empty or in Identity mode).
  double scale() const;

  int size() const { return static_cast<int>(pairs_.size()); }
  int capacity() const { return capacity_; }
  void clear() { pairs_.clear(); }

 private:
  struct Pair {
    VectorXd s, y;
    double rho;  // 1 / s'y
  };

  std::deque<Pair> pairs_;  // oldest first
  int capacity_;
  Scaling scaling_;
};

}  // namespace growbatch
