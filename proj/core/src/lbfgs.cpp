#include "growbatch/lbfgs.hpp"

#include <stdexcept>
#include <vector>

namespace growbatch {

double shanno_phua_scale(const VectorXd& s, const VectorXd& y) {
  const double sy = s.dot(y);
  const double yy = y.squaredNorm();
  if (!(sy > 0)) throw std::invalid_argument("shanno_phua_scale: s'y must be positive");
  if (yy == 0) throw std::invalid_argument("shanno_phua_scale: y is zero");
  return sy / yy;
}

LbfgsMemory::LbfgsMemory(int capacity, Scaling scaling) : capacity_(capacity), scaling_(scaling) {
  if (capacity < 1) throw std::invalid_argument("LbfgsMemory: capacity must be positive");
}

bool LbfgsMemory::push(const VectorXd& s, const VectorXd& y) {
  const double sy = s.dot(y);
  if (!(sy > 1e-10 * s.norm() * y.norm())) return false;
  if (static_cast<int>(pairs_.size()) == capacity_) pairs_.pop_front();
  pairs_.push_back(Pair{s, y, 1.0 / sy});
  return true;
}

double LbfgsMemory::scale() const {
  if (pairs_.empty() || scaling_ == Scaling::Identity) return 1.0;
  const Pair& last = pairs_.back();
  return shanno_phua_scale(last.s, last.y);
}

VectorXd LbfgsMemory::direction(const VectorXd& g) const {
  if (pairs_.empty()) return -g;
  const int count = static_cast<int>(pairs_.size());
  std::vector<double> alpha(count);
  VectorXd q = g;
  for (int i = count - 1; i >= 0; --i) {
    const Pair& p = pairs_[i];
    alpha[i] = p.rho * p.s.dot(q);
    q -= alpha[i] * p.y;
  }
  VectorXd r = scale() * q;
  for (int i = 0; i < count; ++i) {
    const Pair& p = pairs_[i];
    const double beta = p.rho * p.y.dot(r);
    r += (alpha[i] - beta) * p.s;
  }
  return -r;
}

}  // namespace growbatch
