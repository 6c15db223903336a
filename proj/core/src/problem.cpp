#include "growbatch/problem.hpp"

#include "eval_impl.hpp"

namespace growbatch {

double SumProblem::full_value(const VectorXd& x) const {
  check_dim(x);
  return detail::value_over(*this, x, m_, [](std::int64_t pos) { return pos; });
}

VectorXd SumProblem::full_gradient(const VectorXd& x) const {
  check_dim(x);
  return detail::gradient_over(*this, x, m_, [](std::int64_t pos) { return pos; });
}

}  // namespace growbatch
