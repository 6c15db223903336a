#pragma once

// Shared evaluation kernels.  full_* and sampled_* walk terms in the same
// chunked order, so a sample that happens to be the full index set produces
// bit-identical results to the full evaluation.

#include <cstdint>
#include <utility>

#include "growbatch/problem.hpp"
#include "growbatch/reduce.hpp"

namespace growbatch::detail {

template <class IndexFn>
double value_over(const SumProblem& p, const VectorXd& x, std::int64_t count, IndexFn index) {
  const double sum =
      deterministic_sum(count, [&](std::int64_t pos) { return p.term_value(index(pos), x); });
  return sum / static_cast<double>(count) + 0.5 * p.lambda() * x.squaredNorm();
}

template <class IndexFn>
VectorXd gradient_over(const SumProblem& p, const VectorXd& x, std::int64_t count, IndexFn index) {
  VectorXd g = deterministic_accumulate(count, static_cast<int>(x.size()),
                                        [&](std::int64_t pos, VectorXd& acc) {
                                          p.add_term_gradient(index(pos), x, 1.0, acc);
                                        });
  g /= static_cast<double>(count);
  if (p.lambda() != 0.0) g += p.lambda() * x;
  return g;
}

template <class IndexFn>
std::pair<double, VectorXd> value_gradient_over(const SumProblem& p, const VectorXd& x,
                                                std::int64_t count, IndexFn index) {
  // Mirrors value_over/gradient_over chunking exactly; values and gradients
  // ride the same pass so linear models pay for one dot product per term.
  std::vector<double> vparts;
  std::vector<VectorXd> gparts;
  const int dim = static_cast<int>(x.size());
  for (std::int64_t lo = 0; lo < count; lo += kReduceChunk) {
    const std::int64_t hi = std::min(count, lo + kReduceChunk);
    double vacc = 0.0;
    VectorXd gacc = VectorXd::Zero(dim);
    for (std::int64_t i = lo; i < hi; ++i)
      vacc += p.term_value_and_gradient(index(i), x, 1.0, gacc);
    vparts.push_back(vacc);
    gparts.push_back(std::move(gacc));
  }
  double v = fold_pairwise(vparts) / static_cast<double>(count) +
             0.5 * p.lambda() * x.squaredNorm();
  VectorXd g = fold_pairwise(gparts);
  g /= static_cast<double>(count);
  if (p.lambda() != 0.0) g += p.lambda() * x;
  return {v, std::move(g)};
}

}  // namespace growbatch::detail
