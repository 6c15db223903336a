#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace growbatch {

// Aggregate sums use a fixed-chunk pairwise tree so the result does not
// depend on how work is scheduled; repeated calls are bit-identical.
inline constexpr std::int64_t kReduceChunk = 256;

namespace detail {

template <class T>
T fold_pairwise(std::vector<T>& parts) {
  std::size_t m = parts.size();
  while (m > 1) {
    std::size_t h = 0;
    for (std::size_t i = 0; i + 1 < m; i += 2) parts[h++] = parts[i] + parts[i + 1];
    if (m % 2 == 1) parts[h++] = parts[m - 1];
    m = h;
  }
  return parts[0];
}

}  // namespace detail

/// Sum of term(i) for i in [0, count) in a fixed chunked tree order.
template <class F>
double deterministic_sum(std::int64_t count, F&& term) {
  if (count <= 0) return 0.0;
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>((count + kReduceChunk - 1) / kReduceChunk));
  for (std::int64_t lo = 0; lo < count; lo += kReduceChunk) {
    const std::int64_t hi = std::min(count, lo + kReduceChunk);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
    parts.push_back(acc);
  }
  return detail::fold_pairwise(parts);
}

/// Vector accumulation with the same chunk/tree structure.  accumulate(i, acc)
/// must add term i's contribution into acc.
template <class F>
Eigen::VectorXd deterministic_accumulate(std::int64_t count, int dim, F&& accumulate) {
  if (count <= 0) return Eigen::VectorXd::Zero(dim);
  std::vector<Eigen::VectorXd> parts;
  parts.reserve(static_cast<std::size_t>((count + kReduceChunk - 1) / kReduceChunk));
  for (std::int64_t lo = 0; lo < count; lo += kReduceChunk) {
    const std::int64_t hi = std::min(count, lo + kReduceChunk);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (std::int64_t i = lo; i < hi; ++i) accumulate(i, acc);
    parts.push_back(std::move(acc));
  }
  return detail::fold_pairwise(parts);
}

}  // namespace growbatch
