#include "growbatch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "growbatch/reduce.hpp"
#include "growbatch/rng.hpp"

namespace growbatch {

namespace {

void check_batch(std::int64_t m, std::int64_t b) {
  if (m < 1) throw std::invalid_argument("sampling: M must be positive");
  if (b < 1 || b > m) throw std::invalid_argument("sampling: batch size outside [1, M]");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("sampling: gamma must lie in (0, 1)");
}

}  // namespace

SampleSet draw_sample(std::int64_t m, std::int64_t b, SampleMode mode, std::uint64_t seed,
                      std::int64_t k) {
  check_batch(m, b);
  SampleSet s;
  s.iteration = k;
  s.seed = seed;
  s.indices.resize(b);
  if (mode == SampleMode::Prefix || b == m) {
    std::iota(s.indices.begin(), s.indices.end(), 0);
    return s;
  }
  CounterRng rng(seed, static_cast<std::uint64_t>(k));
  std::vector<std::int64_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::int64_t i = 0; i < b; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.below(m - i));
    std::swap(perm[i], perm[j]);
  }
  std::copy(perm.begin(), perm.begin() + b, s.indices.begin());
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

std::int64_t next_batch_size_paper(std::int64_t b, std::int64_t m) {
  check_batch(m, b);
  // 1.1 b + 1 = (11 b + 10)/10; ceil(p/10) = (p + 9)/10 for positive p
  if (11 * b + 10 >= 10 * m) return m;
  return (11 * b + 19) / 10;
}

std::int64_t batch_size_geometric_det(std::int64_t k, std::int64_t m, double gamma) {
  check_gamma(gamma);
  if (m < 1) throw std::invalid_argument("sampling: M must be positive");
  if (k < 0) throw std::invalid_argument("sampling: negative iteration");
  const double t = std::pow(gamma, 0.5 * static_cast<double>(k));
  const double raw = std::ceil(static_cast<double>(m) * (1.0 - t));
  const std::int64_t b = raw <= 0 ? 0 : static_cast<std::int64_t>(raw);
  return std::clamp<std::int64_t>(b, 1, m);
}

std::int64_t batch_size_geometric_stoch(std::int64_t k, std::int64_t m, double gamma) {
  check_gamma(gamma);
  if (m < 1) throw std::invalid_argument("sampling: M must be positive");
  if (k < 0) throw std::invalid_argument("sampling: negative iteration");
  const double t = std::pow(gamma, static_cast<double>(k));
  const double md = static_cast<double>(m);
  auto ok = [&](std::int64_t b) {
    return static_cast<double>(m - b) <= t * md * static_cast<double>(b);
  };
  std::int64_t lo = 1, hi = m;
  if (ok(lo)) return lo;
  while (hi - lo > 1) {  // invariant: !ok(lo), ok(hi)
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::int64_t batch_size_strong_rate(std::int64_t m, double L, double mu, double rho, double beta1,
                                    double beta2, double gap) {
  if (m < 1) throw std::invalid_argument("sampling: M must be positive");
  if (!(L > 0) || !(mu > 0) || mu > L)
    throw std::invalid_argument("batch_size_strong_rate: need 0 < mu <= L");
  if (!(rho > 0) || rho > mu / L)
    throw std::invalid_argument("batch_size_strong_rate: need 0 < rho <= mu/L");
  if (beta1 < 0 || beta2 < 1)
    throw std::invalid_argument("batch_size_strong_rate: need beta1 >= 0, beta2 >= 1");
  if (!(gap > 0)) throw std::invalid_argument("batch_size_strong_rate: gap must be positive");
  const double budget = (mu - rho * L) * gap;
  const double scale = beta1 + 2.0 * beta2 * L * gap;
  const double md = static_cast<double>(m);
  auto ok = [&](std::int64_t b) {
    const double frac = static_cast<double>(m - b) / md;
    return 4.0 * frac * frac * scale <= budget;
  };
  std::int64_t lo = 1, hi = m;
  if (ok(lo)) return lo;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::int64_t Schedule::next_size(std::int64_t k, std::int64_t prev, std::int64_t m,
                                 const StrongRateContext* ctx) const {
  std::int64_t b = 1;
  switch (kind) {
    case Kind::Constant:
      b = std::clamp<std::int64_t>(b0, 1, m);
      break;
    case Kind::PaperLinear:
      b = k == 0 ? std::clamp<std::int64_t>(b0, 1, m) : next_batch_size_paper(prev, m);
      break;
    case Kind::GeometricDet:
      b = batch_size_geometric_det(k, m, gamma);
      break;
    case Kind::GeometricStoch:
      b = batch_size_geometric_stoch(k, m, gamma);
      break;
    case Kind::AddOne:
      b = k == 0 ? std::clamp<std::int64_t>(b0, 1, m) : std::min<std::int64_t>(prev + 1, m);
      break;
    case Kind::StrongRate: {
      if (ctx == nullptr)
        throw std::invalid_argument("Schedule: strong-rate sizing needs a context");
      // a non-positive gap estimate demands an exact gradient
      b = ctx->gap > 0
              ? batch_size_strong_rate(m, ctx->L, ctx->mu, rho, beta1, beta2, ctx->gap)
              : m;
      break;
    }
  }
  if (k > 0) b = std::max(b, prev);
  return b;
}

VectorXd sampled_gradient_residual(const SumProblem& p, const SampleSet& s, const VectorXd& x) {
  p.check_dim(x);
  const std::int64_t m = p.term_count();
  const std::int64_t b = s.size();
  check_batch(m, b);
  const int n = p.dim();

  VectorXd sum_in = deterministic_accumulate(b, n, [&](std::int64_t pos, VectorXd& acc) {
    p.add_term_gradient(s.indices[pos], x, 1.0, acc);
  });
  VectorXd sum_all = deterministic_accumulate(
      m, n, [&](std::int64_t i, VectorXd& acc) { p.add_term_gradient(i, x, 1.0, acc); });

  // definition route: subset mean minus full mean
  VectorXd e = sum_in / static_cast<double>(b) - sum_all / static_cast<double>(m);

  // split route: reweighted sampled part minus unsampled part, accumulated
  // independently over the complement
  std::vector<std::int64_t> comp;
  comp.reserve(m - b);
  std::size_t at = 0;
  for (std::int64_t i = 0; i < m; ++i) {
    if (at < s.indices.size() && s.indices[at] == i) {
      ++at;
      continue;
    }
    comp.push_back(i);
  }
  VectorXd sum_out =
      deterministic_accumulate(static_cast<std::int64_t>(comp.size()), n,
                               [&](std::int64_t pos, VectorXd& acc) {
                                 p.add_term_gradient(comp[pos], x, 1.0, acc);
                               });
  VectorXd e_split = (static_cast<double>(m - b) / (static_cast<double>(m) * b)) * sum_in -
                     sum_out / static_cast<double>(m);

  const double scale = std::max({e.norm(), e_split.norm(), 1e-300});
  if ((e - e_split).norm() > 1e-10 * scale)
    throw std::logic_error("sampled_gradient_residual: decomposition mismatch");
  return e;
}

double sample_variance(const SumProblem& p, const VectorXd& x) {
  p.check_dim(x);
  const std::int64_t m = p.term_count();
  if (m < 2) throw std::invalid_argument("sample_variance: need at least two terms");
  const int n = p.dim();
  VectorXd mean = deterministic_accumulate(
      m, n, [&](std::int64_t i, VectorXd& acc) { p.add_term_gradient(i, x, 1.0, acc); });
  mean /= static_cast<double>(m);
  VectorXd scratch(n);
  const double ss = deterministic_sum(m, [&](std::int64_t i) {
    scratch.setZero();
    p.add_term_gradient(i, x, 1.0, scratch);
    return (scratch - mean).squaredNorm();
  });
  return ss / static_cast<double>(m - 1);
}

double expected_residual_sq(double variance, std::int64_t m, std::int64_t b) {
  check_batch(m, b);
  if (variance < 0) throw std::invalid_argument("expected_residual_sq: negative variance");
  return (static_cast<double>(m - b) / static_cast<double>(m)) * variance /
         static_cast<double>(b);
}

double deterministic_residual_bound(std::int64_t m, std::int64_t b, double beta1, double beta2,
                                    double L, double gap) {
  check_batch(m, b);
  if (beta1 < 0 || beta2 < 1)
    throw std::invalid_argument("deterministic_residual_bound: need beta1 >= 0, beta2 >= 1");
  if (!(L > 0)) throw std::invalid_argument("deterministic_residual_bound: L must be positive");
  if (gap < 0) throw std::invalid_argument("deterministic_residual_bound: negative gap");
  const double frac = static_cast<double>(m - b) / static_cast<double>(m);
  return 4.0 * frac * frac * (beta1 + 2.0 * beta2 * L * gap);
}

ResidualBound stochastic_beta_bound(std::int64_t m, std::int64_t b, double beta1, double beta2,
                                    double L, double gap) {
  check_batch(m, b);
  if (m < 2) throw std::invalid_argument("stochastic_beta_bound: need M >= 2");
  if (beta1 < 0 || beta2 < 1)
    throw std::invalid_argument("stochastic_beta_bound: need beta1 >= 0, beta2 >= 1");
  if (!(L > 0)) throw std::invalid_argument("stochastic_beta_bound: L must be positive");
  if (gap < 0) throw std::invalid_argument("stochastic_beta_bound: negative gap");
  ResidualBound out;
  out.kind = ResidualBound::Kind::StochasticBeta;
  const double frac = static_cast<double>(m - b) / (static_cast<double>(m) * b);
  out.value = frac * (static_cast<double>(m) / static_cast<double>(m - 1)) *
              (beta1 + 2.0 * (beta2 - 1.0) * L * gap);
  out.degenerate = out.value == 0.0 && gap > 0.0 && b < m;
  return out;
}

}  // namespace growbatch
