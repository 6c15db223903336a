#include "growbatch/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "growbatch/rng.hpp"

namespace growbatch {

namespace {

void check_mu_l(double mu, double L) {
  if (!(mu > 0) || !(L > 0) || mu > L)
    throw std::invalid_argument("theory: need 0 < mu <= L");
}

}  // namespace

double lemma_bound(double gap, double err_sq, double mu, double L) {
  check_mu_l(mu, L);
  if (gap < 0 || err_sq < 0) throw std::invalid_argument("lemma_bound: negative input");
  return (1.0 - mu / L) * gap + err_sq / (2.0 * L);
}

double strong_rate_noise_bound(double pi, double mu, double L, double rho) {
  check_mu_l(mu, L);
  if (!(rho > 0) || rho > mu / L)
    throw std::invalid_argument("strong_rate_noise_bound: need 0 < rho <= mu/L");
  if (pi < 0) throw std::invalid_argument("strong_rate_noise_bound: negative pi");
  return 2.0 * L * (mu / L - rho) * pi;
}

double pi_gradient_heuristic(double grad_norm, double mu, double L) {
  check_mu_l(mu, L);
  return mu / (2.0 * L * L) * grad_norm * grad_norm;
}

double pi_step_heuristic(double step_norm, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("pi_step_heuristic: mu must be positive");
  return mu / 8.0 * step_norm * step_norm;
}

// ---- NoiseBoundSequence -----------------------------------------------------

double NoiseBoundSequence::value(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("NoiseBoundSequence: negative iteration");
  switch (kind) {
    case Kind::Geometric:
      return b0 * std::pow(gamma, static_cast<double>(k));
    case Kind::Polynomial:
      return b0 / std::pow(static_cast<double>(k + 1), power);
    case Kind::Summable:
      return b0 / std::pow(static_cast<double>(k + 1), 2.0 * power);
    case Kind::StrongRate:
      throw std::logic_error("NoiseBoundSequence: strong-rate bound needs run state");
  }
  return 0.0;
}

NoiseBoundSequence NoiseBoundSequence::geometric(double b0, double gamma) {
  if (b0 < 0 || !(gamma > 0) || gamma > 1)
    throw std::invalid_argument("NoiseBoundSequence: geometric needs b0 >= 0, gamma in (0, 1]");
  NoiseBoundSequence s;
  s.kind = Kind::Geometric;
  s.b0 = b0;
  s.gamma = gamma;
  return s;
}

NoiseBoundSequence NoiseBoundSequence::polynomial(double b0, double power) {
  if (b0 < 0 || !(power > 0))
    throw std::invalid_argument("NoiseBoundSequence: polynomial needs b0 >= 0, power > 0");
  NoiseBoundSequence s;
  s.kind = Kind::Polynomial;
  s.b0 = b0;
  s.power = power;
  return s;
}

NoiseBoundSequence NoiseBoundSequence::summable(double b0, double power) {
  if (b0 < 0 || !(power > 1))
    throw std::invalid_argument("NoiseBoundSequence: summable needs b0 >= 0, power > 1");
  NoiseBoundSequence s;
  s.kind = Kind::Summable;
  s.b0 = b0;
  s.power = power;
  return s;
}

NoiseBoundSequence NoiseBoundSequence::strong_rate(double rho, PiSource source) {
  if (!(rho > 0)) throw std::invalid_argument("NoiseBoundSequence: strong-rate needs rho > 0");
  NoiseBoundSequence s;
  s.kind = Kind::StrongRate;
  s.rho = rho;
  s.pi_source = source;
  return s;
}

VectorXd inject_noise(double target_b, int dim, std::uint64_t seed, std::int64_t k,
                      NoiseMode mode) {
  if (dim < 1) throw std::invalid_argument("inject_noise: dimension must be positive");
  if (target_b < 0) throw std::invalid_argument("inject_noise: negative bound");
  if (target_b == 0.0) return VectorXd::Zero(dim);
  CounterRng rng(seed, static_cast<std::uint64_t>(k));
  switch (mode) {
    case NoiseMode::ExactNorm:
      return std::sqrt(target_b) * rng.unit_vector(dim);
    case NoiseMode::Expectation: {
      const double norm_sq = rng.uniform(0.0, 2.0 * target_b);
      return std::sqrt(norm_sq) * rng.unit_vector(dim);
    }
    case NoiseMode::Biased: {
      VectorXd e = VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
      return std::sqrt(target_b) * e;
    }
  }
  return VectorXd::Zero(dim);
}

// ---- beta certification -----------------------------------------------------

BetaCertificate certify_beta(const SumProblem& p, const std::vector<VectorXd>& probes) {
  if (probes.empty()) throw std::invalid_argument("certify_beta: no probe points");
  static const double kGrid[] = {1.0, 1.25, 1.5, 2.0, 3.0,  4.0,  6.0,  8.0,
                                 12.0, 16.0, 24.0, 32.0, 48.0, 64.0, 96.0, 128.0};

  const std::int64_t m = p.term_count();
  std::vector<double> full_sq;
  full_sq.reserve(probes.size());
  // max over probes and terms of ||g_i||^2 - beta2 ||g||^2, tracked per grid entry
  std::vector<double> need(std::size(kGrid), 0.0);
  VectorXd gi(p.dim());
  for (const VectorXd& x : probes) {
    p.check_dim(x);
    const VectorXd g = p.full_gradient(x);
    const double gsq = g.squaredNorm();
    full_sq.push_back(gsq);
    for (std::int64_t i = 0; i < m; ++i) {
      gi.setZero();
      p.add_term_gradient(i, x, 1.0, gi);
      if (p.lambda() != 0.0) gi += p.lambda() * x;  // certificate covers the ridge term
      const double gisq = gi.squaredNorm();
      for (std::size_t t = 0; t < std::size(kGrid); ++t)
        need[t] = std::max(need[t], gisq - kGrid[t] * gsq);
    }
  }
  std::vector<double> sorted = full_sq;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];

  BetaCertificate best;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < std::size(kGrid); ++t) {
    const double beta1 = std::max(0.0, need[t]);
    const double score = beta1 + kGrid[t] * median;
    if (score < best_score) {
      best_score = score;
      best.beta1 = beta1;
      best.beta2 = kGrid[t];
    }
  }
  best.median_grad_sq = median;
  return best;
}

// ---- empirical rates --------------------------------------------------------

RateEstimate fit_linear_rate(const std::vector<double>& gaps, std::size_t begin,
                             std::size_t end) {
  if (end > gaps.size() || begin >= end)
    throw std::invalid_argument("fit_linear_rate: bad window");
  if (end - begin < 2) throw std::invalid_argument("fit_linear_rate: window needs >= 2 points");
  double sk = 0.0, sy = 0.0;
  const double cnt = static_cast<double>(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    if (!(gaps[k] > 0)) throw std::invalid_argument("fit_linear_rate: non-positive gap in window");
    sk += static_cast<double>(k);
    sy += std::log(gaps[k]);
  }
  const double mk = sk / cnt, my = sy / cnt;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double dx = static_cast<double>(k) - mk;
    sxx += dx * dx;
    sxy += dx * (std::log(gaps[k]) - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double fit = my + slope * (static_cast<double>(k) - mk);
    const double r = std::log(gaps[k]) - fit;
    ss += r * r;
  }
  RateEstimate est;
  est.sigma = std::exp(slope);
  est.residual = std::sqrt(ss / cnt);
  est.points = static_cast<std::int64_t>(end - begin);
  return est;
}

std::pair<std::size_t, std::size_t> default_rate_window(const std::vector<double>& gaps) {
  if (gaps.empty()) throw std::invalid_argument("default_rate_window: empty gap sequence");
  const double floor = 1e2 * std::numeric_limits<double>::epsilon() * std::abs(gaps.front());
  std::size_t begin = gaps.size() / 2;
  std::size_t end = begin;
  for (std::size_t k = begin; k < gaps.size(); ++k) {
    if (!(gaps[k] > floor)) break;
    end = k + 1;
  }
  return {begin, end};
}

double check_sublinear(const std::vector<double>& avg_gaps) {
  double sup = 0.0;
  for (std::size_t j = 0; j < avg_gaps.size(); ++j)
    sup = std::max(sup, static_cast<double>(j + 1) * avg_gaps[j]);
  return sup;
}

}  // namespace growbatch
