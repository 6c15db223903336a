#include "growbatch/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "growbatch/lbfgs.hpp"
#include "growbatch/linesearch.hpp"
#include "growbatch/rng.hpp"
#include "eval_impl.hpp"

namespace growbatch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kNoCap = std::numeric_limits<std::int64_t>::max();

std::int64_t identity_index(std::int64_t i) { return i; }

bool crosses_pass(std::int64_t prev_cum, std::int64_t cum, std::int64_t m) {
  return prev_cum / m < cum / m;
}

// First-trial step for the Armijo-based drivers.  Unit step once the batch is
// stable; a grown batch shrinks the trial by the batch ratio because the new
// sampled objective has not vetted the old curvature yet.
double initial_trial(std::int64_t k, std::int64_t b_prev, std::int64_t b, double grad_norm) {
  if (k == 0) return grad_norm > 1e4 ? 1.0 / grad_norm : 1.0;
  return static_cast<double>(b_prev) / static_cast<double>(b);
}

}  // namespace

double sampled_value(const SumProblem& p, const SampleSet& s, const Eigen::VectorXd& x) {
  p.check_dim(x);
  if (s.indices.empty()) throw std::invalid_argument("sampled_value: empty sample");
  return detail::value_over(p, x, s.size(), [&](std::int64_t i) { return s.indices[i]; });
}

Eigen::VectorXd sampled_gradient(const SumProblem& p, const SampleSet& s,
                                 const Eigen::VectorXd& x) {
  p.check_dim(x);
  if (s.indices.empty()) throw std::invalid_argument("sampled_gradient: empty sample");
  return detail::gradient_over(p, x, s.size(), [&](std::int64_t i) { return s.indices[i]; });
}

SampledValueGrad sampled_value_gradient(const SumProblem& p, const SampleSet& s,
                                        const Eigen::VectorXd& x) {
  p.check_dim(x);
  if (s.indices.empty()) throw std::invalid_argument("sampled_value_gradient: empty sample");
  auto [v, g] =
      detail::value_gradient_over(p, x, s.size(), [&](std::int64_t i) { return s.indices[i]; });
  return {v, std::move(g)};
}

RunResult run_controlled_error_gd(const SumProblem& p, const Eigen::VectorXd& x0,
                                  const ControlledErrorOptions& opt) {
  p.check_dim(x0);
  const ProblemConstants& c = p.constants();
  if (!c.L) throw std::invalid_argument("run_controlled_error_gd: constants.L is required");
  if (opt.iterations < 0)
    throw std::invalid_argument("run_controlled_error_gd: iterations must be >= 0");
  const bool strong = opt.noise.kind == NoiseBoundSequence::Kind::StrongRate;
  if (strong && !c.mu)
    throw std::invalid_argument("run_controlled_error_gd: strong-rate noise needs constants.mu");
  const bool oracle_pi =
      strong && opt.noise.pi_source == NoiseBoundSequence::PiSource::OracleGap;
  if (oracle_pi && !c.f_star)
    throw std::invalid_argument(
        "run_controlled_error_gd: the oracle pi source needs constants.f_star");

  const double L = *c.L;
  const std::int64_t m = p.term_count();
  const int dim = static_cast<int>(x0.size());
  const bool want_true = opt.true_policy != TruePolicy::Never;
  const bool track_f = want_true || oracle_pi;

  RunResult out;
  out.trace.method = "controlled_error_gd";
  out.trace.m = m;
  out.trace.seed = opt.seed;
  out.trace.rows.reserve(static_cast<std::size_t>(opt.iterations));

  Eigen::VectorXd x = x0;
  // Objective values are instrumentation here; the update needs gradients only,
  // so cum_evals counts one pass per iteration.
  double f_cur = track_f ? p.full_value(x) : kNaN;
  double prev_step_sq = 0.0;
  std::int64_t cum = 0;

  for (std::int64_t k = 0; k < opt.iterations; ++k) {
    const Eigen::VectorXd g = p.full_gradient(x);
    cum += m;

    double bound = 0.0;
    if (strong) {
      double pi = 0.0;
      switch (opt.noise.pi_source) {
        case NoiseBoundSequence::PiSource::OracleGap:
          pi = std::max(0.0, f_cur - *c.f_star);
          break;
        case NoiseBoundSequence::PiSource::GradientHeuristic:
          pi = pi_gradient_heuristic(g.norm(), *c.mu, L);
          break;
        case NoiseBoundSequence::PiSource::StepHeuristic:
          pi = pi_step_heuristic(std::sqrt(prev_step_sq), *c.mu);
          break;
      }
      bound = strong_rate_noise_bound(pi, *c.mu, L, opt.noise.rho);
    } else {
      bound = opt.noise.value(k);
    }

    const Eigen::VectorXd e = inject_noise(bound, dim, opt.seed, k, opt.mode);
    const double err_sq = e.squaredNorm();
    Eigen::VectorXd x_next = x - (1.0 / L) * (g + e);
    const double step_sq = (x_next - x).squaredNorm();
    const double f_next = track_f ? p.full_value(x_next) : kNaN;

    TraceRow row;
    row.k = k;
    row.batch_size = m;
    row.cum_evals = cum;
    row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
    row.f_sampled = f_cur;
    row.f_true = want_true ? f_next : kNaN;
    row.gap = (want_true && c.f_star) ? f_next - *c.f_star : kNaN;
    row.grad_norm = g.norm();
    row.step = 1.0 / L;
    row.ls_evals = 1;
    row.pair_accepted = -1;
    out.trace.rows.push_back(row);

    if (opt.observer) {
      ControlledErrorStep st;
      st.k = k;
      st.gap_before = c.f_star && track_f ? f_cur - *c.f_star : kNaN;
      st.gap_after = c.f_star && track_f ? f_next - *c.f_star : kNaN;
      st.err_sq = err_sq;
      st.bound = bound;
      st.grad_sq = g.squaredNorm();
      st.step_sq = step_sq;
      st.x_after = &x_next;
      opt.observer(st);
    }

    x.swap(x_next);
    f_cur = f_next;
    prev_step_sq = step_sq;
  }

  out.x = std::move(x);
  out.f_final = std::isnan(f_cur) ? p.full_value(out.x) : f_cur;
  return out;
}

RunResult run_stochastic_gd(const SumProblem& p, const Eigen::VectorXd& x0,
                            const StochasticGdOptions& opt) {
  p.check_dim(x0);
  if (!(opt.step > 0.0)) throw std::invalid_argument("run_stochastic_gd: step must be positive");
  if (opt.pass_budget <= 0)
    throw std::invalid_argument("run_stochastic_gd: pass_budget must be positive");

  const std::int64_t m = p.term_count();
  const int dim = static_cast<int>(x0.size());
  const double lambda = p.lambda();
  const bool want_true = opt.true_policy != TruePolicy::Never;
  const std::int64_t budget = opt.pass_budget * m;
  const auto& f_star = p.constants().f_star;

  RunResult out;
  out.trace.method = "stochastic_gd";
  out.trace.m = m;
  out.trace.seed = opt.seed;
  out.trace.rows.reserve(static_cast<std::size_t>(opt.pass_budget) + 1);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd g_term = Eigen::VectorXd::Zero(dim);

  {
    TraceRow row;  // baseline, batch_size 0 marks "before any update"
    row.k = 0;
    row.batch_size = 0;
    row.cum_evals = 0;
    row.eff_passes = 0.0;
    row.f_sampled = kNaN;
    row.f_true = want_true ? p.full_value(x) : kNaN;
    row.gap = (want_true && f_star) ? row.f_true - *f_star : kNaN;
    row.grad_norm = kNaN;
    row.step = 0.0;
    row.ls_evals = 0;
    row.pair_accepted = -1;
    out.trace.rows.push_back(row);
  }

  std::int64_t cum = 0;
  for (std::int64_t t = 0; cum < budget; ++t) {
    CounterRng rng(opt.seed, static_cast<std::uint64_t>(t));
    const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m)));
    g_term.setZero();
    p.add_term_gradient(i, x, 1.0, g_term);
    if (lambda != 0.0) g_term.noalias() += lambda * x;
    const double alpha = opt.decay ? opt.step / static_cast<double>(t + 1) : opt.step;
    x.noalias() -= alpha * g_term;
    ++cum;

    if (cum % m == 0 || cum >= budget) {
      TraceRow row;
      row.k = t;
      row.batch_size = 1;
      row.cum_evals = cum;
      row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
      row.f_sampled = kNaN;
      row.f_true = want_true ? p.full_value(x) : kNaN;
      row.gap = (want_true && f_star) ? row.f_true - *f_star : kNaN;
      row.grad_norm = g_term.norm();
      row.step = alpha;
      row.ls_evals = 0;
      row.pair_accepted = -1;
      out.trace.rows.push_back(row);
    }
  }

  out.x = std::move(x);
  out.f_final = want_true ? out.trace.rows.back().f_true : p.full_value(out.x);
  return out;
}

RunResult run_hybrid_qn(const SumProblem& p, const Eigen::VectorXd& x0,
                        const HybridQnOptions& opt) {
  p.check_dim(x0);
  if (opt.memory < 0) throw std::invalid_argument("run_hybrid_qn: memory must be >= 0");
  if (opt.pass_budget <= 0 && opt.max_iterations <= 0)
    throw std::invalid_argument("run_hybrid_qn: need pass_budget or max_iterations");
  const ProblemConstants& c = p.constants();
  if (opt.schedule.kind == Schedule::Kind::StrongRate && (!c.L || !c.mu || !c.f_star))
    throw std::invalid_argument("run_hybrid_qn: strong-rate schedule needs L, mu and f_star");

  const std::int64_t m = p.term_count();
  const std::int64_t budget = opt.pass_budget > 0 ? opt.pass_budget * m : kNoCap;
  const std::int64_t max_iter = opt.max_iterations > 0 ? opt.max_iterations : kNoCap;
  const bool want_true = opt.true_policy != TruePolicy::Never;
  const bool every = opt.true_policy == TruePolicy::EveryIteration;

  RunResult out;
  out.trace.method = "hybrid_qn";
  out.trace.m = m;
  out.trace.seed = opt.seed;

  LbfgsMemory mem(opt.memory);
  Eigen::VectorXd x = x0;
  std::int64_t cum = 0;
  std::int64_t b_prev = 0;

  for (std::int64_t k = 0; k < max_iter && cum < budget; ++k) {
    StrongRateContext ctx;
    const StrongRateContext* ctx_ptr = nullptr;
    if (opt.schedule.kind == Schedule::Kind::StrongRate) {
      // oracle-instrumented sizing; this evaluation is not charged
      ctx.L = *c.L;
      ctx.mu = *c.mu;
      ctx.gap = p.full_value(x) - *c.f_star;
      ctx_ptr = &ctx;
    }
    const std::int64_t b = opt.schedule.next_size(k, b_prev, m, ctx_ptr);
    const SampleSet sample = draw_sample(m, b, opt.sample_mode, opt.seed, k);

    auto [f0, g0] = sampled_value_gradient(p, sample, x);
    int evals = 1;
    const std::int64_t prev_cum = cum;

    if (!std::isfinite(f0) || !g0.allFinite()) {
      cum += b;
      TraceRow row;
      row.k = k;
      row.batch_size = b;
      row.cum_evals = cum;
      row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
      row.f_sampled = f0;
      row.f_true = kNaN;
      row.gap = kNaN;
      row.grad_norm = g0.norm();
      row.step = 0.0;
      row.ls_evals = evals;
      row.pair_accepted = 0;
      out.trace.rows.push_back(row);
      break;  // the sampled objective blew up; nothing sane to do
    }

    double alpha = 0.0;
    bool accepted = false;
    Eigen::VectorXd x_next = x;
    const bool stationary = g0.squaredNorm() == 0.0;

    if (!stationary) {
      Eigen::VectorXd d = mem.direction(g0);
      double slope = g0.dot(d);
      if (!(slope < 0.0)) {  // stale curvature from an earlier sample
        mem.clear();
        d = -g0;
        slope = -g0.squaredNorm();
      }
      const double alpha0 = initial_trial(k, b_prev, b, g0.norm());
      auto phi = [&](double a) { return sampled_value(p, sample, x + a * d); };
      const LineSearchResult ls =
          armijo_search(phi, f0, slope, alpha0, opt.eta, opt.max_backtracks);
      evals += ls.evaluations;
      if (ls.ok()) {
        alpha = ls.alpha;
        x_next = x + alpha * d;
      }
    }

    if (stationary) {
      cum += b;  // base evaluation only; no step, no curvature pair
    } else {
      // Curvature-pair gradient of the same sampled objective at the reached
      // point; performed even for a rejected step so cum_evals stays
      // (ls_evals + 1) * b on every row.
      const Eigen::VectorXd g1 = sampled_gradient(p, sample, x_next);
      cum += static_cast<std::int64_t>(evals + 1) * b;
      if (alpha > 0.0) {
        accepted = mem.push(x_next - x, g1 - g0);
      } else {
        mem.clear();  // direction failed on this sample; restart the memory
      }
    }

    const bool last = cum >= budget || k + 1 >= max_iter;
    const bool fire = want_true && (every || k == 0 || last || crosses_pass(prev_cum, cum, m));
    const double f_next = fire ? p.full_value(x_next) : kNaN;

    TraceRow row;
    row.k = k;
    row.batch_size = b;
    row.cum_evals = cum;
    row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
    row.f_sampled = f0;
    row.f_true = f_next;
    row.gap = (fire && c.f_star) ? f_next - *c.f_star : kNaN;
    row.grad_norm = g0.norm();
    row.step = alpha;
    row.ls_evals = evals;
    row.pair_accepted = stationary ? -1 : (accepted ? 1 : 0);
    out.trace.rows.push_back(row);

    if (opt.observer) {
      HybridStep st;
      st.k = k;
      st.batch = b;
      st.alpha = alpha;
      st.f_base = f0;
      st.pair_accepted = accepted;
      opt.observer(st);
    }

    if (stationary && b == m) break;  // solved the full objective's gradient
    x.swap(x_next);
    b_prev = b;
  }

  out.x = std::move(x);
  out.f_final = p.full_value(out.x);
  return out;
}

namespace {

// Armijo variant of the full-batch reference, mirroring the hybrid driver's
// evaluation pattern so a full-set hybrid run reproduces it bit for bit.
RunResult run_deterministic_armijo(const SumProblem& p, const Eigen::VectorXd& x0,
                                   const DeterministicQnOptions& opt) {
  const std::int64_t m = p.term_count();
  const std::int64_t budget = opt.pass_budget > 0 ? opt.pass_budget * m : kNoCap;
  const std::int64_t max_iter = opt.max_iterations > 0 ? opt.max_iterations : kNoCap;
  const auto& f_star = p.constants().f_star;

  RunResult out;
  out.trace.method = "deterministic_qn_armijo";
  out.trace.m = m;
  out.trace.seed = 0;

  LbfgsMemory mem(opt.memory);
  Eigen::VectorXd x = x0;
  std::int64_t cum = 0;

  for (std::int64_t k = 0; k < max_iter && cum < budget; ++k) {
    auto [f0, g0] = detail::value_gradient_over(p, x, m, identity_index);
    int evals = 1;
    const double grad_norm = g0.norm();

    if (!std::isfinite(f0) || !g0.allFinite()) break;
    if ((opt.grad_tol > 0.0 && grad_norm <= opt.grad_tol) || grad_norm == 0.0) {
      cum += m;
      TraceRow row;
      row.k = k;
      row.batch_size = m;
      row.cum_evals = cum;
      row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
      row.f_sampled = f0;
      row.f_true = f0;
      row.gap = f_star ? f0 - *f_star : kNaN;
      row.grad_norm = grad_norm;
      row.step = 0.0;
      row.ls_evals = evals;
      row.pair_accepted = -1;
      out.trace.rows.push_back(row);
      break;
    }

    Eigen::VectorXd d = mem.direction(g0);
    double slope = g0.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -g0;
      slope = -g0.squaredNorm();
    }
    const double alpha0 = initial_trial(k, m, m, grad_norm);
    auto phi = [&](double a) {
      Eigen::VectorXd xt = x + a * d;
      return detail::value_over(p, xt, m, identity_index);
    };
    const LineSearchResult ls = armijo_search(phi, f0, slope, alpha0, opt.eta, opt.max_backtracks);
    evals += ls.evaluations;

    double alpha = 0.0;
    Eigen::VectorXd x_next = x;
    if (ls.ok()) {
      alpha = ls.alpha;
      x_next = x + alpha * d;
    }
    const Eigen::VectorXd g1 = detail::gradient_over(p, x_next, m, identity_index);
    cum += static_cast<std::int64_t>(evals + 1) * m;
    bool accepted = false;
    if (alpha > 0.0) {
      accepted = mem.push(x_next - x, g1 - g0);
    } else {
      mem.clear();
    }

    const double f_next = ls.ok() ? ls.f : f0;  // value at the reached point, already paid for
    TraceRow row;
    row.k = k;
    row.batch_size = m;
    row.cum_evals = cum;
    row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
    row.f_sampled = f0;
    row.f_true = f_next;
    row.gap = f_star ? f_next - *f_star : kNaN;
    row.grad_norm = grad_norm;
    row.step = alpha;
    row.ls_evals = evals;
    row.pair_accepted = accepted ? 1 : 0;
    out.trace.rows.push_back(row);

    x.swap(x_next);
  }

  out.x = std::move(x);
  out.f_final = p.full_value(out.x);
  return out;
}

RunResult run_deterministic_wolfe(const SumProblem& p, const Eigen::VectorXd& x0,
                                  const DeterministicQnOptions& opt) {
  const std::int64_t m = p.term_count();
  const std::int64_t budget = opt.pass_budget > 0 ? opt.pass_budget * m : kNoCap;
  const std::int64_t max_iter = opt.max_iterations > 0 ? opt.max_iterations : kNoCap;
  const auto& f_star = p.constants().f_star;

  RunResult out;
  out.trace.method = "deterministic_qn";
  out.trace.m = m;
  out.trace.seed = 0;

  LbfgsMemory mem(opt.memory);
  Eigen::VectorXd x = x0;
  auto base = detail::value_gradient_over(p, x, m, identity_index);
  double f_cur = base.first;
  Eigen::VectorXd g_cur = std::move(base.second);
  std::int64_t cum = m;  // the one evaluation every later iteration reuses

  for (std::int64_t k = 0; k < max_iter && cum < budget; ++k) {
    if (!std::isfinite(f_cur) || !g_cur.allFinite()) break;
    const double grad_norm = g_cur.norm();
    if ((opt.grad_tol > 0.0 && grad_norm <= opt.grad_tol) || grad_norm == 0.0) break;

    Eigen::VectorXd d = mem.direction(g_cur);
    double slope = g_cur.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -g_cur;
      slope = -g_cur.squaredNorm();
    }

    // cache of the most recent phi evaluation; the search returns right after
    // the accepting call, so the accepted gradient is already here
    double cached_alpha = -1.0;
    double cached_f = kNaN;
    Eigen::VectorXd cached_g;
    auto phi = [&](double a) {
      Eigen::VectorXd xt = x + a * d;
      auto [fv, gv] = detail::value_gradient_over(p, xt, m, identity_index);
      cached_alpha = a;
      cached_f = fv;
      cached_g = std::move(gv);
      return std::make_pair(fv, cached_g.dot(d));
    };
    const LineSearchResult ls = wolfe_search(phi, f_cur, slope, 1.0, opt.c1, opt.c2);

    int evals = ls.evaluations + (k == 0 ? 1 : 0);
    cum += static_cast<std::int64_t>(ls.evaluations) * m;

    const double f_base = f_cur;
    double alpha = 0.0;
    double f_next = f_cur;
    bool accepted = false;
    bool stalled = false;

    if (ls.ok() && ls.alpha > 0.0) {
      alpha = ls.alpha;
      Eigen::VectorXd x_next = x + alpha * d;
      Eigen::VectorXd g_next;
      if (cached_alpha == alpha) {
        f_next = cached_f;
        g_next = std::move(cached_g);
      } else {  // defensive; costs one extra pass if a search ever returns stale alpha
        auto fresh = detail::value_gradient_over(p, x_next, m, identity_index);
        f_next = fresh.first;
        g_next = std::move(fresh.second);
        cum += m;
        ++evals;
      }
      accepted = mem.push(x_next - x, g_next - g_cur);
      x.swap(x_next);
      f_cur = f_next;
      g_cur = std::move(g_next);
    } else {
      if (mem.size() == 0) stalled = true;  // steepest descent failed too
      mem.clear();
    }

    TraceRow row;
    row.k = k;
    row.batch_size = m;
    row.cum_evals = cum;
    row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
    row.f_sampled = f_base;
    row.f_true = f_next;
    row.gap = f_star ? f_next - *f_star : kNaN;
    row.grad_norm = grad_norm;
    row.step = alpha;
    row.ls_evals = evals;
    row.pair_accepted = accepted ? 1 : 0;
    out.trace.rows.push_back(row);

    if (stalled) break;
  }

  out.x = std::move(x);
  out.f_final = f_cur;
  return out;
}

}  // namespace

RunResult run_deterministic_qn(const SumProblem& p, const Eigen::VectorXd& x0,
                               const DeterministicQnOptions& opt) {
  p.check_dim(x0);
  if (opt.memory < 0) throw std::invalid_argument("run_deterministic_qn: memory must be >= 0");
  if (opt.pass_budget <= 0 && opt.max_iterations <= 0 && !(opt.grad_tol > 0.0))
    throw std::invalid_argument("run_deterministic_qn: no stopping rule configured");
  return opt.line_search == LineSearchKind::Armijo ? run_deterministic_armijo(p, x0, opt)
                                                   : run_deterministic_wolfe(p, x0, opt);
}

RunResult run_sampled_gd(const SumProblem& p, const Eigen::VectorXd& x0,
                         const SampledGdOptions& opt) {
  p.check_dim(x0);
  const ProblemConstants& c = p.constants();
  if (!c.L) throw std::invalid_argument("run_sampled_gd: constants.L is required");
  if (opt.iterations <= 0 && opt.pass_budget <= 0)
    throw std::invalid_argument("run_sampled_gd: need iterations or pass_budget");
  if (opt.schedule.kind == Schedule::Kind::StrongRate && (!c.mu || !c.f_star))
    throw std::invalid_argument("run_sampled_gd: strong-rate schedule needs mu and f_star");

  const std::int64_t m = p.term_count();
  const double step = 1.0 / *c.L;
  const std::int64_t budget = opt.pass_budget > 0 ? opt.pass_budget * m : kNoCap;
  const std::int64_t max_iter = opt.iterations > 0 ? opt.iterations : kNoCap;
  const bool want_true = opt.true_policy != TruePolicy::Never;
  const bool every = opt.true_policy == TruePolicy::EveryIteration;

  RunResult out;
  out.trace.method = "sampled_gd";
  out.trace.m = m;
  out.trace.seed = opt.seed;

  Eigen::VectorXd x = x0;
  std::int64_t cum = 0;
  std::int64_t b_prev = 0;

  for (std::int64_t k = 0; k < max_iter && cum < budget; ++k) {
    StrongRateContext ctx;
    const StrongRateContext* ctx_ptr = nullptr;
    if (opt.schedule.kind == Schedule::Kind::StrongRate) {
      ctx.L = *c.L;
      ctx.mu = *c.mu;
      ctx.gap = p.full_value(x) - *c.f_star;
      ctx_ptr = &ctx;
    }
    const std::int64_t b = opt.schedule.next_size(k, b_prev, m, ctx_ptr);
    const SampleSet sample = draw_sample(m, b, opt.sample_mode, opt.seed, k);
    auto [f0, g0] = sampled_value_gradient(p, sample, x);
    const std::int64_t prev_cum = cum;
    cum += b;

    Eigen::VectorXd x_next = x - step * g0;
    const bool last = cum >= budget || k + 1 >= max_iter;
    const bool fire = want_true && (every || k == 0 || last || crosses_pass(prev_cum, cum, m));
    const double f_next = fire ? p.full_value(x_next) : kNaN;

    TraceRow row;
    row.k = k;
    row.batch_size = b;
    row.cum_evals = cum;
    row.eff_passes = static_cast<double>(cum) / static_cast<double>(m);
    row.f_sampled = f0;
    row.f_true = f_next;
    row.gap = (fire && c.f_star) ? f_next - *c.f_star : kNaN;
    row.grad_norm = g0.norm();
    row.step = step;
    row.ls_evals = 1;
    row.pair_accepted = -1;
    out.trace.rows.push_back(row);

    if (!std::isfinite(f0) || !g0.allFinite()) break;
    x.swap(x_next);
    b_prev = b;
  }

  out.x = std::move(x);
  out.f_final = p.full_value(out.x);
  return out;
}

}  // namespace growbatch
