#include <cmath>
#include <vector>

#include "doctest.h"
#include "growbatch/data_io.hpp"
#include "growbatch/optimize.hpp"
#include "growbatch/problems.hpp"
#include "growbatch/rng.hpp"
#include "growbatch/theory.hpp"

using namespace growbatch;

namespace {

bool same_double(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

void check_rows_identical(const Trace& lhs, const Trace& rhs) {
  REQUIRE(lhs.rows.size() == rhs.rows.size());
  for (std::size_t i = 0; i < lhs.rows.size(); ++i) {
    const TraceRow& a = lhs.rows[i];
    const TraceRow& b = rhs.rows[i];
    CHECK(a.k == b.k);
    CHECK(a.batch_size == b.batch_size);
    CHECK(a.cum_evals == b.cum_evals);
    CHECK(same_double(a.eff_passes, b.eff_passes));
    CHECK(same_double(a.f_sampled, b.f_sampled));
    CHECK(same_double(a.f_true, b.f_true));
    CHECK(same_double(a.gap, b.gap));
    CHECK(same_double(a.grad_norm, b.grad_norm));
    CHECK(same_double(a.step, b.step));
    CHECK(a.ls_evals == b.ls_evals);
    CHECK(a.pair_accepted == b.pair_accepted);
  }
}

// zero centers keep f_star = 0 exact, which makes gaps safe to fit
SyntheticQuadratic zero_center_quadratic(int dim, double dmin, double dmax, std::int64_t m) {
  VectorXd d = VectorXd::LinSpaced(dim, dmin, dmax);
  return SyntheticQuadratic(std::move(d), Eigen::MatrixXd::Zero(m, dim), 0.0);
}

BinaryLogisticProblem synthetic_logistic(std::int64_t m, std::int64_t n, double sparsity,
                                         std::uint64_t seed, double separation, double lambda) {
  SyntheticDataset ds = generate_synthetic_logistic(m, n, sparsity, seed, separation);
  std::vector<SparseRow> rows = to_problem_rows(ds.data);
  std::vector<double> labels = binary_labels(ds.data);
  const double L = lipschitz_bound_logistic(rows, static_cast<int>(ds.data.n), lambda).bound;
  BinaryLogisticProblem p(std::move(rows), std::move(labels), static_cast<int>(ds.data.n),
                          lambda);
  p.constants().L = L;
  return p;
}

SampleSet manual_set(std::vector<std::int64_t> indices) {
  SampleSet s;
  s.indices = std::move(indices);
  return s;
}

}  // namespace

TEST_CASE("sampled evaluation identities") {
  BinaryLogisticProblem p = synthetic_logistic(12, 4, 0.8, 3, 2.0, 0.15);
  CounterRng rng(0xE0E0, 0);
  VectorXd x(4);
  for (int i = 0; i < 4; ++i) x[i] = rng.normal();

  // the full sample reproduces the full evaluators bit for bit
  std::vector<std::int64_t> all(12);
  for (int i = 0; i < 12; ++i) all[i] = i;
  SampleSet full = manual_set(all);
  CHECK(sampled_value(p, full, x) == p.full_value(x));
  CHECK((sampled_gradient(p, full, x) - p.full_gradient(x)).norm() == 0.0);
  SampledValueGrad vg = sampled_value_gradient(p, full, x);
  CHECK(vg.value == p.full_value(x));
  CHECK((vg.grad - p.full_gradient(x)).norm() == 0.0);

  // a singleton with no ridge is the bare term
  BinaryLogisticProblem plain = synthetic_logistic(12, 4, 0.8, 3, 2.0, 0.0);
  SampleSet one = manual_set({5});
  CHECK(sampled_value(plain, one, x) == plain.term_value(5, x));
  CHECK((sampled_gradient(plain, one, x) - plain.term_gradient(5, x)).norm() == 0.0);

  CHECK_THROWS_AS(sampled_value(p, manual_set({}), x), std::invalid_argument);
}

TEST_CASE("sampled gradient is unbiased over subsets") {
  VectorXd d(2);
  d << 1.0, 0.5;
  CounterRng rng(0xAB, 0);
  Eigen::MatrixXd centers(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) centers(i, j) = rng.normal();
  SyntheticQuadratic p(d, centers, 0.3);
  VectorXd x(2);
  x << 0.7, -0.4;

  VectorXd mean = VectorXd::Zero(2);
  int count = 0;
  for (std::int64_t i = 0; i < 4; ++i)
    for (std::int64_t j = i + 1; j < 4; ++j) {
      mean += sampled_gradient(p, manual_set({i, j}), x);
      ++count;
    }
  mean /= count;
  CHECK((mean - p.full_gradient(x)).norm() <= 1e-12);
}

TEST_CASE("controlled-error descent with no noise") {
  // mu = L: a single exact step lands on the optimum
  VectorXd d(2);
  d << 1.0, 1.0;
  Eigen::MatrixXd c(1, 2);
  c << 0.5, -1.5;
  SyntheticQuadratic newton(d, c, 0.0);
  ControlledErrorOptions opt;
  opt.iterations = 1;
  opt.noise = NoiseBoundSequence::geometric(0.0, 0.5);
  RunResult r = run_controlled_error_gd(newton, VectorXd::Zero(2), opt);
  CHECK(r.f_final == *newton.constants().f_star);
  CHECK((r.x - *newton.constants().x_star).norm() == 0.0);

  // generic conditioning: the per-step contraction holds on every iteration
  SyntheticQuadratic p = zero_center_quadratic(6, 0.5, 2.0, 4);
  const double mu = *p.constants().mu, L = *p.constants().L;
  opt.iterations = 80;
  std::vector<double> gaps;
  opt.observer = [&](const ControlledErrorStep& s) {
    CHECK(s.err_sq == 0.0);
    CHECK(s.gap_after <= (1.0 - mu / L) * s.gap_before * (1.0 + 1e-12) + 1e-300);
    gaps.push_back(s.gap_after);
  };
  RunResult run = run_controlled_error_gd(p, VectorXd::Constant(6, 2.0), opt);
  CHECK(gaps.size() == 80);
  CHECK(run.trace.rows.back().gap <= 1e-8);
}

TEST_CASE("controlled-error run under geometric noise tracks the envelope") {
  SyntheticQuadratic p = zero_center_quadratic(8, 0.5, 1.0, 4);  // mu 0.5, L 1
  ControlledErrorOptions opt;
  opt.iterations = 400;
  opt.noise = NoiseBoundSequence::geometric(0.25, 0.8);
  opt.seed = 17;
  RunResult r = run_controlled_error_gd(p, VectorXd::Constant(8, 2.0), opt);

  std::vector<double> gaps;
  for (const TraceRow& row : r.trace.rows) gaps.push_back(row.gap);
  RateEstimate est = fit_linear_rate(gaps, 100, 300);
  // sigma = max(gamma, 1 - mu/L) + epsilon = 0.8 + epsilon
  CHECK(est.sigma <= 0.82);
  CHECK(est.sigma >= 0.4);
}

TEST_CASE("controlled-error trace accounting") {
  SyntheticQuadratic p = zero_center_quadratic(3, 0.5, 2.0, 5);
  ControlledErrorOptions opt;
  opt.iterations = 7;
  RunResult r = run_controlled_error_gd(p, VectorXd::Constant(3, 1.0), opt);
  REQUIRE(r.trace.rows.size() == 7);
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i) {
    const TraceRow& row = r.trace.rows[i];
    CHECK(row.k == static_cast<std::int64_t>(i));
    CHECK(row.batch_size == 5);
    CHECK(row.cum_evals == static_cast<std::int64_t>(5 * (i + 1)));
    CHECK(row.eff_passes == static_cast<double>(i + 1));
    CHECK(row.step == 1.0 / *p.constants().L);
  }

  SyntheticQuadratic no_l = zero_center_quadratic(3, 0.5, 2.0, 5);
  no_l.constants().L.reset();
  CHECK_THROWS_AS(run_controlled_error_gd(no_l, VectorXd::Zero(3), opt), std::invalid_argument);
}

TEST_CASE("stochastic descent with one term is plain gradient descent") {
  VectorXd d(2);
  d << 1.3, 0.7;
  Eigen::MatrixXd c(1, 2);
  c << 0.5, -0.2;
  SyntheticQuadratic p(d, c, 0.2);

  StochasticGdOptions opt;
  opt.step = 0.4;
  opt.pass_budget = 25;
  opt.seed = 5;
  opt.true_policy = TruePolicy::EveryIteration;
  RunResult r = run_stochastic_gd(p, VectorXd::Zero(2), opt);

  VectorXd x = VectorXd::Zero(2);
  REQUIRE(r.trace.rows.size() == 26);  // baseline + one row per update
  CHECK(r.trace.rows[0].f_true == p.full_value(x));
  for (int t = 0; t < 25; ++t) {
    x -= opt.step * p.full_gradient(x);
    CHECK(r.trace.rows[t + 1].f_true == p.full_value(x));
  }
  CHECK((r.x - x).norm() == 0.0);
}

TEST_CASE("stochastic descent stays bounded and decays when asked") {
  BinaryLogisticProblem p = synthetic_logistic(40, 5, 0.7, 9, 3.0, 0.1);
  StochasticGdOptions opt;
  opt.step = 0.5;
  opt.pass_budget = 30;
  opt.seed = 2;
  RunResult r = run_stochastic_gd(p, VectorXd::Zero(5), opt);
  const double f0 = r.trace.rows.front().f_true;
  for (const TraceRow& row : r.trace.rows) {
    CHECK(std::isfinite(row.f_true));
    CHECK(row.f_true < 10.0 * f0 + 1.0);
  }
  CHECK(r.trace.rows.back().f_true < f0);

  opt.decay = true;
  RunResult dec = run_stochastic_gd(p, VectorXd::Zero(5), opt);
  CHECK(dec.trace.rows.back().f_true < f0);
  // recorded step at a boundary row is the decayed alpha of that update
  for (std::size_t i = 1; i < dec.trace.rows.size(); ++i) {
    const TraceRow& row = dec.trace.rows[i];
    CHECK(row.step == opt.step / static_cast<double>(row.k + 1));
  }
}

TEST_CASE("hybrid with a full-size constant schedule reproduces the reference") {
  Schedule full;
  full.kind = Schedule::Kind::Constant;
  full.b0 = 1 << 20;  // clamped to M

  HybridQnOptions hopt;
  hopt.schedule = full;
  hopt.sample_mode = SampleMode::Uniform;
  hopt.memory = 5;
  hopt.pass_budget = 12;
  hopt.seed = 3;
  hopt.true_policy = TruePolicy::EveryIteration;

  DeterministicQnOptions dopt;
  dopt.memory = 5;
  dopt.line_search = LineSearchKind::Armijo;
  dopt.pass_budget = 12;
  dopt.max_iterations = 0;
  dopt.true_policy = TruePolicy::EveryIteration;

  BinaryLogisticProblem logistic = synthetic_logistic(30, 6, 0.7, 5, 3.0, 0.1);
  RunResult h = run_hybrid_qn(logistic, VectorXd::Zero(6), hopt);
  RunResult d = run_deterministic_qn(logistic, VectorXd::Zero(6), dopt);
  check_rows_identical(h.trace, d.trace);
  CHECK((h.x - d.x).norm() == 0.0);

  SyntheticQuadratic quad = zero_center_quadratic(4, 0.5, 2.0, 9);
  RunResult hq = run_hybrid_qn(quad, VectorXd::Constant(4, 1.5), hopt);
  RunResult dq = run_deterministic_qn(quad, VectorXd::Constant(4, 1.5), dopt);
  check_rows_identical(hq.trace, dq.trace);
}

TEST_CASE("hybrid trial step shrinks by the batch ratio after growth") {
  // identical terms: every sampled objective equals the full one, so the
  // line-search geometry is deterministic
  VectorXd d = VectorXd::LinSpaced(3, 0.5, 1.0);
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(20, 3);
  centers.col(0).setConstant(1.0);
  SyntheticQuadratic p(d, centers, 0.0);

  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::PaperLinear;
  opt.schedule.b0 = 10;
  opt.sample_mode = SampleMode::Prefix;
  opt.pass_budget = 50;
  opt.max_iterations = 2;
  opt.true_policy = TruePolicy::Never;
  RunResult r = run_hybrid_qn(p, VectorXd::Constant(3, 3.0), opt);

  REQUIRE(r.trace.rows.size() == 2);
  CHECK(r.trace.rows[0].batch_size == 10);
  CHECK(r.trace.rows[0].ls_evals == 2);  // base eval + accepted unit trial
  CHECK(r.trace.rows[0].step == 1.0);
  CHECK(r.trace.rows[1].batch_size == 12);
  CHECK(r.trace.rows[1].ls_evals == 2);
  CHECK(r.trace.rows[1].step == 10.0 / 12.0);
}

TEST_CASE("hybrid first trial is damped on a huge gradient") {
  VectorXd d(1);
  d << 1.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 1);
  SyntheticQuadratic p(d, c, 0.0);

  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::Constant;
  opt.schedule.b0 = 1;
  opt.max_iterations = 1;
  opt.pass_budget = 10;
  opt.true_policy = TruePolicy::Never;
  VectorXd x0 = VectorXd::Constant(1, 1e5);
  RunResult r = run_hybrid_qn(p, x0, opt);
  REQUIRE(r.trace.rows.size() == 1);
  CHECK(r.trace.rows[0].ls_evals == 2);
  CHECK(r.trace.rows[0].step == 1.0 / x0.norm());
}

TEST_CASE("hybrid evaluation accounting is exact") {
  BinaryLogisticProblem p = synthetic_logistic(50, 6, 0.6, 21, 3.0, 0.1);
  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::PaperLinear;
  opt.schedule.b0 = 1;
  opt.pass_budget = 10;
  opt.seed = 4;
  RunResult r = run_hybrid_qn(p, VectorXd::Zero(6), opt);

  std::int64_t prev = 0;
  for (const TraceRow& row : r.trace.rows) {
    if (row.pair_accepted >= 0) {
      CHECK(row.cum_evals - prev ==
            static_cast<std::int64_t>(row.ls_evals + 1) * row.batch_size);
    } else {
      CHECK(row.cum_evals - prev == row.batch_size);
    }
    prev = row.cum_evals;
    CHECK(row.eff_passes == static_cast<double>(row.cum_evals) / 50.0);
  }
  // the budget stops the run: every row but the last is under it
  for (std::size_t i = 0; i + 1 < r.trace.rows.size(); ++i)
    CHECK(r.trace.rows[i].cum_evals < 10 * 50);
}

TEST_CASE("hybrid morphs into the full-batch method and descends monotonically") {
  BinaryLogisticProblem p = synthetic_logistic(40, 5, 0.7, 13, 3.0, 0.1);
  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::PaperLinear;
  opt.schedule.b0 = 1;
  opt.pass_budget = 40;
  opt.seed = 8;
  opt.true_policy = TruePolicy::EveryIteration;
  RunResult r = run_hybrid_qn(p, VectorXd::Zero(5), opt);

  std::size_t morph = r.trace.rows.size();
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i)
    if (r.trace.rows[i].batch_size == 40) {
      morph = i;
      break;
    }
  REQUIRE(morph < r.trace.rows.size());

  // batch sizes never shrink, and once the batch is full the sampled
  // objective is the true one: its base values must descend
  for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
    CHECK(r.trace.rows[i].batch_size >= r.trace.rows[i - 1].batch_size);
  for (std::size_t i = morph + 1; i < r.trace.rows.size(); ++i) {
    CHECK(r.trace.rows[i].batch_size == 40);
    CHECK(r.trace.rows[i].f_sampled <= r.trace.rows[i - 1].f_sampled);
  }
  CHECK(r.trace.rows.back().f_true <= r.trace.rows[morph].f_sampled);
}

TEST_CASE("hybrid runs are reproducible and seed-sensitive") {
  BinaryLogisticProblem p = synthetic_logistic(30, 5, 0.7, 29, 3.0, 0.1);
  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::PaperLinear;
  opt.schedule.b0 = 2;
  opt.pass_budget = 8;
  opt.seed = 11;
  RunResult a = run_hybrid_qn(p, VectorXd::Zero(5), opt);
  RunResult b = run_hybrid_qn(p, VectorXd::Zero(5), opt);
  CHECK(a.trace.to_csv() == b.trace.to_csv());

  opt.seed = 12;
  RunResult c = run_hybrid_qn(p, VectorXd::Zero(5), opt);
  CHECK(a.trace.to_csv() != c.trace.to_csv());
}

TEST_CASE("hybrid survives a failing line search") {
  // eta close to 1 with zero backtracks rejects every trial; steps are zero,
  // flagged, and the run still completes
  VectorXd d(1);
  d << 1.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 1);
  SyntheticQuadratic p(d, c, 0.0);

  HybridQnOptions opt;
  opt.schedule.kind = Schedule::Kind::Constant;
  opt.schedule.b0 = 1;
  opt.eta = 0.99;
  opt.max_backtracks = 0;
  opt.max_iterations = 4;
  opt.pass_budget = 100;
  opt.true_policy = TruePolicy::Never;
  RunResult r = run_hybrid_qn(p, VectorXd::Constant(1, 2.0), opt);
  REQUIRE(r.trace.rows.size() == 4);
  for (const TraceRow& row : r.trace.rows) {
    CHECK(row.step == 0.0);
    CHECK(row.pair_accepted == 0);
  }
  CHECK(r.x[0] == 2.0);
}

TEST_CASE("deterministic quasi-Newton converges fast on a quadratic") {
  VectorXd d = VectorXd::LinSpaced(10, 0.5, 2.0);
  SyntheticQuadratic p =
      SyntheticQuadratic::axis_pattern(d, VectorXd::Constant(10, 1.0), 20, 0.1);
  DeterministicQnOptions opt;
  opt.max_iterations = 50;
  // the balanced center pattern puts the optimum at the origin; start away
  RunResult r = run_deterministic_qn(p, VectorXd::Constant(10, 2.0), opt);
  CHECK(r.f_final - *p.constants().f_star < 1e-10);
  REQUIRE(!r.trace.rows.empty());
  CHECK(r.trace.rows.size() <= 50);
  // every iteration costs at least one full pass
  CHECK(r.trace.rows.back().eff_passes >= static_cast<double>(r.trace.rows.size()));
}

TEST_CASE("deterministic quasi-Newton starts along steepest descent") {
  SyntheticQuadratic p = zero_center_quadratic(5, 0.5, 2.0, 3);
  VectorXd x0 = VectorXd::Constant(5, 1.0);
  VectorXd g0 = p.full_gradient(x0);
  DeterministicQnOptions opt;
  opt.max_iterations = 1;
  RunResult r = run_deterministic_qn(p, x0, opt);
  VectorXd moved = r.x - x0;
  REQUIRE(moved.norm() > 0.0);
  CHECK(moved.normalized().dot(g0.normalized()) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("deterministic armijo honors the gradient tolerance") {
  SyntheticQuadratic p = zero_center_quadratic(4, 0.5, 2.0, 3);
  DeterministicQnOptions opt;
  opt.line_search = LineSearchKind::Armijo;
  opt.max_iterations = 100;
  opt.grad_tol = 1e-8;
  RunResult r = run_deterministic_qn(p, VectorXd::Constant(4, 1.0), opt);
  REQUIRE(!r.trace.rows.empty());
  const TraceRow& last = r.trace.rows.back();
  CHECK(last.grad_norm <= 1e-8);
  CHECK(last.step == 0.0);
  CHECK(r.trace.rows.size() < 100);
}

TEST_CASE("sampled descent over the full set equals noise-free controlled error") {
  SyntheticQuadratic p = zero_center_quadratic(6, 0.5, 2.0, 7);

  SampledGdOptions sopt;
  sopt.schedule.kind = Schedule::Kind::Constant;
  sopt.schedule.b0 = 7;
  sopt.iterations = 40;
  sopt.true_policy = TruePolicy::EveryIteration;
  RunResult s = run_sampled_gd(p, VectorXd::Constant(6, 1.0), sopt);

  ControlledErrorOptions copt;
  copt.iterations = 40;
  copt.noise = NoiseBoundSequence::geometric(0.0, 0.5);
  copt.true_policy = TruePolicy::EveryIteration;
  RunResult c = run_controlled_error_gd(p, VectorXd::Constant(6, 1.0), copt);

  REQUIRE(s.trace.rows.size() == c.trace.rows.size());
  for (std::size_t i = 0; i < s.trace.rows.size(); ++i) {
    CHECK(s.trace.rows[i].f_true == c.trace.rows[i].f_true);
    CHECK(s.trace.rows[i].step == c.trace.rows[i].step);
  }
  CHECK((s.x - c.x).norm() == 0.0);
}

TEST_CASE("sampled descent with a pinned singleton follows the bare term") {
  VectorXd d(2);
  d << 1.0, 0.5;
  CounterRng rng(0xCC, 0);
  Eigen::MatrixXd centers(5, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) centers(i, j) = rng.normal();
  SyntheticQuadratic p(d, centers, 0.0);

  SampledGdOptions opt;
  opt.schedule.kind = Schedule::Kind::Constant;
  opt.schedule.b0 = 1;
  opt.sample_mode = SampleMode::Prefix;  // always term 0
  opt.iterations = 10;
  opt.true_policy = TruePolicy::Never;
  RunResult r = run_sampled_gd(p, VectorXd::Zero(2), opt);

  const double step = 1.0 / *p.constants().L;
  VectorXd x = VectorXd::Zero(2);
  for (int k = 0; k < 10; ++k) x -= step * p.term_gradient(0, x);
  CHECK((r.x - x).norm() == 0.0);
}

TEST_CASE("sampled descent with a growing batch converges linearly") {
  BinaryLogisticProblem p = synthetic_logistic(200, 10, 0.6, 31, 3.0, 0.1);

  // tight reference optimum for gap measurements
  DeterministicQnOptions refopt;
  refopt.max_iterations = 400;
  refopt.grad_tol = 1e-12;
  refopt.true_policy = TruePolicy::Never;
  const double f_hat = run_deterministic_qn(p, VectorXd::Zero(10), refopt).f_final;

  SampledGdOptions opt;
  opt.schedule.kind = Schedule::Kind::GeometricDet;
  opt.schedule.gamma = 0.9;
  opt.iterations = 250;
  opt.seed = 6;
  opt.true_policy = TruePolicy::EveryIteration;
  RunResult r = run_sampled_gd(p, VectorXd::Zero(10), opt);

  std::vector<double> gaps;
  for (const TraceRow& row : r.trace.rows) gaps.push_back(row.f_true - f_hat);
  CHECK(gaps.back() < 1e-6);
  auto [begin, end] = default_rate_window(gaps);
  if (end - begin >= 2) {
    RateEstimate est = fit_linear_rate(gaps, begin, end);
    CHECK(est.sigma < 1.0);
  }

  BinaryLogisticProblem no_l = synthetic_logistic(20, 4, 0.6, 31, 3.0, 0.1);
  no_l.constants().L.reset();
  CHECK_THROWS_AS(run_sampled_gd(no_l, VectorXd::Zero(4), opt), std::invalid_argument);
}

TEST_CASE("sampled descent respects its pass budget") {
  SyntheticQuadratic p = zero_center_quadratic(3, 0.5, 2.0, 10);
  SampledGdOptions opt;
  opt.schedule.kind = Schedule::Kind::Constant;
  opt.schedule.b0 = 10;
  opt.pass_budget = 3;
  opt.iterations = 0;
  opt.true_policy = TruePolicy::Never;
  RunResult r = run_sampled_gd(p, VectorXd::Constant(3, 1.0), opt);
  CHECK(r.trace.rows.size() == 3);
  CHECK(r.trace.rows.back().cum_evals == 30);
}
