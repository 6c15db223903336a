#include <cmath>
#include <vector>

#include "doctest.h"
#include "growbatch/lbfgs.hpp"
#include "growbatch/linesearch.hpp"
#include "growbatch/rng.hpp"
#include "support/oracles.hpp"

using namespace growbatch;
using growbatch::testing::CurvaturePair;
using growbatch::testing::dense_bfgs_direction;

namespace {

VectorXd rand_vec(int n, std::uint64_t counter) {
  CounterRng rng(0x1bf0, counter);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("shanno-phua scale") {
  VectorXd s(2), y(2);
  s << 1.0, 0.0;
  y << 2.0, 0.0;
  CHECK(shanno_phua_scale(s, y) == 0.5);
  CHECK(shanno_phua_scale(s, s) == 1.0);

  // generalized Rayleigh quotient: sandwiched by the curvature extremes
  VectorXd d(4);
  d << 0.5, 1.0, 2.0, 4.0;
  for (int t = 0; t < 20; ++t) {
    VectorXd v = rand_vec(4, 100 + t);
    VectorXd dy = d.cwiseProduct(v);
    const double g = shanno_phua_scale(v, dy);
    CHECK(g >= 1.0 / 4.0 - 1e-12);
    CHECK(g <= 1.0 / 0.5 + 1e-12);
  }

  VectorXd neg = -s;
  CHECK_THROWS_AS(shanno_phua_scale(s, neg), std::invalid_argument);
}

TEST_CASE("pair admission") {
  LbfgsMemory mem(5);
  VectorXd s(2), y(2);
  s << 1.0, 0.0;
  CHECK(mem.push(s, s));
  CHECK(mem.size() == 1);

  y = -s;  // negative curvature: rejected, memory unchanged
  CHECK(!mem.push(s, y));
  CHECK(mem.size() == 1);

  y << 0.0, 1.0;  // orthogonal: s'y = 0 fails the threshold too
  CHECK(!mem.push(s, y));
  CHECK(mem.size() == 1);
}

TEST_CASE("empty and trivial memories fall back to steepest descent") {
  LbfgsMemory mem(4);
  VectorXd g(3);
  g << 1.0, -2.0, 0.5;
  CHECK((mem.direction(g) + g).norm() == 0.0);
  CHECK(mem.scale() == 1.0);

  // a single s = y pair implies H = I along every direction
  VectorXd u(3);
  u << 0.5, 1.0, -0.25;
  REQUIRE(mem.push(u, u));
  CHECK(mem.scale() == 1.0);
  for (int t = 0; t < 10; ++t) {
    VectorXd q = rand_vec(3, 200 + t);
    CHECK((mem.direction(q) + q).norm() <= 1e-14 * q.norm());
  }
}

TEST_CASE("capacity eviction keeps the newest pairs") {
  LbfgsMemory mem(2);
  std::vector<CurvaturePair> pairs;
  for (int t = 0; t < 3; ++t) {
    VectorXd s = rand_vec(4, 300 + t);
    VectorXd y = s + 0.5 * rand_vec(4, 310 + t);
    if (s.dot(y) <= 0) y = s;  // keep the pair admissible
    REQUIRE(mem.push(s, y));
    pairs.push_back({s, y});
  }
  CHECK(mem.size() == 2);
  CHECK(mem.capacity() == 2);

  // direction must match the dense oracle over the two newest pairs
  std::vector<CurvaturePair> newest(pairs.begin() + 1, pairs.end());
  VectorXd g = rand_vec(4, 320);
  VectorXd lib = mem.direction(g);
  VectorXd oracle = dense_bfgs_direction(newest, g, mem.scale());
  CHECK((lib - oracle).norm() <= 1e-12 * oracle.norm());

  // and not match the oracle that still includes the evicted pair
  VectorXd stale = dense_bfgs_direction(pairs, g, mem.scale());
  CHECK((lib - stale).norm() > 1e-10 * stale.norm());
}

TEST_CASE("two-loop recursion equals dense inverse BFGS along a run") {
  // quadratic f(x) = 1/2 x'Qx - b'x with exact line searches; every iterate
  // compares the two-loop direction against the dense update oracle
  for (int n : {3, 10}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) a.row(i) = rand_vec(n, 400 + n * 10 + i).transpose();
    Eigen::MatrixXd q = a.transpose() * a + Eigen::MatrixXd::Identity(n, n);
    VectorXd b = rand_vec(n, 500 + n);

    LbfgsMemory mem(20);  // capacity above the iteration count: nothing evicted
    std::vector<CurvaturePair> pairs;
    VectorXd x = VectorXd::Zero(n);
    for (int k = 0; k < 15; ++k) {
      VectorXd g = q * x - b;
      if (g.norm() < 1e-14) break;
      VectorXd lib = mem.direction(g);
      VectorXd oracle = dense_bfgs_direction(pairs, g, mem.scale());
      REQUIRE((lib - oracle).norm() <= 1e-8 * std::max(1.0, oracle.norm()));

      const double denom = lib.dot(q * lib);
      REQUIRE(denom > 0.0);
      const double alpha = -g.dot(lib) / denom;
      VectorXd s = alpha * lib;
      VectorXd y = q * s;
      if (mem.push(s, y)) pairs.push_back({s, y});
      x += s;
    }
    CHECK((q * x - b).norm() <= 1e-6 * b.norm());
  }
}

TEST_CASE("directions are descent directions") {
  LbfgsMemory mem(6);
  for (int t = 0; t < 6; ++t) {
    VectorXd s = rand_vec(5, 600 + t);
    VectorXd y = s + 0.3 * rand_vec(5, 610 + t);
    if (s.dot(y) <= 1e-8) continue;
    mem.push(s, y);
  }
  REQUIRE(mem.size() > 0);
  for (int t = 0; t < 20; ++t) {
    VectorXd g = rand_vec(5, 700 + t);
    CHECK(g.dot(mem.direction(g)) < 0.0);
  }
}

TEST_CASE("armijo backtracking") {
  // phi(a) = (1 - 2a)^2: the unit step returns to phi0 and must be rejected,
  // the interpolated step lands near the minimizer and passes
  auto phi = [](double a) { return (1.0 - 2.0 * a) * (1.0 - 2.0 * a); };
  LineSearchResult r = armijo_search(phi, 1.0, -4.0, 1.0);
  CHECK(r.ok());
  CHECK(r.evaluations == 2);
  CHECK(r.alpha >= 0.1);
  CHECK(r.alpha <= 0.9);
  CHECK(phi(r.alpha) < 1.0 + 1e-4 * r.alpha * -4.0);
  CHECK(r.f == phi(r.alpha));

  // a linear decrease accepts the first trial
  auto line = [](double a) { return 1.0 - a; };
  r = armijo_search(line, 1.0, -1.0, 1.0);
  CHECK(r.ok());
  CHECK(r.alpha == 1.0);
  CHECK(r.evaluations == 1);

  // sufficient decrease holds on replay across random convex cases
  for (int t = 0; t < 10; ++t) {
    CounterRng rng(0xA3A3, static_cast<std::uint64_t>(t));
    const double opt = rng.uniform(0.2, 2.0);
    const double curv = rng.uniform(0.5, 4.0);
    auto f = [&](double a) { return 0.5 * curv * (a - opt) * (a - opt); };
    const double phi0 = f(0.0);
    const double slope0 = -curv * opt;
    LineSearchResult s = armijo_search(f, phi0, slope0, 1.0);
    REQUIRE(s.ok());
    CHECK(f(s.alpha) < phi0 + 1e-4 * s.alpha * slope0);
  }
}

TEST_CASE("armijo failure modes") {
  // flat phi with a claimed negative slope: every trial fails, and the
  // interpolants cut by a moderate factor so the backtrack cap fires first
  auto flat = [](double) { return 1.0; };
  LineSearchResult r = armijo_search(flat, 1.0, -1.0, 1.0, 1e-4, 30);
  CHECK(!r.ok());
  CHECK(r.status == LineSearchResult::Status::MaxBacktracks);
  CHECK(r.evaluations == 31);

  // an increasing phi drives aggressive cuts; with a huge backtrack budget
  // the trial step underflows instead
  auto bad = [](double a) { return 1.0 + a; };
  r = armijo_search(bad, 1.0, -1.0, 1.0, 1e-4, 100000);
  CHECK(!r.ok());
  CHECK(r.status == LineSearchResult::Status::StepUnderflow);
  CHECK(r.evaluations < 100);

  CHECK_THROWS_AS(armijo_search(bad, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(armijo_search(bad, 1.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("wolfe search") {
  // phi(a) = 1/2 (a - 1)^2: the unit step is the exact minimizer and
  // satisfies both conditions immediately
  auto quad = [](double a) { return std::make_pair(0.5 * (a - 1.0) * (a - 1.0), a - 1.0); };
  LineSearchResult r = wolfe_search(quad, 0.5, -1.0, 1.0);
  CHECK(r.ok());
  CHECK(r.alpha == 1.0);
  CHECK(r.evaluations == 1);
  CHECK(r.f == 0.0);

  // steep exponential with a tight curvature threshold forces a zoom; the
  // accepted step satisfies both conditions on replay
  auto steep = [](double a) { return std::make_pair(std::exp(a) - 2.0 * a, std::exp(a) - 2.0); };
  r = wolfe_search(steep, 1.0, -1.0, 1.0, 1e-4, 0.1);
  CHECK(r.ok());
  CHECK(r.evaluations <= 25);
  auto [fv, fd] = steep(r.alpha);
  CHECK(fv <= 1.0 + 1e-4 * r.alpha * -1.0);
  CHECK(std::abs(fd) <= 0.1 * 1.0);
  CHECK(r.f == fv);
  CHECK(r.slope == fd);

  // an essentially flat function never meets sufficient decrease
  auto flat = [](double a) { return std::make_pair(1.0 - 1e-9 * a, -1e-9); };
  r = wolfe_search(flat, 1.0, -1.0, 1.0);
  CHECK(!r.ok());
  CHECK(r.evaluations <= 25);

  CHECK_THROWS_AS(wolfe_search(quad, 0.5, 1.0, 1.0), std::invalid_argument);
}
