#include <sstream>
#include <string>

#include "doctest.h"
#include "growbatch/config.hpp"
#include "growbatch/problems.hpp"

using namespace growbatch;

namespace {

ExperimentConfig load_text(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::load(ConfigFile::parse(in));
}

void expect_error(const std::string& text, const std::string& needle) {
  try {
    load_text(text);
    FAIL("expected a config error for:\n" << text);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(needle) != std::string::npos,
                  "message '" << what << "' misses '" << needle << "'");
  }
}

const char* kFullConfig = R"(# experiment description
[problem]
model = binary-logistic
source = synthetic
lambda = 0.01
m = 500
features = 12
sparsity = 0.4
separation = 3.5
data_seed = 99

[run]
pass_budget = 25
seeds = 1, 2, 3
out = results
true_policy = every-iteration

[method hybrid]
type = hybrid-qn
schedule = paper
b0 = 2
memory = 8
eta = 1e-3
sample_mode = prefix

[method sgd]
type = stochastic-gd
step = 0.05
decay = true

[method reference]
type = deterministic-qn
line_search = wolfe
c1 = 1e-4
c2 = 0.8

[method noisy]
type = controlled-error-gd
noise = geometric
noise_b0 = 0.5
noise_gamma = 0.7
noise_mode = expectation
iterations = 300

[method grown]
type = sampled-gd
schedule = geometric-det
gamma = 0.85
)";

}  // namespace

TEST_CASE("full configuration round-trip") {
  ExperimentConfig cfg = load_text(kFullConfig);

  CHECK(cfg.problem.model == ProblemSpec::Model::BinaryLogistic);
  CHECK(cfg.problem.source == ProblemSpec::Source::Synthetic);
  CHECK(cfg.problem.lambda == 0.01);
  CHECK(cfg.problem.m == 500);
  CHECK(cfg.problem.features == 12);
  CHECK(cfg.problem.sparsity == 0.4);
  CHECK(cfg.problem.separation == 3.5);
  CHECK(cfg.problem.data_seed == 99);

  CHECK(cfg.pass_budget == 25);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.true_policy == TruePolicy::EveryIteration);

  REQUIRE(cfg.methods.size() == 5);
  CHECK(cfg.methods[0].label == "hybrid");
  CHECK(cfg.methods[0].kind == MethodSpec::Kind::HybridQn);
  CHECK(cfg.methods[0].schedule.kind == Schedule::Kind::PaperLinear);
  CHECK(cfg.methods[0].schedule.b0 == 2);
  CHECK(cfg.methods[0].memory == 8);
  CHECK(cfg.methods[0].eta == 1e-3);
  CHECK(cfg.methods[0].sample_mode == SampleMode::Prefix);

  CHECK(cfg.methods[1].kind == MethodSpec::Kind::StochasticGd);
  CHECK(cfg.methods[1].step == 0.05);
  CHECK(cfg.methods[1].decay);

  CHECK(cfg.methods[2].kind == MethodSpec::Kind::DeterministicQn);
  CHECK(cfg.methods[2].line_search == LineSearchKind::Wolfe);
  CHECK(cfg.methods[2].c2 == 0.8);

  CHECK(cfg.methods[3].kind == MethodSpec::Kind::ControlledErrorGd);
  CHECK(cfg.methods[3].noise.kind == NoiseBoundSequence::Kind::Geometric);
  CHECK(cfg.methods[3].noise.b0 == 0.5);
  CHECK(cfg.methods[3].noise.gamma == 0.7);
  CHECK(cfg.methods[3].noise_mode == NoiseMode::Expectation);
  CHECK(cfg.methods[3].iterations == 300);

  CHECK(cfg.methods[4].kind == MethodSpec::Kind::SampledGd);
  CHECK(cfg.methods[4].schedule.kind == Schedule::Kind::GeometricDet);
  CHECK(cfg.methods[4].schedule.gamma == 0.85);
}

TEST_CASE("defaults fill everything optional") {
  ExperimentConfig cfg = load_text("[problem]\nmodel = quadratic\n[method hybrid-qn]\n");
  CHECK(cfg.problem.model == ProblemSpec::Model::Quadratic);
  CHECK(cfg.pass_budget == 10);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  CHECK(cfg.true_policy == TruePolicy::PassBoundary);
  REQUIRE(cfg.methods.size() == 1);
  // the method type defaults to the section name
  CHECK(cfg.methods[0].kind == MethodSpec::Kind::HybridQn);
  CHECK(cfg.methods[0].label == "hybrid-qn");
  CHECK(cfg.methods[0].memory == 10);
}

TEST_CASE("config error paths name the offending key") {
  expect_error("[problem]\nmodel = quadratic\nfrobs = 1\n[method hybrid-qn]\n",
               "[problem].frobs");
  expect_error("[problem]\nmodel = nonsense\n[method hybrid-qn]\n", "quadratic");
  expect_error("[problem]\nmodel = quadratic\nlambda = -1\n[method hybrid-qn]\n",
               "[problem].lambda");
  expect_error("[problem]\nmodel = quadratic\nlambda = 0.1\nlambda = 0.2\n[method hybrid-qn]\n",
               "twice");
  expect_error("[problem]\nmodel = quadratic\n[weird]\n[method hybrid-qn]\n", "[weird]");
  expect_error("[problem]\nmodel = quadratic\n", "method");
  expect_error("[problem]\nmodel = quadratic\n[run]\npass_budget = 0\n[method hybrid-qn]\n",
               "[run].pass_budget");
  expect_error("[problem]\nmodel = quadratic\n[run]\nseeds =\n[method hybrid-qn]\n",
               "[run].seeds");
  expect_error(
      "[problem]\nmodel = quadratic\n[method a]\ntype = hybrid-qn\n[method a]\ntype = "
      "stochastic-gd\n",
      "duplicate");
  expect_error("[problem]\nmodel = quadratic\n[method x]\ntype = warp-drive\n", "[method x].type");
  expect_error("[problem]\nmodel = binary-logistic\nsparsity = 1.5\n[method hybrid-qn]\n",
               "[problem].sparsity");
  expect_error("[problem]\nmodel = quadratic\nquad_min = 3\nquad_max = 1\n[method hybrid-qn]\n",
               "[problem].quad_max");
  expect_error(
      "[problem]\nmodel = binary-logistic\nsource = file\npath = /no/such/file.txt\n[method "
      "hybrid-qn]\n",
      "[problem].path");
  expect_error("[problem]\nmodel = quadratic\n[method sgd]\ntype = stochastic-gd\nstep = 0\n",
               "[method sgd].step");
  expect_error(
      "[problem]\nmodel = quadratic\n[method h]\ntype = hybrid-qn\nschedule = geometric-det\n"
      "gamma = 1.5\n",
      "gamma");
  expect_error("[method hybrid-qn]\n", "[problem]");

  // bad enum errors enumerate the alternatives
  try {
    load_text("[problem]\nmodel = quadratic\n[run]\ntrue_policy = sometimes\n[method hybrid-qn]\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("every-iteration") != std::string::npos);
    CHECK(what.find("pass-boundary") != std::string::npos);
    CHECK(what.find("never") != std::string::npos);
  }
}

TEST_CASE("malformed syntax is rejected") {
  std::istringstream no_section("key = 1\n");
  CHECK_THROWS_AS(ConfigFile::parse(no_section), ConfigError);
  std::istringstream unterminated("[problem\n");
  CHECK_THROWS_AS(ConfigFile::parse(unterminated), ConfigError);
  std::istringstream no_equals("[problem]\njust some words\n");
  CHECK_THROWS_AS(ConfigFile::parse(no_equals), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load_file("/no/such/config.ini"), ConfigError);
}

TEST_CASE("build_problem wires the quadratic constants") {
  ExperimentConfig cfg = load_text(
      "[problem]\nmodel = quadratic\nlambda = 0.1\nquad_dim = 6\nquad_terms = 12\n"
      "quad_min = 0.5\nquad_max = 2\nquad_shift = 1\n[method hybrid-qn]\n");
  auto p = build_problem(cfg.problem);
  REQUIRE(p);
  CHECK(p->term_count() == 12);
  CHECK(p->dim() == 6);
  CHECK(p->lambda() == 0.1);
  REQUIRE(p->constants().mu);
  REQUIRE(p->constants().L);
  CHECK(*p->constants().mu == doctest::Approx(0.6));
  CHECK(*p->constants().L == doctest::Approx(2.1));
  CHECK(p->constants().f_star.has_value());
}

TEST_CASE("build_problem certifies synthetic logistic curvature") {
  ExperimentConfig cfg = load_text(
      "[problem]\nmodel = binary-logistic\nsource = synthetic\nlambda = 0.05\nm = 60\n"
      "features = 8\nsparsity = 0.5\nseparation = 3\ndata_seed = 5\n[method hybrid-qn]\n");
  auto p = build_problem(cfg.problem);
  REQUIRE(p);
  CHECK(p->term_count() == 60);
  CHECK(p->dim() == 8);
  REQUIRE(p->constants().L);
  CHECK(*p->constants().L > 0.05);  // spectral part on top of the ridge
  REQUIRE(p->constants().mu);
  CHECK(*p->constants().mu == 0.05);

  // deterministic rebuild: same spec, same dataset, same evaluation
  auto q = build_problem(cfg.problem);
  VectorXd x = VectorXd::LinSpaced(8, -0.5, 0.5);
  CHECK(p->full_value(x) == q->full_value(x));
}

TEST_CASE("multinomial synthetic problems come out consistent") {
  ExperimentConfig cfg = load_text(
      "[problem]\nmodel = multinomial\nsource = synthetic\nlambda = 0.01\nm = 40\n"
      "features = 5\nclasses = 4\nsparsity = 0.6\nseparation = 2\n[method hybrid-qn]\n");
  auto p = build_problem(cfg.problem);
  REQUIRE(p);
  CHECK(p->term_count() == 40);
  CHECK(p->dim() == 20);  // classes * features
  CHECK(p->full_value(VectorXd::Zero(20)) == doctest::Approx(std::log(4.0)));
}
