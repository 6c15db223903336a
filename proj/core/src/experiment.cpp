#include "growbatch/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "growbatch/data_io.hpp"
#include "growbatch/optimize.hpp"
#include "growbatch/problems.hpp"
#include "growbatch/verify.hpp"

namespace growbatch {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Environment failures (unwritable output, ...) share the config exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_run_name(const std::string& label, std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "_s%" PRIu64 ".csv", seed);
  return label + buf;
}

std::string fmt_sweep_name(const std::string& label, double step, std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "_step%g_s%" PRIu64 ".csv", step, seed);
  return label + buf;
}

/// Labels name files; anything outside [A-Za-z0-9._-] becomes '-'.
std::string sanitize_label(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

RunResult execute_method(const SumProblem& p, const MethodSpec& m, const ExperimentConfig& cfg,
                         std::uint64_t seed, double step_override) {
  const VectorXd x0 = VectorXd::Zero(p.dim());
  switch (m.kind) {
    case MethodSpec::Kind::ControlledErrorGd: {
      ControlledErrorOptions opt;
      opt.iterations = m.iterations > 0 ? m.iterations : cfg.pass_budget;
      opt.noise = m.noise;
      opt.mode = m.noise_mode;
      opt.seed = seed;
      opt.true_policy = cfg.true_policy;
      return run_controlled_error_gd(p, x0, opt);
    }
    case MethodSpec::Kind::StochasticGd: {
      StochasticGdOptions opt;
      opt.step = std::isnan(step_override) ? m.step : step_override;
      opt.decay = m.decay;
      opt.pass_budget = cfg.pass_budget;
      opt.seed = seed;
      opt.true_policy = cfg.true_policy;
      return run_stochastic_gd(p, x0, opt);
    }
    case MethodSpec::Kind::HybridQn: {
      HybridQnOptions opt;
      opt.schedule = m.schedule;
      opt.sample_mode = m.sample_mode;
      opt.memory = m.memory;
      opt.eta = m.eta;
      opt.pass_budget = cfg.pass_budget;
      opt.max_iterations = m.iterations;
      opt.seed = seed;
      opt.true_policy = cfg.true_policy;
      return run_hybrid_qn(p, x0, opt);
    }
    case MethodSpec::Kind::DeterministicQn: {
      DeterministicQnOptions opt;
      opt.memory = m.memory;
      opt.line_search = m.line_search;
      opt.c1 = m.c1;
      opt.c2 = m.c2;
      opt.eta = m.eta;
      opt.pass_budget = cfg.pass_budget;
      opt.max_iterations = m.iterations;
      opt.true_policy = cfg.true_policy;
      return run_deterministic_qn(p, x0, opt);
    }
    case MethodSpec::Kind::SampledGd: {
      SampledGdOptions opt;
      opt.schedule = m.schedule;
      opt.sample_mode = m.sample_mode;
      opt.iterations =
          m.iterations > 0 ? m.iterations : std::numeric_limits<std::int64_t>::max();
      opt.pass_budget = cfg.pass_budget;
      opt.seed = seed;
      opt.true_policy = cfg.true_policy;
      return run_sampled_gd(p, x0, opt);
    }
  }
  throw std::logic_error("unhandled method kind");
}

RunRecord write_run(const SumProblem& p, const ExperimentConfig& cfg, const MethodSpec& m,
                    std::uint64_t seed, double step_override, const std::string& file_name) {
  const RunResult r = execute_method(p, m, cfg, seed, step_override);
  const fs::path path = fs::path(cfg.out_dir) / file_name;
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open trace file for writing: " + path.string());
    r.trace.write_csv(out);
    out.flush();
    if (!out) throw IoError("failed writing trace file: " + path.string());
  }
  RunRecord rec;
  rec.method = m.label;
  rec.seed = seed;
  rec.step = !std::isnan(step_override)
                 ? step_override
                 : (m.kind == MethodSpec::Kind::StochasticGd ? m.step : kNaN);
  rec.trace_file = file_name;
  rec.rows = static_cast<std::int64_t>(r.trace.rows.size());
  if (!r.trace.rows.empty()) {
    rec.cum_evals = r.trace.rows.back().cum_evals;
    rec.eff_passes = r.trace.rows.back().eff_passes;
  }
  rec.f_final = std::isnan(r.f_final) ? p.full_value(r.x) : r.f_final;
  if (p.constants().f_star) rec.gap = rec.f_final - *p.constants().f_star;
  return rec;
}

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records,
                       bool with_rank) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open summary file for writing: " + path);
  if (with_rank) out << "rank,";
  out << "method,seed,step,trace_file,rows,cum_evals,eff_passes,f_final,gap\n";
  char buf[512];
  int rank = 0;
  double prev_step = kNaN;
  for (const RunRecord& r : records) {
    // records arrive grouped by grid step in ranking order
    if (with_rank && !(r.step == prev_step)) {
      ++rank;
      prev_step = r.step;
    }
    if (with_rank) out << rank << ',';
    std::snprintf(buf, sizeof buf,
                  "%s,%" PRIu64 ",%.17g,%s,%" PRId64 ",%" PRId64 ",%.17g,%.17g,%.17g\n",
                  r.method.c_str(), r.seed, r.step, r.trace_file.c_str(), r.rows, r.cum_evals,
                  r.eff_passes, r.f_final, r.gap);
    out << buf;
  }
  out.flush();
  if (!out) throw IoError("failed writing summary file: " + path);
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir.empty() ? "." : cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
}

void print_stats(const ExperimentConfig& cfg, std::ostream& out) {
  const ProblemSpec& ps = cfg.problem;
  out << "model: " << to_string(ps.model) << "\n";
  out << "lambda: " << ps.lambda << "\n";
  if (ps.model != ProblemSpec::Model::Quadratic) {
    Dataset ds;
    if (ps.source == ProblemSpec::Source::File) {
      ds = parse_libsvm_file(ps.path, ps.declared_n);
      out << "source: " << ps.path << "\n";
    } else if (ps.model == ProblemSpec::Model::Multinomial) {
      ds = generate_synthetic_multinomial(ps.m, ps.features, ps.classes, ps.sparsity,
                                          ps.data_seed, ps.separation)
               .data;
      out << "source: synthetic (seed " << ps.data_seed << ")\n";
    } else {
      ds = generate_synthetic_logistic(ps.m, ps.features, ps.sparsity, ps.data_seed,
                                       ps.separation)
               .data;
      out << "source: synthetic (seed " << ps.data_seed << ")\n";
    }
    const DatasetStats st = dataset_stats(ds);
    out << "rows: " << st.m << "\n";
    out << "features: " << st.n << "\n";
    out << "nonzeros: " << st.nnz << " (density "
        << (st.m > 0 && st.n > 0
                ? static_cast<double>(st.nnz) / (static_cast<double>(st.m) * st.n)
                : 0.0)
        << ")\n";
    out << "max |value|: " << st.max_abs << "\n";
    out << "labels: +1 x " << st.positive << ", -1 x " << st.negative << ", other x "
        << st.other << "\n";
    if (st.classes > 0) out << "classes: " << st.classes << "\n";
  }
  const std::unique_ptr<SumProblem> p = build_problem(ps);
  out << "terms: " << p->term_count() << "\n";
  out << "dimension: " << p->dim() << "\n";
  const ProblemConstants& c = p->constants();
  if (c.L) out << "L bound: " << *c.L << "\n";
  if (c.mu) out << "mu: " << *c.mu << "\n";
  if (c.mu && c.L && *c.mu > 0) out << "condition number: " << *c.L / *c.mu << "\n";
  if (c.f_star) out << "f*: " << *c.f_star << "\n";
}

}  // namespace

const double kSweepGrid[7] = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ensure_out_dir(cfg);
  const std::unique_ptr<SumProblem> p = build_problem(cfg.problem);
  ExperimentResult result;
  for (const MethodSpec& m : cfg.methods) {
    for (std::uint64_t seed : cfg.seeds) {
      const std::string name = fmt_run_name(sanitize_label(m.label), seed);
      result.records.push_back(write_run(*p, cfg, m, seed, kNaN, name));
    }
  }
  result.summary_file = (fs::path(cfg.out_dir) / "summary.csv").string();
  write_records_csv(result.summary_file, result.records, false);
  return result;
}

ExperimentResult sweep_experiment(const ExperimentConfig& cfg, int threads) {
  const MethodSpec* stoch = nullptr;
  for (const MethodSpec& m : cfg.methods) {
    if (m.kind == MethodSpec::Kind::StochasticGd) {
      stoch = &m;
      break;
    }
  }
  if (stoch == nullptr)
    throw ConfigError("config: sweep needs a [method ...] block with type = stochastic-gd");
  ensure_out_dir(cfg);
  const std::unique_ptr<SumProblem> p = build_problem(cfg.problem);

  struct Job {
    int grid = 0;
    std::uint64_t seed = 0;
    std::string file;
  };
  std::vector<Job> jobs;
  const std::string label = sanitize_label(stoch->label);
  for (int g = 0; g < 7; ++g)
    for (std::uint64_t seed : cfg.seeds)
      jobs.push_back({g, seed, fmt_sweep_name(label, kSweepGrid[g], seed)});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        records[j] =
            write_run(*p, cfg, *stoch, jobs[j].seed, kSweepGrid[jobs[j].grid], jobs[j].file);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  // Rank grid steps by mean final objective across seeds; NaN sorts last.
  const std::size_t per_step = cfg.seeds.size();
  double mean_f[7];
  for (int g = 0; g < 7; ++g) {
    double sum = 0.0;
    for (std::size_t s = 0; s < per_step; ++s) sum += records[g * per_step + s].f_final;
    mean_f[g] = sum / static_cast<double>(per_step);
  }
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = std::isnan(mean_f[a]) ? std::numeric_limits<double>::infinity()
                                            : mean_f[a];
    const double fb = std::isnan(mean_f[b]) ? std::numeric_limits<double>::infinity()
                                            : mean_f[b];
    if (fa != fb) return fa < fb;
    return a < b;
  });

  ExperimentResult result;
  result.records.reserve(records.size());
  for (int g : order)
    for (std::size_t s = 0; s < per_step; ++s)
      result.records.push_back(records[g * per_step + s]);
  result.summary_file = (fs::path(cfg.out_dir) / "ranking.csv").string();
  write_records_csv(result.summary_file, result.records, true);
  return result;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"growing-batch gradient method experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string suite = "all";
  std::uint64_t seed = 0;
  int threads = 1;

  CLI::App* c_run = app.add_subcommand("run", "execute every configured method, write traces");
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "step-size grid for the configured stochastic method");
  CLI::App* c_stats = app.add_subcommand("stats", "describe the configured problem and data");
  CLI::App* c_verify =
      app.add_subcommand("verify-rates", "run the convergence/sampling verification suites");

  CLI::Option* seed_opt = nullptr;
  for (CLI::App* cmd : {c_run, c_sweep, c_stats}) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--out", out_dir, "output directory override");
  }
  seed_opt = c_run->add_option("--seed", seed, "replace the configured seed list");
  c_sweep->add_option("--seed", seed, "replace the configured seed list");
  c_sweep->add_option("--threads", threads, "parallel grid workers")
      ->check(CLI::PositiveNumber);
  c_verify->add_option("--suite", suite,
                       "lemma | strong | weak | strong-expected | sublinear | sampling | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_verify->parsed()) {
      std::vector<std::string> names;
      if (suite == "all")
        names = verify_suite_names();
      else
        names.push_back(suite);
      bool all_pass = true;
      for (const std::string& name : names) {
        const SuiteReport report = run_verify_suite(name);
        print_report(report, std::cout);
        all_pass = all_pass && report.pass();
      }
      return all_pass ? 0 : 1;
    }

    ExperimentConfig cfg = ExperimentConfig::load_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const bool seed_given = (c_run->parsed() && seed_opt->count() > 0) ||
                            (c_sweep->parsed() && c_sweep->count("--seed") > 0);
    if (seed_given) cfg.seeds = {seed};

    if (c_stats->parsed()) {
      print_stats(cfg, std::cout);
      return 0;
    }
    if (c_run->parsed()) {
      const ExperimentResult res = run_experiment(cfg);
      std::cout << res.records.size() << " runs written under " << cfg.out_dir
                << "; summary at " << res.summary_file << "\n";
      return 0;
    }
    const ExperimentResult res = sweep_experiment(cfg, threads);
    std::cout << "ranking written to " << res.summary_file << "; best steps:";
    const std::size_t per_step = cfg.seeds.size();
    for (std::size_t i = 0; i < res.records.size() && i < 3 * per_step; i += per_step)
      std::cout << " " << res.records[i].step;
    std::cout << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace growbatch
