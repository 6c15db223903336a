#include "growbatch/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "growbatch/data_io.hpp"
#include "growbatch/problems.hpp"

namespace growbatch {

namespace {

std::string trim(std::string_view s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string_view::npos) return {};
  const auto to = s.find_last_not_of(" \t\r");
  return std::string(s.substr(from, to - from + 1));
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config: " + path + ": " + message);
}

/// Typed access to one section.  Every read marks its key; done() rejects
/// anything left over, so misspelled keys cannot silently fall back to
/// defaults.
class Reader {
 public:
  explicit Reader(const ConfigSection& section) : section_(section) {}

  std::string path(const std::string& key) const { return "[" + section_.header + "]." + key; }

  bool has(const std::string& key) const {
    return std::any_of(section_.entries.begin(), section_.entries.end(),
                       [&](const auto& e) { return e.first == key; });
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const std::string* v = raw(key);
    return v ? *v : fallback;
  }

  std::string required(const std::string& key) {
    const std::string* v = raw(key);
    if (!v) fail(path(key), "required key is missing");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const std::string* v = raw(key);
    return v ? to_number(key, *v) : fallback;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const std::string* v = raw(key);
    return v ? to_integer(key, *v) : fallback;
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
    const std::string* v = raw(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    if (!from_chars_all(*v, out)) fail(path(key), "expected an unsigned integer, got '" + *v + "'");
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    const std::string* v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    fail(path(key), "expected a boolean, got '" + *v + "'");
  }

  std::vector<std::uint64_t> seed_list(const std::string& key,
                                       const std::vector<std::uint64_t>& fallback) {
    const std::string* v = raw(key);
    if (!v) return fallback;
    std::vector<std::uint64_t> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::uint64_t s = 0;
      if (!from_chars_all(item, s)) fail(path(key), "expected seed integers, got '" + item + "'");
      out.push_back(s);
    }
    if (out.empty()) fail(path(key), "empty seed list");
    return out;
  }

  /// Maps a token through (token, value) choices; error message lists them.
  template <class T>
  T choice(const std::string& key, const std::vector<std::pair<std::string, T>>& options,
           const T& fallback) {
    const std::string* v = raw(key);
    if (!v) return fallback;
    for (const auto& [token, value] : options)
      if (*v == token) return value;
    std::string expected;
    for (const auto& [token, value] : options)
      expected += (expected.empty() ? "" : ", ") + token;
    fail(path(key), "unknown value '" + *v + "' (expected one of: " + expected + ")");
  }

  void done() const {
    for (const auto& [key, value] : section_.entries)
      if (!used_.count(key)) fail(path(key), "unknown key");
  }

 private:
  const std::string* raw(const std::string& key) {
    const std::string* found = nullptr;
    for (const auto& [k, v] : section_.entries) {
      if (k != key) continue;
      if (found) fail(path(key), "key appears twice");
      found = &v;
    }
    if (found) used_.insert(key);
    return found;
  }

  template <class T>
  static bool from_chars_all(const std::string& s, T& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  }

  double to_number(const std::string& key, const std::string& s) {
    double out = 0.0;
    if (!from_chars_all(s, out)) fail(path(key), "expected a number, got '" + s + "'");
    return out;
  }

  std::int64_t to_integer(const std::string& key, const std::string& s) {
    std::int64_t out = 0;
    if (!from_chars_all(s, out)) fail(path(key), "expected an integer, got '" + s + "'");
    return out;
  }

  const ConfigSection& section_;
  std::set<std::string> used_;
};

ProblemSpec load_problem(const ConfigSection& section) {
  Reader r(section);
  ProblemSpec spec;
  spec.model = r.choice<ProblemSpec::Model>(
      "model",
      {{"binary-logistic", ProblemSpec::Model::BinaryLogistic},
       {"multinomial", ProblemSpec::Model::Multinomial},
       {"least-squares", ProblemSpec::Model::LeastSquares},
       {"quadratic", ProblemSpec::Model::Quadratic}},
      ProblemSpec::Model::BinaryLogistic);
  spec.source = r.choice<ProblemSpec::Source>(
      "source", {{"synthetic", ProblemSpec::Source::Synthetic}, {"file", ProblemSpec::Source::File}},
      ProblemSpec::Source::Synthetic);
  spec.lambda = r.number("lambda", spec.lambda);
  if (spec.lambda < 0.0) fail(r.path("lambda"), "lambda must be >= 0");

  spec.path = r.text("path", spec.path);
  spec.declared_n = r.integer("n", spec.declared_n);
  if (spec.declared_n < 0) fail(r.path("n"), "n must be >= 0");

  spec.m = r.integer("m", spec.m);
  spec.features = r.integer("features", spec.features);
  spec.classes = static_cast<int>(r.integer("classes", spec.classes));
  spec.sparsity = r.number("sparsity", spec.sparsity);
  spec.separation = r.number("separation", spec.separation);
  spec.data_seed = r.uinteger("data_seed", spec.data_seed);

  spec.quad_dim = static_cast<int>(r.integer("quad_dim", spec.quad_dim));
  spec.quad_terms = r.integer("quad_terms", spec.quad_terms);
  spec.quad_min = r.number("quad_min", spec.quad_min);
  spec.quad_max = r.number("quad_max", spec.quad_max);
  spec.quad_shift = r.number("quad_shift", spec.quad_shift);

  if (spec.model == ProblemSpec::Model::Quadratic) {
    if (spec.quad_dim < 1) fail(r.path("quad_dim"), "must be >= 1");
    if (spec.quad_terms < 1) fail(r.path("quad_terms"), "must be >= 1");
    if (spec.quad_min < 0.0) fail(r.path("quad_min"), "must be >= 0");
    if (spec.quad_max < spec.quad_min) fail(r.path("quad_max"), "must be >= quad_min");
    if (!(spec.quad_max + spec.lambda > 0.0)) fail(r.path("quad_max"), "quad_max + lambda must be > 0");
  } else if (spec.source == ProblemSpec::Source::Synthetic) {
    if (spec.m < 1) fail(r.path("m"), "must be >= 1");
    if (spec.features < 1) fail(r.path("features"), "must be >= 1");
    if (spec.model == ProblemSpec::Model::Multinomial && spec.classes < 2)
      fail(r.path("classes"), "must be >= 2");
    if (!(spec.sparsity > 0.0) || spec.sparsity > 1.0) fail(r.path("sparsity"), "must be in (0, 1]");
    if (!(spec.separation >= 0.0)) fail(r.path("separation"), "must be >= 0");
  } else {
    if (spec.path.empty()) fail(r.path("path"), "required for source = file");
    if (!std::filesystem::exists(spec.path))
      fail(r.path("path"), "file not found '" + spec.path + "'");
  }
  r.done();
  return spec;
}

Schedule load_schedule(Reader& r) {
  Schedule s;
  s.kind = r.choice<Schedule::Kind>("schedule",
                                    {{"constant", Schedule::Kind::Constant},
                                     {"paper", Schedule::Kind::PaperLinear},
                                     {"geometric-det", Schedule::Kind::GeometricDet},
                                     {"geometric-stoch", Schedule::Kind::GeometricStoch},
                                     {"strong-rate", Schedule::Kind::StrongRate},
                                     {"add-one", Schedule::Kind::AddOne}},
                                    Schedule::Kind::PaperLinear);
  s.b0 = r.integer("b0", s.b0);
  if (s.b0 < 1) fail(r.path("b0"), "must be >= 1");
  s.gamma = r.number("gamma", s.gamma);
  if ((s.kind == Schedule::Kind::GeometricDet || s.kind == Schedule::Kind::GeometricStoch) &&
      !(s.gamma > 0.0 && s.gamma < 1.0))
    fail(r.path("gamma"), "must be in (0, 1)");
  s.rho = r.number("rho", s.rho);
  s.beta1 = r.number("beta1", s.beta1);
  s.beta2 = r.number("beta2", s.beta2);
  if (s.kind == Schedule::Kind::StrongRate) {
    if (!(s.rho > 0.0)) fail(r.path("rho"), "must be > 0 for the strong-rate schedule");
    if (s.beta1 < 0.0) fail(r.path("beta1"), "must be >= 0");
    if (s.beta2 < 1.0) fail(r.path("beta2"), "must be >= 1");
  }
  return s;
}

MethodSpec load_method(const ConfigSection& section) {
  Reader r(section);
  MethodSpec spec;
  spec.label = trim(section.header.substr(std::string("method").size()));
  if (spec.label.empty()) fail("[" + section.header + "]", "method sections need a name");

  // the method type comes from the "type" key, defaulting to the section name
  const std::string type_token = r.text("type", spec.label);
  if (type_token == "controlled-error-gd")
    spec.kind = MethodSpec::Kind::ControlledErrorGd;
  else if (type_token == "stochastic-gd")
    spec.kind = MethodSpec::Kind::StochasticGd;
  else if (type_token == "hybrid-qn")
    spec.kind = MethodSpec::Kind::HybridQn;
  else if (type_token == "deterministic-qn")
    spec.kind = MethodSpec::Kind::DeterministicQn;
  else if (type_token == "sampled-gd")
    spec.kind = MethodSpec::Kind::SampledGd;
  else
    fail(r.path("type"),
         "unknown method '" + type_token +
             "' (expected one of: controlled-error-gd, stochastic-gd, hybrid-qn, "
             "deterministic-qn, sampled-gd)");

  switch (spec.kind) {
    case MethodSpec::Kind::HybridQn:
      spec.schedule = load_schedule(r);
      spec.sample_mode = r.choice<SampleMode>(
          "sample_mode", {{"uniform", SampleMode::Uniform}, {"prefix", SampleMode::Prefix}},
          SampleMode::Uniform);
      spec.memory = static_cast<int>(r.integer("memory", spec.memory));
      if (spec.memory < 0) fail(r.path("memory"), "must be >= 0");
      spec.eta = r.number("eta", spec.eta);
      if (!(spec.eta > 0.0 && spec.eta < 1.0)) fail(r.path("eta"), "must be in (0, 1)");
      break;
    case MethodSpec::Kind::SampledGd:
      spec.schedule = load_schedule(r);
      spec.sample_mode = r.choice<SampleMode>(
          "sample_mode", {{"uniform", SampleMode::Uniform}, {"prefix", SampleMode::Prefix}},
          SampleMode::Uniform);
      spec.iterations = r.integer("iterations", spec.iterations);
      if (spec.iterations < 0) fail(r.path("iterations"), "must be >= 0");
      break;
    case MethodSpec::Kind::DeterministicQn:
      spec.memory = static_cast<int>(r.integer("memory", spec.memory));
      if (spec.memory < 0) fail(r.path("memory"), "must be >= 0");
      spec.line_search = r.choice<LineSearchKind>(
          "line_search", {{"wolfe", LineSearchKind::Wolfe}, {"armijo", LineSearchKind::Armijo}},
          LineSearchKind::Wolfe);
      spec.c1 = r.number("c1", spec.c1);
      spec.c2 = r.number("c2", spec.c2);
      spec.eta = r.number("eta", spec.eta);
      if (!(spec.c1 > 0.0 && spec.c1 < spec.c2 && spec.c2 < 1.0))
        fail(r.path("c1"), "needs 0 < c1 < c2 < 1");
      if (!(spec.eta > 0.0 && spec.eta < 1.0)) fail(r.path("eta"), "must be in (0, 1)");
      break;
    case MethodSpec::Kind::StochasticGd:
      spec.step = r.number("step", spec.step);
      if (!(spec.step > 0.0)) fail(r.path("step"), "must be > 0");
      spec.decay = r.flag("decay", spec.decay);
      break;
    case MethodSpec::Kind::ControlledErrorGd: {
      const auto kind = r.choice<NoiseBoundSequence::Kind>(
          "noise",
          {{"geometric", NoiseBoundSequence::Kind::Geometric},
           {"polynomial", NoiseBoundSequence::Kind::Polynomial},
           {"summable", NoiseBoundSequence::Kind::Summable},
           {"strong-rate", NoiseBoundSequence::Kind::StrongRate}},
          NoiseBoundSequence::Kind::Geometric);
      const double b0 = r.number("noise_b0", 0.25);
      const double gamma = r.number("noise_gamma", 0.8);
      const double power = r.number("noise_power", 2.0);
      const double rho = r.number("rho", 0.0);
      const auto pi = r.choice<NoiseBoundSequence::PiSource>(
          "pi",
          {{"oracle", NoiseBoundSequence::PiSource::OracleGap},
           {"gradient", NoiseBoundSequence::PiSource::GradientHeuristic},
           {"step", NoiseBoundSequence::PiSource::StepHeuristic}},
          NoiseBoundSequence::PiSource::OracleGap);
      switch (kind) {
        case NoiseBoundSequence::Kind::Geometric:
          spec.noise = NoiseBoundSequence::geometric(b0, gamma);
          break;
        case NoiseBoundSequence::Kind::Polynomial:
          spec.noise = NoiseBoundSequence::polynomial(b0, power);
          break;
        case NoiseBoundSequence::Kind::Summable:
          spec.noise = NoiseBoundSequence::summable(b0, power);
          break;
        case NoiseBoundSequence::Kind::StrongRate:
          if (!(rho > 0.0)) fail(r.path("rho"), "must be > 0 for strong-rate noise");
          spec.noise = NoiseBoundSequence::strong_rate(rho, pi);
          break;
      }
      spec.noise_mode = r.choice<NoiseMode>("noise_mode",
                                            {{"exact", NoiseMode::ExactNorm},
                                             {"expectation", NoiseMode::Expectation},
                                             {"biased", NoiseMode::Biased}},
                                            NoiseMode::ExactNorm);
      spec.iterations = r.integer("iterations", spec.iterations);
      if (spec.iterations < 0) fail(r.path("iterations"), "must be >= 0");
      break;
    }
  }
  r.done();
  return spec;
}

}  // namespace

const std::string* ConfigSection::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile file;
  std::string line;
  std::int64_t line_no = 0;
  ConfigSection* current = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError("config: line " + std::to_string(line_no) + ": unterminated section header");
      const std::string header = trim(std::string_view(body).substr(1, body.size() - 2));
      if (header.empty())
        throw ConfigError("config: line " + std::to_string(line_no) + ": empty section header");
      file.sections.push_back(ConfigSection{header, {}});
      current = &file.sections.back();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value, got '" +
                        body + "'");
    if (!current)
      throw ConfigError("config: line " + std::to_string(line_no) + ": key outside any [section]");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(line_no) + ": empty key");
    current->entries.emplace_back(key, value);
  }
  return file;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse(in);
}

const ConfigSection* ConfigFile::find(const std::string& header) const {
  for (const ConfigSection& s : sections)
    if (s.header == header) return &s;
  return nullptr;
}

ExperimentConfig ExperimentConfig::load(const ConfigFile& file) {
  ExperimentConfig cfg;
  const ConfigSection* problem = file.find("problem");
  if (!problem) throw ConfigError("config: missing [problem] section");
  cfg.problem = load_problem(*problem);

  if (const ConfigSection* run = file.find("run")) {
    Reader r(*run);
    cfg.pass_budget = r.integer("pass_budget", cfg.pass_budget);
    if (cfg.pass_budget < 1) fail(r.path("pass_budget"), "must be >= 1");
    cfg.seeds = r.seed_list("seeds", cfg.seeds);
    cfg.out_dir = r.text("out", cfg.out_dir);
    cfg.true_policy = r.choice<TruePolicy>("true_policy",
                                           {{"every-iteration", TruePolicy::EveryIteration},
                                            {"pass-boundary", TruePolicy::PassBoundary},
                                            {"never", TruePolicy::Never}},
                                           cfg.true_policy);
    r.done();
  }

  std::set<std::string> labels;
  for (const ConfigSection& s : file.sections) {
    if (s.header.rfind("method ", 0) != 0) continue;
    MethodSpec m = load_method(s);
    if (!labels.insert(m.label).second)
      throw ConfigError("config: [" + s.header + "]: duplicate method name '" + m.label + "'");
    cfg.methods.push_back(std::move(m));
  }
  if (cfg.methods.empty()) throw ConfigError("config: no [method ...] sections");

  for (const ConfigSection& s : file.sections)
    if (s.header != "problem" && s.header != "run" && s.header.rfind("method ", 0) != 0)
      throw ConfigError("config: unknown section [" + s.header + "]");
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  return load(ConfigFile::parse_file(path));
}

std::unique_ptr<SumProblem> build_problem(const ProblemSpec& spec) {
  using Model = ProblemSpec::Model;
  using Source = ProblemSpec::Source;

  if (spec.model == Model::Quadratic) {
    VectorXd d = VectorXd::LinSpaced(spec.quad_dim, spec.quad_min, spec.quad_max);
    const VectorXd shift = VectorXd::Constant(spec.quad_dim, spec.quad_shift);
    return std::make_unique<SyntheticQuadratic>(
        SyntheticQuadratic::axis_pattern(std::move(d), shift, spec.quad_terms, spec.lambda));
  }

  Dataset data;
  if (spec.source == Source::Synthetic) {
    if (spec.model == Model::Multinomial)
      data = generate_synthetic_multinomial(spec.m, spec.features, spec.classes, spec.sparsity,
                                            spec.data_seed, spec.separation)
                 .data;
    else
      data = generate_synthetic_logistic(spec.m, spec.features, spec.sparsity, spec.data_seed,
                                         spec.separation)
                 .data;
  } else {
    data = parse_libsvm_file(spec.path, spec.declared_n);
    if (data.size() == 0) throw ConfigError("config: [problem].path: dataset '" + spec.path + "' is empty");
    if (data.n == 0) throw ConfigError("config: [problem].path: dataset '" + spec.path + "' has no features");
  }

  std::vector<SparseRow> rows = to_problem_rows(data);
  const int n = static_cast<int>(data.n);

  switch (spec.model) {
    case Model::BinaryLogistic: {
      auto p = std::make_unique<BinaryLogisticProblem>(std::move(rows), binary_labels(data), n,
                                                       spec.lambda);
      const LipschitzEstimate est =
          lipschitz_bound_logistic(static_cast<const BinaryLogisticProblem&>(*p).rows(), n,
                                   spec.lambda);
      p->constants().L = est.bound;
      p->constants().validate();
      return p;
    }
    case Model::LeastSquares: {
      auto p = std::make_unique<LeastSquaresProblem>(std::move(rows), data.labels, n, spec.lambda);
      // rows were moved; recompute the bound from the dataset copy
      const LipschitzEstimate est =
          lipschitz_bound_least_squares(to_problem_rows(data), n, spec.lambda);
      p->constants().L = est.bound;
      p->constants().validate();
      return p;
    }
    case Model::Multinomial: {
      auto [labels, classes] = class_labels(data);
      const int configured = spec.source == Source::Synthetic ? spec.classes : classes;
      if (configured < classes)
        throw ConfigError("config: [problem].classes: dataset labels need at least " +
                          std::to_string(classes) + " classes");
      auto p = std::make_unique<MultinomialLogisticProblem>(std::move(rows), std::move(labels), n,
                                                            configured, spec.lambda);
      const LipschitzEstimate est =
          lipschitz_bound_multinomial(to_problem_rows(data), n, spec.lambda);
      p->constants().L = est.bound;
      p->constants().validate();
      return p;
    }
    case Model::Quadratic:
      break;  // handled above
  }
  throw std::logic_error("build_problem: unreachable");
}

const char* to_string(ProblemSpec::Model model) {
  switch (model) {
    case ProblemSpec::Model::BinaryLogistic: return "binary-logistic";
    case ProblemSpec::Model::Multinomial: return "multinomial";
    case ProblemSpec::Model::LeastSquares: return "least-squares";
    case ProblemSpec::Model::Quadratic: return "quadratic";
  }
  return "?";
}

const char* to_string(MethodSpec::Kind kind) {
  switch (kind) {
    case MethodSpec::Kind::ControlledErrorGd: return "controlled-error-gd";
    case MethodSpec::Kind::StochasticGd: return "stochastic-gd";
    case MethodSpec::Kind::HybridQn: return "hybrid-qn";
    case MethodSpec::Kind::DeterministicQn: return "deterministic-qn";
    case MethodSpec::Kind::SampledGd: return "sampled-gd";
  }
  return "?";
}

}  // namespace growbatch
