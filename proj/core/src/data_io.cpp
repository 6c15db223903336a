#include "growbatch/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "growbatch/rng.hpp"
#include "growbatch/sampling.hpp"

namespace growbatch {

namespace {

// seed-space separators so index draws, value draws and planted directions
// never share a stream
constexpr std::uint64_t kFeatureSalt = 0x6665617473ULL;
constexpr std::uint64_t kValueSalt = 0x76616c7565ULL;
constexpr std::uint64_t kPlantSalt = 0x706c616e74ULL;

bool parse_double(std::string_view tok, double& out) {
  // from_chars rejects an explicit plus, but "+1" labels are everywhere
  if (!tok.empty() && tok.front() == '+') {
    tok.remove_prefix(1);
    if (tok.empty() || tok.front() == '+' || tok.front() == '-') return false;
  }
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_index(std::string_view tok, std::int64_t& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

double stable_sigmoid(double t) { return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

std::string format_params(const char* kind, std::int64_t m, std::int64_t n, int classes,
                          double sparsity, std::uint64_t seed, double separation) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "synthetic-%s m=%lld n=%lld classes=%d sparsity=%.17g seed=%llu separation=%.17g",
                kind, static_cast<long long>(m), static_cast<long long>(n), classes, sparsity,
                static_cast<unsigned long long>(seed), separation);
  return buf;
}

SparseRow draw_row(std::int64_t n, std::int64_t nnz, std::uint64_t seed, std::int64_t row,
                   CounterRng& values) {
  const SampleSet cols = draw_sample(n, nnz, SampleMode::Uniform, seed, row);
  SparseRow out;
  out.reserve(cols.indices.size());
  for (std::int64_t j : cols.indices)
    out.push_back({static_cast<std::int32_t>(j + 1), values.normal()});  // 1-based
  return out;
}

}  // namespace

bool Dataset::operator==(const Dataset& other) const {
  // note is provenance, not content
  if (n != other.n || labels != other.labels || rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != other.rows[i].size()) return false;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j].index != other.rows[i][j].index) return false;
      if (rows[i][j].value != other.rows[i][j].value) return false;
    }
  }
  return true;
}

ParseError::ParseError(std::int64_t line_arg, const std::string& token_arg,
                       const std::string& what_arg)
    : std::runtime_error("line " + std::to_string(line_arg) + ": " + what_arg +
                         (token_arg.empty() ? "" : " '" + token_arg + "'")),
      line(line_arg),
      token(token_arg) {}

Dataset parse_libsvm(std::istream& in, std::int64_t declared_n) {
  if (declared_n < 0) throw std::invalid_argument("parse_libsvm: declared_n must be >= 0");
  Dataset d;
  std::int64_t max_index = 0;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) continue;  // blank or comment-only

    double label = 0.0;
    if (!parse_double(tok, label) || !std::isfinite(label))
      throw ParseError(line_no, tok, "expected a numeric label, got");

    SparseRow row;
    std::int64_t prev_index = 0;
    while (fields >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError(line_no, tok, "expected index:value, got");
      std::int64_t index = 0;
      double value = 0.0;
      if (!parse_index(std::string_view(tok).substr(0, colon), index) ||
          !parse_double(std::string_view(tok).substr(colon + 1), value) || !std::isfinite(value))
        throw ParseError(line_no, tok, "expected index:value, got");
      if (index <= 0) throw ParseError(line_no, tok, "index must be positive in");
      if (index <= prev_index)
        throw ParseError(line_no, tok, "indices must be strictly increasing at");
      if (declared_n > 0 && index > declared_n)
        throw ParseError(line_no, tok, "index exceeds the declared dimension in");
      row.push_back({static_cast<std::int32_t>(index), value});
      prev_index = index;
    }
    max_index = std::max(max_index, prev_index);
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  d.n = declared_n > 0 ? declared_n : max_index;
  return d;
}

Dataset parse_libsvm_file(const std::string& path, std::int64_t declared_n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_libsvm_file: cannot open " + path);
  Dataset d = parse_libsvm(in, declared_n);
  d.note = path;
  return d;
}

void serialize_libsvm(const Dataset& d, std::ostream& out) {
  if (d.labels.size() != d.rows.size())
    throw std::invalid_argument("serialize_libsvm: labels and rows disagree");
  char buf[64];
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", d.labels[i]);
    out << buf;
    for (const Feature& f : d.rows[i]) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", f.index, f.value);
      out << buf;
    }
    out << '\n';
  }
}

void serialize_libsvm_file(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("serialize_libsvm_file: cannot open " + path);
  serialize_libsvm(d, out);
}

std::vector<SparseRow> to_problem_rows(const Dataset& d) {
  std::vector<SparseRow> rows = d.rows;
  for (SparseRow& row : rows)
    for (Feature& f : row) {
      if (f.index < 1 || f.index > d.n)
        throw std::invalid_argument("to_problem_rows: index outside [1, n]");
      --f.index;
    }
  return rows;
}

std::vector<double> binary_labels(const Dataset& d) {
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    if (d.labels[i] != 1.0 && d.labels[i] != -1.0)
      throw std::invalid_argument("binary_labels: label at row " + std::to_string(i) +
                                  " is not +-1");
  return d.labels;
}

std::pair<std::vector<int>, int> class_labels(const Dataset& d) {
  std::vector<int> out;
  out.reserve(d.labels.size());
  int max_label = 0;
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    const double v = d.labels[i];
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
      throw std::invalid_argument("class_labels: label at row " + std::to_string(i) +
                                  " is not a small nonnegative integer");
    const int c = static_cast<int>(v);
    max_label = std::max(max_label, c);
    out.push_back(c);
  }
  return {std::move(out), std::max(2, max_label + 1)};
}

DatasetStats dataset_stats(const Dataset& d) {
  DatasetStats s;
  s.m = d.size();
  s.n = d.n;
  bool integral = !d.labels.empty();
  double max_label = 0.0;
  for (const SparseRow& row : d.rows) {
    s.nnz += static_cast<std::int64_t>(row.size());
    for (const Feature& f : row) s.max_abs = std::max(s.max_abs, std::abs(f.value));
  }
  for (double v : d.labels) {
    if (v == 1.0)
      ++s.positive;
    else if (v == -1.0)
      ++s.negative;
    else
      ++s.other;
    if (!(v >= 0.0) || v != std::floor(v)) integral = false;
    max_label = std::max(max_label, v);
  }
  s.classes = integral ? static_cast<std::int64_t>(max_label) + 1 : 0;
  return s;
}

SyntheticDataset generate_synthetic_logistic(std::int64_t m, std::int64_t n, double sparsity,
                                             std::uint64_t seed, double separation) {
  if (m < 1 || n < 1) throw std::invalid_argument("generate_synthetic_logistic: m, n must be >= 1");
  if (!(sparsity > 0.0) || sparsity > 1.0)
    throw std::invalid_argument("generate_synthetic_logistic: sparsity must be in (0, 1]");
  if (!(separation >= 0.0))
    throw std::invalid_argument("generate_synthetic_logistic: separation must be >= 0");

  CounterRng plant_rng(mix64(seed ^ kPlantSalt), 0);
  Eigen::VectorXd w = separation * plant_rng.unit_vector(static_cast<int>(n));

  const std::int64_t nnz = std::clamp<std::int64_t>(std::llround(sparsity * static_cast<double>(n)), 1, n);
  const std::uint64_t feature_seed = mix64(seed ^ kFeatureSalt);

  SyntheticDataset out;
  out.data.n = n;
  out.data.rows.reserve(static_cast<std::size_t>(m));
  out.data.labels.reserve(static_cast<std::size_t>(m));
  out.data.note = format_params("logistic", m, n, 2, sparsity, seed, separation);
  out.planted = w.transpose();

  for (std::int64_t i = 0; i < m; ++i) {
    CounterRng values(mix64(seed ^ kValueSalt), static_cast<std::uint64_t>(i));
    SparseRow row = draw_row(n, nnz, feature_seed, i, values);
    double t = 0.0;
    for (const Feature& f : row) t += f.value * w[f.index - 1];
    const double y = values.uniform() < stable_sigmoid(t) ? 1.0 : -1.0;
    out.data.rows.push_back(std::move(row));
    out.data.labels.push_back(y);
  }
  return out;
}

SyntheticDataset generate_synthetic_multinomial(std::int64_t m, std::int64_t n, int classes,
                                                double sparsity, std::uint64_t seed,
                                                double separation) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("generate_synthetic_multinomial: m, n must be >= 1");
  if (classes < 2) throw std::invalid_argument("generate_synthetic_multinomial: classes must be >= 2");
  if (!(sparsity > 0.0) || sparsity > 1.0)
    throw std::invalid_argument("generate_synthetic_multinomial: sparsity must be in (0, 1]");
  if (!(separation >= 0.0))
    throw std::invalid_argument("generate_synthetic_multinomial: separation must be >= 0");

  Eigen::MatrixXd w(classes, n);
  for (int c = 0; c < classes; ++c) {
    CounterRng plant_rng(mix64(seed ^ kPlantSalt), static_cast<std::uint64_t>(c) + 1);
    w.row(c) = (separation * plant_rng.unit_vector(static_cast<int>(n))).transpose();
  }

  const std::int64_t nnz = std::clamp<std::int64_t>(std::llround(sparsity * static_cast<double>(n)), 1, n);
  const std::uint64_t feature_seed = mix64(seed ^ kFeatureSalt);

  SyntheticDataset out;
  out.data.n = n;
  out.data.rows.reserve(static_cast<std::size_t>(m));
  out.data.labels.reserve(static_cast<std::size_t>(m));
  out.data.note = format_params("multinomial", m, n, classes, sparsity, seed, separation);
  out.planted = w;

  Eigen::VectorXd scores(classes);
  for (std::int64_t i = 0; i < m; ++i) {
    CounterRng values(mix64(seed ^ kValueSalt), static_cast<std::uint64_t>(i));
    SparseRow row = draw_row(n, nnz, feature_seed, i, values);
    scores.setZero();
    for (const Feature& f : row) scores += f.value * w.col(f.index - 1);
    const double shift = scores.maxCoeff();
    double total = 0.0;
    for (int c = 0; c < classes; ++c) total += std::exp(scores[c] - shift);
    double u = values.uniform() * total;
    int label = classes - 1;
    for (int c = 0; c < classes; ++c) {
      u -= std::exp(scores[c] - shift);
      if (u <= 0.0) {
        label = c;
        break;
      }
    }
    out.data.rows.push_back(std::move(row));
    out.data.labels.push_back(static_cast<double>(label));
  }
  return out;
}

}  // namespace growbatch
