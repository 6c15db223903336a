#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "growbatch/problem.hpp"

namespace growbatch {

/// Sparse example matrix in text-format convention: feature indices are
/// 1-based, exactly as they appear on disk.  Shift to 0-based with
/// to_problem_rows() before handing rows to a problem.
struct Dataset {
  std::int64_t n = 0;                // feature count; every index lies in [1, n]
  std::vector<SparseRow> rows;       // 1-based, strictly increasing per row
  std::vector<double> labels;        // +-1 for binary data, 0..C-1 for multinomial
  std::string note;                  // provenance, free-form

  std::int64_t size() const { return static_cast<std::int64_t>(rows.size()); }

  bool operator==(const Dataset& other) const;
};

struct ParseError : std::runtime_error {
  ParseError(std::int64_t line_arg, const std::string& token_arg, const std::string& what_arg);

  std::int64_t line;  // 1-based
  std::string token;
};

/// Reads "<label> <idx>:<val> ..." lines; '#' starts a comment, blank lines
/// are skipped.  Indices must be positive and strictly increasing within a
/// line.  declared_n = 0 infers n as the largest index seen; a positive
/// declared_n fixes n and rejects indices beyond it.
Dataset parse_libsvm(std::istream& in, std::int64_t declared_n = 0);
Dataset parse_libsvm_file(const std::string& path, std::int64_t declared_n = 0);

/// Inverse of parse_libsvm up to n inference: values at 17 significant
/// digits, so parse(serialize(d), d.n) reproduces d exactly.
void serialize_libsvm(const Dataset& d, std::ostream& out);
void serialize_libsvm_file(const Dataset& d, const std::string& path);

/// Rows shifted to 0-based indices for problem construction.
std::vector<SparseRow> to_problem_rows(const Dataset& d);

/// Labels checked to be exactly +-1.
std::vector<double> binary_labels(const Dataset& d);

/// Labels checked to be integers in [0, classes); returns them with the
/// inferred class count (at least 2).
std::pair<std::vector<int>, int> class_labels(const Dataset& d);

struct DatasetStats {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t nnz = 0;
  double max_abs = 0.0;
  std::int64_t positive = 0;  // labels == +1
  std::int64_t negative = 0;  // labels == -1
  std::int64_t other = 0;     // anything else (class labels land here)
  std::int64_t classes = 0;   // 1 + max label when all labels are integers >= 0, else 0
};

DatasetStats dataset_stats(const Dataset& d);

struct SyntheticDataset {
  Dataset data;
  Eigen::MatrixXd planted;  // one row per class; a single row for binary data
};

/// Sparse Gaussian features, labels flipped through a logistic model around a
/// planted direction of norm `separation`.  Draws are keyed per row, so output
/// is byte-identical for a given parameter set.
SyntheticDataset generate_synthetic_logistic(std::int64_t m, std::int64_t n, double sparsity,
                                             std::uint64_t seed, double separation);

/// Multinomial analogue: one planted direction per class, labels sampled from
/// the softmax of the planted scores.
SyntheticDataset generate_synthetic_multinomial(std::int64_t m, std::int64_t n, int classes,
                                                double sparsity, std::uint64_t seed,
                                                double separation);

}  // namespace growbatch
