#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace growbatch {

/// One iteration record.  Reals that were not evaluated (true objective
/// between boundary crossings, gap without a known optimum) carry NaN;
/// pair_accepted is -1 where no quasi-Newton update exists.
struct TraceRow {
  std::int64_t k = 0;
  std::int64_t batch_size = 0;
  std::int64_t cum_evals = 0;  // term touches actually performed (trace evaluations excluded)
  double eff_passes = 0.0;     // cum_evals / M, exact
  double f_sampled = 0.0;
  double f_true = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int ls_evals = 0;  // sampled-objective evaluations driving this iteration (base + trials)
  int pair_accepted = -1;
};

struct Trace {
  std::string method;
  std::int64_t m = 0;  // term count, denominator of eff_passes
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;

  /// Fixed column order, one header row, reals at 17 significant digits.
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

extern const char* const kTraceCsvHeader;

}  // namespace growbatch
