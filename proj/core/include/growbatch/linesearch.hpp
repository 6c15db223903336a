#pragma once

#include <functional>
#include <limits>
#include <utility>

namespace growbatch {

struct LineSearchResult {
  enum class Status { Satisfied, MaxBacktracks, StepUnderflow };

  double alpha = 0.0;
  int evaluations = 0;  // phi calls made by the search (excludes phi(0))
  Status status = Status::Satisfied;
  double f = std::numeric_limits<double>::quiet_NaN();      // phi at returned alpha
  double slope = std::numeric_limits<double>::quiet_NaN();  // phi' at returned alpha (Wolfe only)

  bool ok() const { return status == Status::Satisfied; }
};

/// Backtracking search for the sufficient-decrease condition
///   phi(alpha) < phi0 + eta alpha slope0.
/// New trials come from safeguarded quadratic (first cut) and cubic
/// interpolation, clamped to [0.1, 0.9] of the previous trial; gives up
/// after max_backtracks cuts or once alpha drops below 1e-14.
/// Requires slope0 < 0 and alpha0 > 0.
LineSearchResult armijo_search(const std::function<double(double)>& phi, double phi0,
                               double slope0, double alpha0, double eta = 1e-4,
                               int max_backtracks = 50);

/// Bracket-and-zoom search for the strong Wolfe conditions
///   phi(alpha) <= phi0 + c1 alpha slope0  and  |phi'(alpha)| <= c2 |slope0|
/// with Hermite-cubic interpolation inside the zoom.  phi returns
/// (value, derivative).  Capped at max_evaluations phi calls.
/// Requires slope0 < 0 and alpha0 > 0.
LineSearchResult wolfe_search(const std::function<std::pair<double, double>(double)>& phi,
                              double phi0, double slope0, double alpha0, double c1 = 1e-4,
                              double c2 = 0.9, int max_evaluations = 25);

}  // namespace growbatch
