#include "growbatch/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growbatch {

namespace {

constexpr double kStepFloor = 1e-14;

// Minimizer of the cubic through (0, f0) with slope g0 and trials
// (a1, f1), (a2, f2); NaN when the model has no interior minimum.
double cubic_min(double f0, double g0, double a1, double f1, double a2, double f2) {
  const double d1 = f1 - f0 - g0 * a1;
  const double d2 = f2 - f0 - g0 * a2;
  const double denom = a1 * a1 * a2 * a2 * (a1 - a2);
  if (denom == 0) return std::numeric_limits<double>::quiet_NaN();
  const double ca = (a2 * a2 * d1 - a1 * a1 * d2) / denom;
  const double cb = (-a2 * a2 * a2 * d1 + a1 * a1 * a1 * d2) / denom;
  if (std::abs(ca) < 1e-30) return cb != 0 ? -g0 / (2.0 * cb) : std::numeric_limits<double>::quiet_NaN();
  const double disc = cb * cb - 3.0 * ca * g0;
  if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
  return (-cb + std::sqrt(disc)) / (3.0 * ca);
}

// Minimizer of the Hermite cubic matching value and slope at both ends.
double hermite_min(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = gb - ga + 2.0 * d2;
  if (denom == 0) return std::numeric_limits<double>::quiet_NaN();
  return b - (b - a) * (gb + d2 - d1) / denom;
}

}  // namespace

LineSearchResult armijo_search(const std::function<double(double)>& phi, double phi0,
                               double slope0, double alpha0, double eta, int max_backtracks) {
  if (!(slope0 < 0)) throw std::invalid_argument("armijo_search: need a descent direction");
  if (!(alpha0 > 0)) throw std::invalid_argument("armijo_search: initial step must be positive");

  LineSearchResult res;
  double alpha = alpha0;
  double a_prev = 0.0, f_prev = 0.0;
  bool have_prev = false;
  for (int cut = 0;; ++cut) {
    const double f = phi(alpha);
    ++res.evaluations;
    if (f < phi0 + eta * alpha * slope0) {
      res.alpha = alpha;
      res.f = f;
      res.status = LineSearchResult::Status::Satisfied;
      return res;
    }
    if (cut == max_backtracks) {
      res.alpha = alpha;
      res.f = f;
      res.status = LineSearchResult::Status::MaxBacktracks;
      return res;
    }
    double next;
    if (!have_prev) {
      // quadratic through phi0, slope0, (alpha, f); denominator is positive
      // whenever sufficient decrease failed
      const double denom = 2.0 * (f - phi0 - slope0 * alpha);
      next = denom > 0 ? -slope0 * alpha * alpha / denom : 0.5 * alpha;
    } else {
      next = cubic_min(phi0, slope0, alpha, f, a_prev, f_prev);
    }
    if (!std::isfinite(next)) next = 0.5 * alpha;
    next = std::clamp(next, 0.1 * alpha, 0.9 * alpha);
    a_prev = alpha;
    f_prev = f;
    have_prev = true;
    alpha = next;
    if (alpha < kStepFloor) {
      res.alpha = alpha;
      res.status = LineSearchResult::Status::StepUnderflow;
      return res;
    }
  }
}

LineSearchResult wolfe_search(const std::function<std::pair<double, double>(double)>& phi,
                              double phi0, double slope0, double alpha0, double c1, double c2,
                              int max_evaluations) {
  if (!(slope0 < 0)) throw std::invalid_argument("wolfe_search: need a descent direction");
  if (!(alpha0 > 0)) throw std::invalid_argument("wolfe_search: initial step must be positive");

  struct Pt {
    double a, f, g;
  };
  LineSearchResult res;
  auto sufficient = [&](double a, double f) { return f <= phi0 + c1 * a * slope0; };
  auto curvature = [&](double g) { return std::abs(g) <= c2 * std::abs(slope0); };
  auto satisfied = [&](const Pt& p) {
    res.alpha = p.a;
    res.f = p.f;
    res.slope = p.g;
    res.status = LineSearchResult::Status::Satisfied;
    return res;
  };
  auto capped = [&](const Pt& p) {
    res.alpha = p.a;
    res.f = p.f;
    res.slope = p.g;
    res.status = LineSearchResult::Status::MaxBacktracks;
    return res;
  };

  Pt prev{0.0, phi0, slope0};
  Pt lo{0.0, phi0, slope0}, hi{0.0, phi0, slope0};
  double alpha = alpha0;
  bool bracketed = false;
  for (int i = 1; !bracketed; ++i) {
    if (res.evaluations >= max_evaluations) return capped(prev);
    const auto [f, g] = phi(alpha);
    ++res.evaluations;
    const Pt cur{alpha, f, g};
    if (!sufficient(alpha, f) || (i > 1 && f >= prev.f)) {
      lo = prev;
      hi = cur;
      bracketed = true;
    } else if (curvature(g)) {
      return satisfied(cur);
    } else if (g >= 0) {
      lo = cur;
      hi = prev;
      bracketed = true;
    } else {
      prev = cur;
      alpha *= 2.0;
    }
  }

  // zoom: lo holds sufficient decrease with the lowest value seen; the
  // minimizer is bracketed between lo and hi
  while (res.evaluations < max_evaluations) {
    const double width = std::abs(hi.a - lo.a);
    if (width < kStepFloor) {
      res.alpha = lo.a;
      res.f = lo.f;
      res.slope = lo.g;
      res.status = LineSearchResult::Status::StepUnderflow;
      return res;
    }
    double at = hermite_min(lo.a, lo.f, lo.g, hi.a, hi.f, hi.g);
    const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a);
    if (!std::isfinite(at) || at <= left + 0.1 * width || at >= right - 0.1 * width)
      at = 0.5 * (lo.a + hi.a);
    const auto [f, g] = phi(at);
    ++res.evaluations;
    const Pt cur{at, f, g};
    if (!sufficient(at, f) || f >= lo.f) {
      hi = cur;
    } else {
      if (curvature(g)) return satisfied(cur);
      if (g * (hi.a - lo.a) >= 0) hi = lo;
      lo = cur;
    }
  }
  return capped(lo);
}

}  // namespace growbatch
