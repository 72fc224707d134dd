#pragma once

// Scalar search routines shared by the solvers.

#include <cmath>
#include <utility>

namespace tollane::numeric {

// Root of a non-decreasing function on [lo, hi] with g(lo) <= 0 <= g(hi).
// Bisects until the bracket cannot be split further in double precision, so
// the result is the root to within one or two ulps.
template <typename F>
double bisect_increasing(F&& g, double lo, double hi) {
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double value = g(mid);
    if (value == 0.0) return mid;
    if (value < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever endpoint is closer to the root.
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

struct Minimum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a minimum of f on [lo, hi]; assumes f is
// unimodal there.  Stops when the bracket is narrower than x_tol.
template <typename F>
Minimum golden_section_minimize(F&& f, double lo, double hi, double x_tol) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 500 && b - a > x_tol; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

}  // namespace tollane::numeric
