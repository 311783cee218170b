#pragma once

// Deterministic 1-D minimization: uniform scan, then golden-section search on
// the bracket around the best scan point.

#include <cmath>
#include <cstddef>
#include <utility>

namespace diec::detail {

struct SearchResult {
  double x = 0.0;
  double value = 0.0;
};

template <class F>
SearchResult golden_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
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
  return fc <= fd ? SearchResult{c, fc} : SearchResult{d, fd};
}

template <class F>
SearchResult scan_golden_minimize(F&& f, double lo, double hi, std::size_t scan_points, double tol) {
  const double step = (hi - lo) / static_cast<double>(scan_points - 1);
  std::size_t best_i = 0;
  double best = f(lo);
  for (std::size_t i = 1; i < scan_points; ++i) {
    const double v = f(i + 1 == scan_points ? hi : lo + static_cast<double>(i) * step);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + static_cast<double>(best_i - 1) * step;
  const double b = best_i + 1 >= scan_points ? hi : lo + static_cast<double>(best_i + 1) * step;
  const double best_x = best_i + 1 == scan_points ? hi : lo + static_cast<double>(best_i) * step;
  auto refined = golden_minimize(f, a, b, tol);
  if (refined.value <= best) return refined;
  return {best_x, best};
}

}  // namespace diec::detail
