#pragma once

#include <cstddef>
#include <functional>

namespace smde {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;  // Kronrod error estimate
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  std::size_t max_intervals = 200;
};

/// Adaptive Gauss–Kronrod (G7/K15) on a finite interval, bisecting the
/// interval with the largest error estimate until
/// err <= max(abs_tol, rel_tol * |value|). Never throws; check `converged`.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     const QuadOptions& opts = {});

/// ∫_lo^∞ f via the map t = lo + s / (1 - s), s ∈ [0, 1).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double lo,
                                 const QuadOptions& opts = {});

}  // namespace smde
