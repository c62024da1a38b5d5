#pragma once

// Small optimisation toolkit: safeguarded Newton root finding, golden-section
// search and a bounded quasi-Newton minimiser with finite-difference gradients.
// All routines are deterministic functions of their inputs.

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace smde {

struct OptimResult {
  std::vector<double> point;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // projected gradient (minimisers) or |f| (root finder)
};

struct Interval {
  double lo;
  double hi;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;

inline constexpr int kMaxIter1d = 200;
inline constexpr int kMaxIterNd = 500;

/// Newton–Raphson for f(x) = 0 with a central-difference derivative. A step
/// that leaves the bracket, or fails to shrink |f|, is replaced by bisection of
/// the current sign-change bracket. `point[0]` holds the last iterate and
/// `value` holds f there.
///
/// Throws NoSignChangeError when Newton stalls and the bracket endpoints do not
/// straddle a root.
OptimResult newton_root_1d(const ScalarFn& f, double x0, double tol, int max_iter,
                           Interval bracket);

/// Golden-section search for the minimiser of a unimodal f on `bracket`.
/// Returns once the bracketing interval is narrower than `tol`.
OptimResult golden_section_1d(const ScalarFn& f, Interval bracket, double tol);

struct MinimizeOptions {
  double pgtol = 1e-8;   // projected-gradient norm
  double ftol = 1e-12;   // relative decrease between accepted iterates
  double stall_pgtol = 1e-5;  // a search that stalls on central differences
                              // still counts as converged below this
  int max_iter = kMaxIterNd;
};

/// Projected BFGS on the box lower <= x <= upper (infinite bounds allowed).
///
/// Gradients are forward differences with step 1e-7 max(1, |x_i|), switched to
/// central differences for coordinates within two steps of a bound. If the line
/// search stalls on a forward-difference gradient, the remaining iterations use
/// central differences throughout. While H is an unscaled identity the first
/// trial step covers at most half the distance to any bound and the best of
/// the halved steps is taken. Iterates
/// never leave the box and accepted objective values never increase.
/// Converged when the projected gradient norm is at most `pgtol`, or when an
/// accepted step lowers f by no more than ftol * max(|f|, 1e-300). A line
/// search that stalls even on central differences means f is at its rounding
/// floor; that is reported as converged only if the projected gradient is at
/// most `stall_pgtol`.
///
/// Throws InvalidBoundsError if lower > upper anywhere or x0 is outside the box.
OptimResult minimize_bounded(const VectorFn& f, std::vector<double> x0,
                             std::vector<double> lower, std::vector<double> upper,
                             const MinimizeOptions& opts = {});

/// Contract-shaped overload: `tol` is the projected-gradient tolerance.
OptimResult minimize_bounded(const VectorFn& f, std::vector<double> x0,
                             std::vector<double> lower, std::vector<double> upper, double tol,
                             int max_iter);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace smde
