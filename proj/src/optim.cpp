#include "smde/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smde/error.hpp"

namespace smde {

namespace {

bool same_sign(double a, double b) { return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0); }

}  // namespace

OptimResult newton_root_1d(const ScalarFn& f, double x0, double tol, int max_iter,
                           Interval bracket) {
  if (!(bracket.lo < bracket.hi)) throw InvalidBoundsError("root bracket must satisfy lo < hi");
  if (!(x0 >= bracket.lo && x0 <= bracket.hi))
    throw InvalidBoundsError("starting point lies outside the root bracket");

  double lo = bracket.lo, hi = bracket.hi;
  const double f_lo = f(lo), f_hi = f(hi);
  // A sign-change bracket [a, b] with f(a) < 0 < f(b) in orientation terms.
  bool have_sign_change = std::isfinite(f_lo) && std::isfinite(f_hi) && !same_sign(f_lo, f_hi);
  double neg = f_lo < 0.0 ? lo : hi;  // endpoint where f < 0
  double pos = f_lo < 0.0 ? hi : lo;  // endpoint where f > 0

  OptimResult out;
  double x = x0;
  double fx = f(x);
  auto finish = [&](bool ok, int it) {
    out.point = {x};
    out.value = fx;
    out.converged = ok;
    out.iterations = it;
    out.grad_norm = std::abs(fx);
    return out;
  };
  auto stalled = [&](int it) -> OptimResult {
    if (!have_sign_change)
      throw NoSignChangeError("Newton iteration stalled and the bracket has no sign change");
    return finish(false, it);
  };

  for (int it = 0; it < max_iter; ++it) {
    if (!std::isfinite(fx)) {
      if (!have_sign_change) return stalled(it);
      x = 0.5 * (neg + pos);
      fx = f(x);
      continue;
    }
    if (std::abs(fx) <= tol) return finish(true, it);
    if (have_sign_change) (fx < 0.0 ? neg : pos) = x;

    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double a = std::max(lo, x - h), b = std::min(hi, x + h);
    const double slope = (f(b) - f(a)) / (b - a);
    double next = x - fx / slope;

    const double bl = have_sign_change ? std::min(neg, pos) : lo;
    const double bh = have_sign_change ? std::max(neg, pos) : hi;
    const bool newton_ok = std::isfinite(next) && next > bl && next < bh;
    if (!newton_ok) {
      if (!have_sign_change) return stalled(it + 1);
      next = 0.5 * (neg + pos);
    }
    if (next == x) return finish(std::abs(fx) <= tol, it + 1);
    double f_next = f(next);
    // Newton step that fails to halve |f| is replaced by bisection.
    if (newton_ok && have_sign_change && std::isfinite(f_next) &&
        std::abs(f_next) > 0.5 * std::abs(fx)) {
      const double mid = 0.5 * (neg + pos);
      const double f_mid = f(mid);
      if (!(std::abs(f_mid) >= std::abs(f_next))) {
        next = mid;
        f_next = f_mid;
      }
    }
    x = next;
    fx = f_next;
    if (have_sign_change && std::abs(pos - neg) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(1.0, std::abs(x)))
      return finish(std::abs(fx) <= tol, it + 1);
  }
  if (std::isfinite(fx) && std::abs(fx) <= tol) return finish(true, max_iter);
  return have_sign_change ? finish(false, max_iter) : stalled(max_iter);
}

OptimResult golden_section_1d(const ScalarFn& f, Interval bracket, double tol) {
  if (!(bracket.lo < bracket.hi)) throw InvalidBoundsError("bracket must satisfy lo < hi");
  constexpr double kInvPhi = std::numbers::phi - 1.0;  // 0.618...
  double a = bracket.lo, b = bracket.hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > tol && it < kMaxIter1d) {
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
    ++it;
  }
  OptimResult out;
  const double x = 0.5 * (a + b);
  out.point = {x};
  out.value = f(x);
  out.converged = b - a <= tol;
  out.iterations = it;
  out.grad_norm = b - a;
  return out;
}

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

struct Problem {
  const VectorFn& f;
  const std::vector<double>& lower;
  const std::vector<double>& upper;
  bool central = false;  // set once forward differences stall

  double eval(const std::vector<double>& x) const {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  }

  // Forward differences; central within two steps of a bound, or everywhere
  // once `central` is set.
  std::vector<double> gradient(std::vector<double> x, double fx) const {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x[i];
      const double h = 1e-7 * std::max(1.0, std::abs(xi));
      const double room_lo = xi - lower[i];
      const double room_hi = upper[i] - xi;
      if (central || room_lo < 2.0 * h || room_hi < 2.0 * h) {
        const double hc = std::min({h, room_lo, room_hi});
        if (hc > 1e-3 * h) {
          x[i] = xi + hc;
          const double fp = eval(x);
          x[i] = xi - hc;
          const double fm = eval(x);
          g[i] = (fp - fm) / (2.0 * hc);
        } else if (room_hi >= h) {
          x[i] = xi + h;
          g[i] = (eval(x) - fx) / h;
        } else {
          x[i] = xi - h;
          g[i] = (fx - eval(x)) / h;
        }
      } else {
        x[i] = xi + h;
        g[i] = (eval(x) - fx) / h;
      }
      x[i] = xi;
    }
    return g;
  }

  double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g) const {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      m = std::max(m, std::abs(clamp(x[i] - g[i], lower[i], upper[i]) - x[i]));
    return m;
  }
};

}  // namespace

OptimResult minimize_bounded(const VectorFn& f, std::vector<double> x0, std::vector<double> lower,
                             std::vector<double> upper, const MinimizeOptions& opts) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw InvalidBoundsError("bounds and starting point differ in dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidBoundsError("lower bound exceeds upper bound");
    if (!(x0[i] >= lower[i] && x0[i] <= upper[i]))
      throw InvalidBoundsError("starting point lies outside the bounds");
  }
  Problem prob{f, lower, upper};

  OptimResult out;
  std::vector<double> x = std::move(x0);
  double fx = prob.eval(x);
  auto finish = [&](bool ok, int it, double pg) {
    out.point = x;
    out.value = fx;
    out.converged = ok;
    out.iterations = it;
    out.grad_norm = pg;
    return out;
  };
  if (!std::isfinite(fx)) return finish(false, 0, kInf);

  std::vector<double> g = prob.gradient(x, fx);
  // Inverse Hessian approximation, row-major n x n.
  std::vector<double> H(n * n, 0.0);
  auto reset_h = [&](double scale) {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = scale;
  };
  double ginf = 0.0;
  for (double v : g) ginf = std::max(ginf, std::abs(v));
  reset_h(1.0 / std::max(1.0, ginf));
  bool fresh_h = true;

  for (int it = 0; it < opts.max_iter; ++it) {
    const double pg = prob.projected_gradient_norm(x, g);
    if (!std::isfinite(pg)) return finish(false, it, pg);
    if (pg <= opts.pgtol) return finish(true, it, pg);

    // Variables held at a bound by the sign of the gradient.
    std::vector<bool> active(n);
    for (std::size_t i = 0; i < n; ++i)
      active[i] = (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0);

    auto direction = [&] {
      std::vector<double> d(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (!active[j]) s -= H[i * n + j] * g[j];
        d[i] = s;
      }
      return d;
    };

    std::vector<double> d = direction();
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += d[i] * g[i];
    if (!(slope < 0.0)) {
      reset_h(1.0 / std::max(1.0, pg));
      fresh_h = true;
      d = direction();
    }

    // Backtracking Armijo search along the projected path.
    std::vector<double> xt(n);
    double ft = kInf;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double alpha = 1.0;
      if (fresh_h) {
        // Uncalibrated step: cover at most half the distance to any bound.
        for (std::size_t i = 0; i < n; ++i) {
          const double room = d[i] < 0.0 ? x[i] - lower[i] : upper[i] - x[i];
          if (d[i] != 0.0 && room > 0.0 && std::isfinite(room))
            alpha = std::min(alpha, 0.5 * room / std::abs(d[i]));
        }
      }
      for (int ls = 0; ls < 60; ++ls) {
        double decrease = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          xt[i] = clamp(x[i] + alpha * d[i], lower[i], upper[i]);
          decrease += g[i] * (xt[i] - x[i]);
        }
        if (xt == x) break;
        ft = prob.eval(xt);
        if (ft <= fx + 1e-4 * decrease) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      // With an unscaled H the unit step can jump across a valley into a worse
      // basin (often a bound). Take the best of the shorter halved steps.
      if (accepted && fresh_h) {
        std::vector<double> xs(n);
        for (int ls = 0; ls < 30; ++ls) {
          alpha *= 0.5;
          for (std::size_t i = 0; i < n; ++i) xs[i] = clamp(x[i] + alpha * d[i], lower[i], upper[i]);
          if (xs == x) break;
          const double fs = prob.eval(xs);
          if (fs < ft) {
            xt = xs;
            ft = fs;
          }
        }
      }
      if (!accepted) {
        if (fresh_h) break;
        reset_h(1.0 / std::max(1.0, pg));
        fresh_h = true;
        d = direction();
      }
    }
    if (!accepted) {
      // Forward-difference error is O(h); near a minimiser it can point uphill.
      // Retry once with central differences before giving up.
      if (prob.central) return finish(pg <= opts.stall_pgtol, it + 1, pg);
      prob.central = true;
      g = prob.gradient(x, fx);
      reset_h(1.0 / std::max(1.0, prob.projected_gradient_norm(x, g)));
      fresh_h = true;
      continue;
    }

    std::vector<double> gt = prob.gradient(xt, ft);
    std::vector<double> s(n), y(n);
    double sy = 0.0, yy = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xt[i] - x[i];
      y[i] = gt[i] - g[i];
      sy += s[i] * y[i];
      yy += y[i] * y[i];
      ss += s[i] * s[i];
    }
    const double drop = fx - ft;
    const double scale = std::max(std::max(std::abs(fx), std::abs(ft)), 1e-300);
    x = xt;
    fx = ft;
    g = std::move(gt);
    if (drop <= opts.ftol * scale) return finish(true, it + 1, prob.projected_gradient_norm(x, g));

    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      if (fresh_h) {
        reset_h(sy / yy);
        fresh_h = false;
      }
      // H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
      const double rho = 1.0 / sy;
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) hy[i] += H[i * n + j] * y[j];
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          H[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
    }
  }
  return finish(false, opts.max_iter, prob.projected_gradient_norm(x, g));
}

OptimResult minimize_bounded(const VectorFn& f, std::vector<double> x0, std::vector<double> lower,
                             std::vector<double> upper, double tol, int max_iter) {
  MinimizeOptions opts;
  opts.pgtol = tol;
  opts.max_iter = max_iter;
  return minimize_bounded(f, std::move(x0), std::move(lower), std::move(upper), opts);
}

}  // namespace smde
