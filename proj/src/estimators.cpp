#include "smde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "smde/error.hpp"
#include "smde/kernels.hpp"
#include "smde/numeric.hpp"
#include "smde/optim.hpp"

namespace smde {

namespace {

constexpr double kPositiveFloor = 1e-10;
constexpr double kBurrFloor = 1e-6;
constexpr double kTheta3Ceiling = -1e-8;
constexpr double kRootTol = 1e-10;

double nonneg_sqrt(double v) { return std::sqrt(std::max(v, 0.0)); }

// Runs minimize_bounded on f / |f(x0)| so that tolerances act on a unit scale.
OptimResult minimize_normalized(const VectorFn& f, std::vector<double> x0, std::vector<double> lo,
                                std::vector<double> hi, int max_iter) {
  const double f0 = f(x0);
  const double scale = (std::isfinite(f0) && f0 != 0.0) ? 1.0 / std::abs(f0) : 1.0;
  MinimizeOptions opts;
  opts.max_iter = max_iter;
  OptimResult r = minimize_bounded([&](std::span<const double> x) { return scale * f(x); },
                                   std::move(x0), std::move(lo), std::move(hi), opts);
  r.value /= scale;
  return r;
}

int iteration_cap(std::size_t dim) { return dim == 1 ? kMaxIter1d : kMaxIterNd; }

void require_a(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("weight parameter must satisfy a > 0");
}

}  // namespace

EstimateReport::EstimateReport(ParamVector p, double objective, bool ok, int iters)
    : params(p), estimate(p.to_vector()), objective_at_opt(objective), converged(ok),
      iterations(iters) {}

void NceConfig::validate() const {
  if (nu < 1) throw DomainError("NCE noise multiple must be at least 1");
  if (!(theta3_upper < 0.0)) throw DomainError("NCE bound on theta3 must be negative");
  if (!(initial[1] <= theta3_upper)) throw DomainError("NCE initial theta3 must be negative");
}

// ---------------------------------------------------------------- exponential

EstimateReport fit_stein_exponential(const Sample& s, double a) {
  require_a(a);
  const ExponentialPsi psi = psi2_closed_exponential(1.0, s, a);
  if (!(psi.Psi1 > 0.0)) throw DegenerateSampleError("degenerate sample: Psi1 is not positive");
  const double theta = -psi.Psi2 / (2.0 * psi.Psi1);
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw DegenerateSampleError("degenerate sample: closed-form estimate is not positive");
  const double value = theta * theta * psi.Psi1 + theta * psi.Psi2 + psi.Psi3;
  return {ParamVector(Family::Exponential, {theta}), nonneg_sqrt(value), true};
}

EstimateReport fit_mle_exponential(const Sample& s) {
  const double mean = s.mean();
  return {ParamVector(Family::Exponential, {1.0 / mean}), 0.0, true};
}

EstimateReport fit_mse_exponential(const Sample& s) {
  if (s.size() < 3) throw SampleTooSmallError("MSE-optimal estimator needs n >= 3");
  const double total = kernels::sum(s.sorted());
  return {ParamVector(Family::Exponential, {static_cast<double>(s.size() - 2) / total}), 0.0,
          true};
}

// ------------------------------------------------------------------- Rayleigh

EstimateReport fit_stein_rayleigh(const Sample& s, double a) {
  require_a(a);
  const RayleighPsi psi = psi2_closed_rayleigh(1.0, s, a);
  if (!(psi.Psi1 > 0.0) || !(psi.Psi2 < 0.0))
    throw DegenerateSampleError("degenerate sample: Rayleigh coefficients have the wrong sign");
  const double theta = std::sqrt(-2.0 * psi.Psi1 / psi.Psi2);
  if (!std::isfinite(theta) || !(theta > 0.0))
    throw DegenerateSampleError("degenerate sample: closed-form estimate is not positive");
  const double v = 1.0 / (theta * theta);
  return {ParamVector(Family::Rayleigh, {theta}),
          nonneg_sqrt(psi.Psi1 * v * v + psi.Psi2 * v + psi.Psi3), true};
}

EstimateReport fit_mle_rayleigh(const Sample& s) {
  const auto x = s.sorted();
  const double sq = kernels::dot(x, x);
  return {ParamVector(Family::Rayleigh, {std::sqrt(sq / (2.0 * static_cast<double>(s.size())))}),
          0.0, true};
}

EstimateReport fit_moment_rayleigh(const Sample& s) {
  return {ParamVector(Family::Rayleigh, {std::sqrt(2.0 / std::numbers::pi) * s.mean()}), 0.0, true};
}

EstimateReport fit_am_rayleigh(const Sample& s) {
  std::vector<double> inv(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) inv[i] = 1.0 / s[i];
  const double mean_inv = kernels::sum(inv) / static_cast<double>(s.size());
  return {ParamVector(Family::Rayleigh, {std::sqrt(s.mean() / mean_inv)}), 0.0, true};
}

// ----------------------------------------------------------------------- Burr

EstimateReport fit_stein_burr(const Sample& s, double a) {
  return fit_stein_burr(s, a, ParamVector(Family::Burr, {1.0, 1.0}));
}

EstimateReport fit_stein_burr(const Sample& s, double a, const ParamVector& init) {
  require_a(a);
  if (init.family() != Family::Burr) throw DomainError("Burr fit needs a Burr starting point");
  const BurrPrecomputed pre(s, a);
  auto f = [&](std::span<const double> v) { return psi2_closed_burr(v[0], v[1], pre); };
  const std::vector<double> x0{std::max(init[0], kBurrFloor), std::max(init[1], kBurrFloor)};
  const OptimResult r =
      minimize_normalized(f, x0, {kBurrFloor, kBurrFloor}, {kInf, kInf}, kMaxIterNd);
  return {ParamVector(Family::Burr, r.point), nonneg_sqrt(r.value), r.converged, r.iterations};
}

double burr_profile_score(double c, const Sample& s) {
  // With z = c log X: n/c + Σ log X - (n / Σ softplus(z) + 1) Σ sigmoid(z) log X.
  // When every z is very negative both sums underflow together, so they are
  // carried scaled by e^{-m}, m = min(0, max z).
  const std::size_t n = s.size();
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) zmax = std::max(zmax, c * std::log(s[i]));
  const double shift = std::min(zmax, 0.0);
  double sum_log = 0.0, sp_scaled = 0.0, weighted_scaled = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(s[i]);
    const double z = c * lx;
    sum_log += lx;
    if (z < -30.0) {
      const double e = std::exp(z - shift);
      sp_scaled += e * (1.0 - 0.5 * std::exp(z));
      weighted_scaled += e / (1.0 + std::exp(z)) * lx;
    } else {
      const double scale = std::exp(-shift);
      sp_scaled += softplus(z) * scale;
      weighted_scaled += sigmoid(z) * scale * lx;
    }
  }
  const double nd = static_cast<double>(n);
  return nd / c + sum_log - nd * weighted_scaled / sp_scaled - std::exp(shift) * weighted_scaled;
}

namespace {

double burr_shape_given_c(double c, const Sample& s) {
  double sum_sp = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum_sp += softplus(c * std::log(s[i]));
  return static_cast<double>(s.size()) / sum_sp;
}

double burr_mean_neg_loglik(double c, double k, const Sample& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lx = std::log(s[i]);
    total += std::log(c) + std::log(k) + (c - 1.0) * lx - (k + 1.0) * softplus(c * lx);
  }
  return -total / static_cast<double>(s.size());
}

}  // namespace

EstimateReport fit_mle_burr(const Sample& s) {
  auto g = [&](double c) { return burr_profile_score(c, s); };
  double c = 1.0;
  bool ok = false;
  int iters = kMaxIter1d;
  try {
    const OptimResult r = newton_root_1d(g, 1.0, kRootTol, kMaxIter1d, {1e-3, 1e3});
    c = r.point[0];
    ok = r.converged;
    iters = r.iterations;
  } catch (const NoSignChangeError&) {
    ok = false;
  }
  const double k = burr_shape_given_c(c, s);
  if (!std::isfinite(k) || !(k > 0.0)) {
    return {ParamVector(Family::Burr, {1.0, 1.0}), kInf, false, iters};
  }
  return {ParamVector(Family::Burr, {c, k}), burr_mean_neg_loglik(c, k, s), ok, iters};
}

// ------------------------------------------------------------------------ CvM

double cvm_objective(const ParamVector& p, const Sample& s) {
  const std::size_t n = s.size();
  const double nd = static_cast<double>(n);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s[i];
    double surv = 0.0;  // 1 - F(x)
    switch (p.family()) {
      case Family::Exponential:
        surv = std::exp(-p[0] * x);
        break;
      case Family::Rayleigh:
        surv = std::exp(-x * x / (2.0 * p[0] * p[0]));
        break;
      case Family::Burr:
        surv = std::exp(-p[1] * softplus(p[0] * std::log(x)));
        break;
      case Family::ExpPoly:
        throw UnsupportedFamilyError("no CvM estimator for the exp-poly family");
    }
    terms[i] = surv * ((2.0 * static_cast<double>(i + 1) - 1.0) / nd - 2.0 + surv);
  }
  return kernels::sum(terms) / nd;
}

EstimateReport fit_cvm(Family family, const Sample& s) {
  switch (family) {
    case Family::Exponential:
      return fit_cvm(family, s, fit_mle_exponential(s).params);
    case Family::Rayleigh:
      return fit_cvm(family, s, fit_mle_rayleigh(s).params);
    case Family::Burr: {
      const EstimateReport ml = fit_mle_burr(s);
      return fit_cvm(family, s, ml.converged ? ml.params : ParamVector(Family::Burr, {1.0, 1.0}));
    }
    case Family::ExpPoly:
      break;
  }
  throw UnsupportedFamilyError("no CvM estimator for the exp-poly family");
}

EstimateReport fit_cvm(Family family, const Sample& s, const ParamVector& init) {
  if (family == Family::ExpPoly) throw UnsupportedFamilyError("no CvM estimator for the exp-poly family");
  if (init.family() != family) throw DomainError("CvM starting point belongs to another family");
  const std::size_t dim = param_dim(family);
  const double floor = family == Family::Burr ? kBurrFloor : kPositiveFloor;
  auto f = [&](std::span<const double> v) {
    return cvm_objective(ParamVector(family, v), s);
  };
  std::vector<double> x0 = init.to_vector();
  for (double& v : x0) v = std::max(v, floor);
  const OptimResult r = minimize_bounded(f, x0, std::vector<double>(dim, floor),
                                         std::vector<double>(dim, kInf),
                                         MinimizeOptions{.pgtol = 1e-8, .ftol = 1e-12, .max_iter = iteration_cap(dim)});
  return {ParamVector(family, r.point), r.value, r.converged, r.iterations};
}

// ------------------------------------------------------------------- exp-poly

EstimateReport fit_stein_exppoly(const Sample& s, double a) {
  require_a(a);
  const ExpPolyPsi psi = psi2_closed_exppoly(0.0, 0.0, s, a);
  const double den = 4.0 * psi.Psi1 * psi.Psi2 - psi.Psi3 * psi.Psi3;
  if (!(den != 0.0) || !std::isfinite(den))
    throw SingularSystemError("exp-poly quadratic form is singular");
  double t1 = (psi.Psi3 * psi.Psi5 - 2.0 * psi.Psi2 * psi.Psi4) / den;
  double t3 = (psi.Psi3 * psi.Psi4 - 2.0 * psi.Psi1 * psi.Psi5) / den;
  bool fallback = false;
  if (!(t3 <= kTheta3Ceiling)) {
    // Positive-definite quadratic: the constrained minimiser sits on ϑ₃ = ceiling.
    t3 = kTheta3Ceiling;
    t1 = -(psi.Psi3 * t3 + psi.Psi4) / (2.0 * psi.Psi1);
    fallback = true;
  }
  EstimateReport rep(ParamVector(Family::ExpPoly, {t1, t3}), nonneg_sqrt(psi.evaluate(t1, t3)),
                     true);
  rep.fallback_used = fallback;
  return rep;
}

double score_matching_loss(double theta1, double theta3, const Sample& s) {
  std::vector<double> terms(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s[i], x3 = x * x * x;
    const double u = theta1 * x + 3.0 * theta3 * x3;
    terms[i] = 2.0 * theta1 * x + 12.0 * theta3 * x3 + 0.5 * u * u;
  }
  return kernels::sum(terms) / static_cast<double>(s.size());
}

EstimateReport fit_score_matching_exppoly(const Sample& s) {
  std::array<double, 7> m{};  // m[k] = Σ X^k
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= 6; ++k) {
      m[k] += p;
      p *= s[i];
    }
  }
  const double den = 3.0 * m[4] * m[4] - 3.0 * m[2] * m[6];
  // m₄² <= m₂m₆ with equality only for a constant sample.
  if (!(std::abs(den) > 1e-12 * 3.0 * m[2] * m[6]))
    throw SingularSystemError("score-matching moment system is singular");
  const double t3 = (4.0 * m[2] * m[3] - 2.0 * m[1] * m[4]) / den;
  const double t1 = -2.0 * m[1] / m[2] - 3.0 * m[4] / m[2] * t3;
  const bool inside = t3 <= kTheta3Ceiling;
  EstimateReport rep(ParamVector(Family::ExpPoly, {t1, inside ? t3 : kTheta3Ceiling}),
                     score_matching_loss(t1, t3, s), true);
  rep.estimate = {t1, t3};
  rep.fallback_used = !inside;
  return rep;
}

double nce_objective(std::span<const double> theta, const Sample& s, std::span<const double> noise,
                     double rate) {
  const double n = static_cast<double>(s.size());
  const double nu = static_cast<double>(noise.size()) / n;
  const double offset = std::log(nu * rate);
  const double t1 = theta[0], t3 = theta[1], c = theta[2];
  // G(x) = log model(x) - log(nu * noise density(x))
  auto contrast = [&](double x) { return (t1 + rate) * x + t3 * x * x * x + c - offset; };
  std::vector<double> terms(s.size() + noise.size());
  for (std::size_t i = 0; i < s.size(); ++i) terms[i] = softplus(-contrast(s[i]));
  for (std::size_t i = 0; i < noise.size(); ++i) terms[s.size() + i] = softplus(contrast(noise[i]));
  return kernels::sum(terms) / n;
}

EstimateReport fit_nce_exppoly(const Sample& s, const NceConfig& cfg) {
  cfg.validate();
  const double rate = static_cast<double>(s.size()) / kernels::sum(s.sorted());
  RandomStream rng(cfg.seed, cfg.stream);
  std::vector<double> noise(static_cast<std::size_t>(cfg.nu) * s.size());
  for (double& y : noise) y = rng.exponential(rate);

  auto f = [&](std::span<const double> v) {
    const double val = nce_objective(v, s, noise, rate);
    if (!std::isfinite(val)) throw Error("non-finite NCE objective");
    return val;
  };
  const std::vector<double> x0(cfg.initial.begin(), cfg.initial.end());
  const OptimResult r = minimize_bounded(f, x0, {-kInf, -kInf, -kInf}, {kInf, cfg.theta3_upper, kInf},
                                         MinimizeOptions{.pgtol = 1e-8, .ftol = 1e-12, .max_iter = kMaxIterNd});
  EstimateReport rep(ParamVector(Family::ExpPoly, {r.point[0], r.point[1]}), r.value, r.converged,
                     r.iterations);
  return rep;
}

// -------------------------------------------------------------------- generic

EstimateReport fit_stein_generic(Family family, const Sample& s, const LqWeightConfig& cfg,
                                 const ParamVector& init) {
  cfg.validate();
  if (init.family() != family) throw DomainError("starting point belongs to another family");
  const std::size_t dim = param_dim(family);
  std::vector<double> lo(dim), hi(dim);
  switch (family) {
    case Family::Exponential:
    case Family::Rayleigh:
      lo = {kPositiveFloor};
      hi = {kInf};
      break;
    case Family::Burr:
      lo = {kBurrFloor, kBurrFloor};
      hi = {kInf, kInf};
      break;
    case Family::ExpPoly:
      lo = {-kInf, -kInf};
      hi = {kInf, kTheta3Ceiling};
      break;
  }
  const Weight weight = Weight::exponential(cfg.a);
  auto f = [&](std::span<const double> v) {
    if (!in_param_space(family, v)) return kInf;
    try {
      return std::pow(psi_quadrature(ParamVector(family, v), s, cfg.q, weight).value, cfg.q);
    } catch (const QuadratureError&) {
      return kInf;
    }
  };
  std::vector<double> x0 = init.to_vector();
  for (std::size_t i = 0; i < dim; ++i) x0[i] = std::clamp(x0[i], lo[i], hi[i]);
  const OptimResult r = minimize_normalized(f, x0, lo, hi, iteration_cap(dim));
  return {ParamVector(family, r.point), std::pow(std::max(r.value, 0.0), 1.0 / cfg.q), r.converged,
          r.iterations};
}

}  // namespace smde
