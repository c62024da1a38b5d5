#include "smde/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smde/error.hpp"
#include "smde/kernels.hpp"
#include "smde/numeric.hpp"
#include "smde/quadrature.hpp"

namespace smde {

using kernels::dot;
using kernels::pair_sum;

void LqWeightConfig::validate() const {
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("L^q exponent must satisfy q >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("weight parameter must satisfy a > 0");
}

Weight Weight::exponential(double a) {
  if (!(a > 0.0)) throw DomainError("weight parameter must satisfy a > 0");
  return {[a](double t) { return std::exp(-a * t); },
          [a](double x) { return std::exp(-a * x) / a; }};
}

namespace {

std::vector<double> scores(const ParamVector& p, const Sample& s) {
  std::vector<double> u(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) u[j] = score(p, s[j]);
  return u;
}

// Elementwise helpers over the order statistics.
template <class Fn>
std::vector<double> map_index(std::size_t n, Fn fn) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

}  // namespace

double eta_n(double t, const ParamVector& params, const Sample& s) {
  if (!(t > 0.0)) throw DomainError("eta_n requires t > 0");
  const std::vector<double> u = scores(params, s);
  const auto x = s.sorted();
  const double n = static_cast<double>(s.size());
  const auto below = static_cast<double>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
  return -kernels::min_dot(u, x, t) / n - below / n;
}

double EtaSegments::operator()(double t) const {
  // knots[0] = 0 and segment i covers [knots[i], knots[i+1]).
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin());
  if (i >= knots.size()) return tail;
  return intercept[i - 1] + slope[i - 1] * t;
}

EtaSegments eta_segments(const ParamVector& params, const Sample& s) {
  const std::size_t n = s.size();
  const std::vector<double> u = scores(params, s);
  const double nd = static_cast<double>(n);
  EtaSegments seg;
  seg.knots.reserve(n + 1);
  seg.knots.push_back(0.0);
  for (double x : s.sorted()) seg.knots.push_back(x);
  seg.intercept.resize(n);
  seg.slope.resize(n);
  // On [X_(i), X_(i+1)): min{X_j, t} = X_j for the i smallest, t otherwise.
  double below_ux = 0.0;  // Σ_{j<=i} u_j X_(j)
  double above_u = kernels::sum(u);
  for (std::size_t i = 0; i < n; ++i) {
    seg.intercept[i] = -(below_ux + static_cast<double>(i)) / nd;
    seg.slope[i] = -above_u / nd;
    below_ux += u[i] * s[i];
    above_u -= u[i];
  }
  seg.tail = -(below_ux + nd) / nd;
  return seg;
}

ObjectiveValue psi_quadrature(const ParamVector& params, const Sample& s, double q,
                              const Weight& weight) {
  if (!(q >= 1.0)) throw DomainError("L^q exponent must satisfy q >= 1");
  const EtaSegments seg = eta_segments(params, s);
  QuadOptions opts;
  opts.rel_tol = 1e-9;
  opts.abs_tol = 1e-14;
  opts.max_intervals = 400;

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < seg.knots.size(); ++i) {
    const double lo = seg.knots[i], hi = seg.knots[i + 1];
    if (!(hi > lo)) continue;
    const double alpha = seg.intercept[i], beta = seg.slope[i];
    auto integrand = [&](double t) {
      const double v = std::abs(alpha + beta * t);
      return (q == 2.0 ? v * v : std::pow(v, q)) * weight.density(t);
    };
    // |η_n|^q has a kink where the affine piece crosses zero.
    double cuts[3] = {lo, hi, hi};
    int pieces = 1;
    if (beta != 0.0) {
      const double root = -alpha / beta;
      if (root > lo && root < hi) {
        cuts[1] = root;
        pieces = 2;
      }
    }
    for (int p = 0; p < pieces; ++p) {
      const QuadResult r = integrate(integrand, cuts[p], cuts[p + 1], opts);
      if (!r.converged) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << cuts[p] << ", " << cuts[p + 1]
           << "]: estimated error " << r.abs_error;
        throw QuadratureError(os.str(), r.abs_error / std::max(std::abs(r.value), 1e-300));
      }
      total += r.value;
    }
  }
  const double tail = std::abs(seg.tail);
  total += (q == 2.0 ? tail * tail : std::pow(tail, q)) * weight.tail(s.max());
  return {std::pow(total, 1.0 / q), ObjectiveMethod::Quadrature};
}

ObjectiveValue psi_quadrature(const ParamVector& params, const Sample& s,
                              const LqWeightConfig& cfg) {
  cfg.validate();
  return psi_quadrature(params, s, cfg.q, Weight::exponential(cfg.a));
}

ExponentialPsi psi2_closed_exponential(double theta, const Sample& s, double a) {
  if (!(a > 0.0)) throw DomainError("weight parameter must satisfy a > 0");
  const std::size_t n = s.size();
  const double nd = static_cast<double>(n);
  const auto x = s.sorted();
  const std::vector<double> e = map_index(n, [&](std::size_t i) { return std::exp(-a * x[i]); });
  // 1-based order index j = i + 1.
  const std::vector<double> w1 = map_index(n, [&](std::size_t i) {
    const double j = static_cast<double>(i + 1);
    return x[i] * (-nd + j - 1.0) - (2.0 * nd - 2.0 * j + 1.0) / a;
  });
  const std::vector<double> w2 = map_index(n, [&](std::size_t i) {
    const double j = static_cast<double>(i + 1);
    return x[i] * (-nd + j - 1.0) - (nd - 2.0 * j + 1.0) / a;
  });
  const std::vector<double> w3 =
      map_index(n, [&](std::size_t i) { return 2.0 * static_cast<double>(i + 1) - 1.0; });
  const double pairs = pair_sum(x, e);  // Σ_{j<k} X_(j) e^{-a X_(k)}
  const double n2 = nd * nd;

  ExponentialPsi out{};
  out.Psi1 = 2.0 / (a * a * a) + 2.0 / (a * a * n2) * dot(e, w1) - 2.0 / (a * a * n2) * pairs;
  out.Psi2 = 2.0 / (a * n2) * dot(e, w2) - 2.0 / (a * n2) * pairs;
  out.Psi3 = 1.0 / (a * n2) * dot(e, w3);
  out.psi2 = theta * theta * out.Psi1 + theta * out.Psi2 + out.Psi3;
  return out;
}

RayleighPsi psi2_closed_rayleigh(double theta, const Sample& s, double a) {
  if (!(a > 0.0)) throw DomainError("weight parameter must satisfy a > 0");
  const std::size_t n = s.size();
  const double nd = static_cast<double>(n), n2 = nd * nd;
  const double a2 = a * a, a3 = a2 * a;
  const auto x = s.sorted();
  auto vec = [n](auto fn) { return map_index(n, fn); };
  const std::vector<double> e = vec([&](std::size_t i) { return std::exp(-a * x[i]); });
  const std::vector<double> xs(x.begin(), x.end());
  const std::vector<double> inv_x = vec([&](std::size_t i) { return 1.0 / x[i]; });

  // Pairs j < k: X_(j) -> "left" arrays, X_(k) -> "right" arrays.
  double p1 = pair_sum(vec([&](std::size_t i) { return 2.0 / a3 * x[i] * (1.0 - e[i]); }), xs);
  p1 += pair_sum(vec([&](std::size_t i) { return -x[i] * x[i] * e[i] / a2; }), xs);
  p1 += pair_sum(vec([&](std::size_t i) { return -x[i] * x[i] / a2; }),
                 vec([&](std::size_t i) { return x[i] * e[i]; }));

  double p2 = pair_sum(vec([&](std::size_t i) { return x[i] * x[i]; }),
                       vec([&](std::size_t i) { return e[i] / a * (1.0 / (a * x[i]) - 1.0); }));
  p2 += pair_sum(vec([&](std::size_t i) { return x[i] * x[i] * e[i] / a2; }), inv_x);
  p2 += pair_sum(vec([&](std::size_t i) { return -x[i] * e[i] / a; }), xs);
  p2 += pair_sum(vec([&](std::size_t i) { return -2.0 / a3 * (1.0 - e[i]) / x[i]; }), xs);
  p2 += pair_sum(vec([&](std::size_t i) { return -2.0 / a3 * (1.0 - e[i]) * x[i]; }), inv_x);

  double p3 = pair_sum(vec([&](std::size_t i) { return x[i] * e[i] / a; }), inv_x);
  p3 += pair_sum(vec([&](std::size_t i) { return 2.0 / a3 * (1.0 - e[i]) / x[i]; }), inv_x);

  const std::vector<double> ones(n, 1.0);
  const double s1 = dot(ones, vec([&](std::size_t i) {
    return 2.0 * x[i] * x[i] / a3 * (1.0 - e[i]) - 2.0 * x[i] * x[i] * x[i] / a2 * e[i];
  }));
  const double s2 = dot(ones, vec([&](std::size_t i) {
    const double j = static_cast<double>(i + 1);
    return 2.0 * e[i] / a * x[i] * (2.0 * j / a - x[i]) - 4.0 / a3 * (1.0 - e[i]);
  }));
  const double s3 = dot(ones, vec([&](std::size_t i) {
    const double j = static_cast<double>(i + 1);
    return 2.0 / (a3 * x[i] * x[i]) * (1.0 - e[i]) +
           e[i] / a * (4.0 * j - 1.0 - 2.0 / (a * x[i]) * (2.0 * j - 1.0));
  }));

  RayleighPsi out{};
  out.Psi1 = 2.0 / n2 * p1 + s1 / n2;
  out.Psi2 = 2.0 / n2 * p2 + s2 / n2;
  out.Psi3 = 2.0 / n2 * p3 + s3 / n2;
  const double t2 = theta * theta;
  out.psi2 = out.Psi1 / (t2 * t2) + out.Psi2 / t2 + out.Psi3;
  return out;
}

BurrPrecomputed::BurrPrecomputed(const Sample& s, double a_) : a(a_) {
  if (!(a > 0.0)) throw DomainError("weight parameter must satisfy a > 0");
  const std::size_t n = s.size();
  x.assign(s.sorted().begin(), s.sorted().end());
  log_x = map_index(n, [&](std::size_t i) { return std::log(x[i]); });
  e = map_index(n, [&](std::size_t i) { return std::exp(-a * x[i]); });
  one_minus_e = map_index(n, [&](std::size_t i) { return -std::expm1(-a * x[i]); });
  x_e = map_index(n, [&](std::size_t i) { return x[i] * e[i]; });
  const std::vector<double> j = map_index(n, [](std::size_t i) { return double(i + 1); });
  sum_j_e = dot(j, e);
  sum_e = kernels::sum(e);
}

double psi2_closed_burr(double c, double k, const BurrPrecomputed& pre) {
  const std::size_t n = pre.x.size();
  const double nd = static_cast<double>(n), n2 = nd * nd;
  const double a = pre.a, a2 = a * a, a3 = a2 * a;
  const auto& x = pre.x;
  const auto& e = pre.e;

  // A_(j) = c(k+1) X^{c-1}/(1+X^c) - (c-1)/X,  B_(j) = -c(k+1) X^c/(1+X^c).
  std::vector<double> A(n), B(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = sigmoid(c * pre.log_x[i]);  // X^c / (1 + X^c)
    A[i] = (c * (k + 1.0) * frac - (c - 1.0)) / x[i];
    B[i] = -c * (k + 1.0) * frac;
  }

  // Pairs j < ℓ:
  //   A_ℓ [2A_j(1-e_j)/a³ + B_j(e_j + e_ℓ)/a² + (c-2)e_j/a² - X_j e_j/a] + B_j e_ℓ/a
  std::vector<double> left(n), right(n), b_over_a2(n), b_over_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = 2.0 * A[i] * pre.one_minus_e[i] / a3 + B[i] * e[i] / a2 + (c - 2.0) * e[i] / a2 -
              pre.x_e[i] / a;
    right[i] = A[i] * e[i];
    b_over_a2[i] = B[i] / a2;
    b_over_a[i] = B[i] / a;
  }
  const double pairs = pair_sum(left, A) + pair_sum(b_over_a2, right) + pair_sum(b_over_a, e);

  std::vector<double> single(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double j = static_cast<double>(i + 1);
    single[i] = A[i] * A[i] * (-2.0 * pre.x_e[i] / a2 + 2.0 * pre.one_minus_e[i] / a3) +
                2.0 * (j - 1.0) * c / a2 * A[i] * e[i] + 2.0 * B[i] / a * e[i];
  }
  return 2.0 / n2 * pairs + kernels::sum(single) / n2 + 2.0 * c / (a * n2) * pre.sum_j_e -
         pre.sum_e / (a * n2);
}

double psi2_closed_burr(double c, double k, const Sample& s, double a) {
  return psi2_closed_burr(c, k, BurrPrecomputed(s, a));
}

double ExpPolyPsi::evaluate(double t1, double t3) const {
  return t1 * t1 * Psi1 + t3 * t3 * Psi2 + t1 * t3 * Psi3 + t1 * Psi4 + t3 * Psi5 + constant;
}

std::array<double, 2> ExpPolyPsi::gradient(double t1, double t3) const {
  return {2.0 * Psi1 * t1 + Psi3 * t3 + Psi4, 2.0 * Psi2 * t3 + Psi3 * t1 + Psi5};
}

ExpPolyPsi psi2_closed_exppoly(double theta1, double theta3, const Sample& s, double a) {
  if (!(a > 0.0)) throw DomainError("weight parameter must satisfy a > 0");
  const std::size_t n = s.size();
  const double nd = static_cast<double>(n), n2 = nd * nd;
  const double a2 = a * a, a3 = a2 * a;
  const auto x = s.sorted();
  auto vec = [n](auto fn) { return map_index(n, fn); };
  const std::vector<double> e = vec([&](std::size_t i) { return std::exp(-a * x[i]); });
  const std::vector<double> ome = vec([&](std::size_t i) { return -std::expm1(-a * x[i]); });
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> x2 = vec([&](std::size_t i) { return x[i] * x[i]; });
  const std::vector<double> x2e = vec([&](std::size_t i) { return x2[i] * e[i]; });
  const std::vector<double> j = vec([](std::size_t i) { return double(i + 1); });

  ExpPolyPsi out{};
  // Ψ̄₁
  {
    const double single = dot(ones, vec([&](std::size_t i) {
      return e[i] * (-2.0 * x[i] / a2 - 2.0 / a3 * (2.0 * nd - 2.0 * j[i] + 1.0));
    }));
    const double pairs = pair_sum(vec([&](std::size_t i) { return -x[i] / a2; }), e) +
                         pair_sum(vec([&](std::size_t i) { return -x[i] * e[i] / a2; }), ones);
    out.Psi1 = 2.0 / a3 + single / n2 + 2.0 / n2 * pairs;
  }
  // Ψ̄₂
  {
    const double single = dot(ones, vec([&](std::size_t i) {
      const double x4 = x2[i] * x2[i];
      return -18.0 * x4 * x[i] / a2 * e[i] + 18.0 * x4 / a3 * ome[i];
    }));
    const double pairs =
        pair_sum(vec([&](std::size_t i) { return -9.0 * x2[i] * x[i] / a2; }), x2e) +
        pair_sum(vec([&](std::size_t i) { return -9.0 * x2[i] * x[i] * e[i] / a2; }), x2) +
        pair_sum(vec([&](std::size_t i) { return 18.0 * x2[i] * ome[i] / a3; }), x2);
    out.Psi2 = single / n2 + 2.0 / n2 * pairs;
  }
  // Ψ̄₃
  {
    const double single = dot(ones, vec([&](std::size_t i) {
      return -12.0 * x2[i] * x[i] / a2 * e[i] + 12.0 * x2[i] / a3 * ome[i];
    }));
    // (e_j + e_k)(-3 X_j X_k² - 3 X_j³)/a² + 6(1 - e_j)(X_j² + X_k²)/a³
    const double pairs =
        pair_sum(vec([&](std::size_t i) { return -3.0 * x[i] / a2; }), x2e) +
        pair_sum(vec([&](std::size_t i) { return -3.0 * x[i] * e[i] / a2; }), x2) +
        pair_sum(vec([&](std::size_t i) { return -3.0 * x2[i] * x[i] / a2; }), e) +
        pair_sum(vec([&](std::size_t i) { return -3.0 * x2[i] * x[i] * e[i] / a2; }), ones) +
        pair_sum(vec([&](std::size_t i) { return 6.0 * ome[i] * x2[i] / a3; }), ones) +
        pair_sum(vec([&](std::size_t i) { return 6.0 * ome[i] / a3; }), x2);
    out.Psi3 = single / n2 + 2.0 / n2 * pairs;
  }
  // Ψ̄₄
  {
    const double single = dot(ones, vec([&](std::size_t i) {
      return e[i] * (2.0 * x[i] / a + 2.0 * (nd - 2.0 * j[i] + 1.0) / a2);
    }));
    const double pairs = pair_sum(vec([&](std::size_t i) { return x[i] / a; }), e) +
                         pair_sum(vec([&](std::size_t i) { return x[i] * e[i] / a; }), ones);
    out.Psi4 = single / n2 + 2.0 / n2 * pairs;
  }
  // Ψ̄₅
  {
    const double single =
        dot(ones, vec([&](std::size_t i) { return 6.0 * x2[i] * x[i] / a * e[i]; }));
    const double pairs =
        pair_sum(vec([&](std::size_t i) { return 3.0 * x2[i] * x[i] / a; }), e) +
        pair_sum(vec([&](std::size_t i) { return 3.0 * x[i] * e[i] / a; }), x2) +
        pair_sum(vec([&](std::size_t i) { return 3.0 * e[i] / a2; }), x2) +
        pair_sum(vec([&](std::size_t) { return -3.0 / a2; }), x2e);
    out.Psi5 = 2.0 / n2 * pairs + single / n2;
  }
  // ψ² at ϑ = 0, where η_n = -F_n.
  out.constant = dot(e, vec([&](std::size_t i) { return 2.0 * j[i] - 1.0; })) / (a * n2);
  out.psi2 = out.evaluate(theta1, theta3);
  return out;
}

double limit_objective(const ParamVector& params, const Sample& s, double q) {
  if (!(q >= 1.0)) throw DomainError("L^q exponent must satisfy q >= 1");
  const std::vector<double> u = scores(params, s);
  const double mean = kernels::sum(u) / static_cast<double>(s.size());
  return std::tgamma(q + 1.0) * std::pow(std::abs(mean), q);
}

ObjectiveValue psi2_closed(const ParamVector& params, const Sample& s, double a) {
  switch (params.family()) {
    case Family::Exponential:
      return {psi2_closed_exponential(params[0], s, a).psi2, ObjectiveMethod::ClosedForm};
    case Family::Rayleigh:
      return {psi2_closed_rayleigh(params[0], s, a).psi2, ObjectiveMethod::ClosedForm};
    case Family::Burr:
      return {psi2_closed_burr(params[0], params[1], s, a), ObjectiveMethod::ClosedForm};
    case Family::ExpPoly:
      return {psi2_closed_exppoly(params[0], params[1], s, a).psi2, ObjectiveMethod::ClosedForm};
  }
  throw UnsupportedFamilyError("unknown family");
}

}  // namespace smde
