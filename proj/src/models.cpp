#include "smde/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "smde/error.hpp"
#include "smde/numeric.hpp"

namespace smde {

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Exponential:
      return "exponential";
    case Family::Rayleigh:
      return "rayleigh";
    case Family::Burr:
      return "burr";
    case Family::ExpPoly:
      return "exppoly";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::Exponential, Family::Rayleigh, Family::Burr, Family::ExpPoly})
    if (name == to_string(f)) return f;
  throw DomainError("unknown family '" + std::string(name) + "'");
}

std::size_t param_dim(Family family) noexcept {
  switch (family) {
    case Family::Exponential:
    case Family::Rayleigh:
      return 1;
    case Family::Burr:
    case Family::ExpPoly:
      return 2;
  }
  return 0;
}

bool in_param_space(Family family, std::span<const double> v) noexcept {
  if (v.size() != param_dim(family)) return false;
  for (double x : v)
    if (!std::isfinite(x)) return false;
  switch (family) {
    case Family::Exponential:
    case Family::Rayleigh:
      return v[0] > 0.0;
    case Family::Burr:
      return v[0] > 0.0 && v[1] > 0.0;
    case Family::ExpPoly:
      return v[1] < 0.0;
  }
  return false;
}

ParamVector::ParamVector(Family family, std::initializer_list<double> values)
    : ParamVector(family, std::span<const double>(values.begin(), values.size())) {}

ParamVector::ParamVector(Family family, std::span<const double> values) : family_(family) {
  if (!in_param_space(family, values)) {
    std::ostringstream os;
    os << "parameters (";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
    os << ") outside the parameter space of the " << to_string(family) << " family";
    throw DomainError(os.str());
  }
  std::copy(values.begin(), values.end(), values_.begin());
}

std::string to_string(const ParamVector& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

Sample::Sample(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw DomainError("sample must contain at least one observation");
  for (double x : sorted_)
    if (!(x > 0.0) || !std::isfinite(x))
      throw DomainError("sample values must be finite and strictly positive");
  std::sort(sorted_.begin(), sorted_.end());
}

double Sample::mean() const {
  double s = 0.0;
  for (double x : sorted_) s += x;
  return s / static_cast<double>(sorted_.size());
}

namespace {

void require_positive(double x) {
  if (!(x > 0.0)) throw DomainError("observation must be strictly positive");
}

}  // namespace

double score(const ParamVector& p, double x) {
  require_positive(x);
  switch (p.family()) {
    case Family::Exponential:
      return -p[0];
    case Family::Rayleigh:
      return 1.0 / x - x / (p[0] * p[0]);
    case Family::Burr: {
      // x^{c-1} / (1 + x^c) = sigmoid(c log x) / x
      const double c = p[0], k = p[1];
      return ((c - 1.0) - c * (k + 1.0) * sigmoid(c * std::log(x))) / x;
    }
    case Family::ExpPoly:
      return p[0] + 3.0 * p[1] * x * x;
  }
  return 0.0;
}

double log_density_unnormalized(const ParamVector& p, double x) {
  require_positive(x);
  switch (p.family()) {
    case Family::Exponential:
      return -p[0] * x;
    case Family::Rayleigh:
      return std::log(x) - x * x / (2.0 * p[0] * p[0]);
    case Family::Burr: {
      const double c = p[0], k = p[1];
      return (c - 1.0) * std::log(x) - (k + 1.0) * softplus(c * std::log(x));
    }
    case Family::ExpPoly:
      return p[0] * x + p[1] * x * x * x;
  }
  return 0.0;
}

double cdf(const ParamVector& p, double x) {
  switch (p.family()) {
    case Family::Exponential:
      require_positive(x);
      return -std::expm1(-p[0] * x);
    case Family::Rayleigh:
      require_positive(x);
      return -std::expm1(-x * x / (2.0 * p[0] * p[0]));
    case Family::Burr:
      require_positive(x);
      return -std::expm1(-p[1] * softplus(p[0] * std::log(x)));
    case Family::ExpPoly:
      break;
  }
  throw UnsupportedFamilyError("no closed-form CDF for the exp-poly family");
}

double quantile(const ParamVector& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  const double tail = -std::log1p(-u);  // -log(1 - u) > 0
  switch (p.family()) {
    case Family::Exponential:
      return tail / p[0];
    case Family::Rayleigh:
      return p[0] * std::sqrt(2.0 * tail);
    case Family::Burr:
      return std::pow(std::expm1(tail / p[1]), 1.0 / p[0]);
    case Family::ExpPoly:
      break;
  }
  throw UnsupportedFamilyError("no closed-form quantile for the exp-poly family");
}

ExpPolyEnvelope exppoly_envelope(double theta1, double theta3) {
  if (!(theta3 < 0.0)) throw DomainError("exp-poly envelope requires theta3 < 0");
  // With b = ϑ₁ + λ > 0 the log ratio ϑ₁x + ϑ₃x³ + λx - log λ peaks at
  // x* = sqrt(b / (-3ϑ₃)) with value (2/3) b x* - log λ. Over λ this bound is
  // minimised where λ sqrt(λ + ϑ₁) = sqrt(-3ϑ₃), an increasing function of λ
  // on λ > max(0, -ϑ₁); solve by bisection.
  const double target = std::sqrt(-3.0 * theta3);
  auto excess = [&](double lam) { return lam * std::sqrt(std::max(lam + theta1, 0.0)) - target; };
  double lo = std::max(0.0, -theta1);
  double hi = std::max(1.0, 2.0 * lo);
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  const double rate = hi;
  const double b = theta1 + rate;
  const double peak = b > 0.0 ? (2.0 / 3.0) * b * std::sqrt(b / (-3.0 * theta3)) : 0.0;
  return {rate, peak - std::log(rate)};
}

std::vector<double> draw(const ParamVector& p, std::size_t n, RandomStream& rng) {
  std::vector<double> out;
  out.reserve(n);
  if (p.family() != Family::ExpPoly) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(p, rng.uniform_open()));
    return out;
  }
  const double t1 = p[0], t3 = p[1];
  const ExpPolyEnvelope env = exppoly_envelope(t1, t3);
  const double log_rate = std::log(env.rate);
  while (out.size() < n) {
    const double x = rng.exponential(env.rate);
    const double log_ratio = t1 * x + t3 * x * x * x + env.rate * x - log_rate - env.log_bound;
    if (std::log(rng.uniform_open()) <= log_ratio && x > 0.0) out.push_back(x);
  }
  return out;
}

Sample sample(const ParamVector& p, std::size_t n, RandomStream& rng) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  return Sample(draw(p, n, rng));
}

}  // namespace smde
