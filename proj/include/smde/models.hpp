#pragma once

// Parametric families on (0, ∞): score u_ϑ = p'_ϑ / p_ϑ, CDF where it exists
// in closed form, and exact samplers.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smde/rng.hpp"

namespace smde {

enum class Family { Exponential, Rayleigh, Burr, ExpPoly };

std::string_view to_string(Family family) noexcept;
/// Accepts "exponential", "rayleigh", "burr", "exppoly". Throws DomainError otherwise.
Family family_from_string(std::string_view name);
/// Number of free parameters: 1, 1, 2, 2.
std::size_t param_dim(Family family) noexcept;
/// Exponential, Rayleigh: ϑ > 0. Burr: c, k > 0. ExpPoly (ϑ₁, ϑ₃): ϑ₃ < 0.
bool in_param_space(Family family, std::span<const double> values) noexcept;

/// A point of the parameter space Θ of one family. Checked on construction.
class ParamVector {
 public:
  ParamVector(Family family, std::initializer_list<double> values);
  ParamVector(Family family, std::span<const double> values);

  Family family() const noexcept { return family_; }
  std::size_t size() const noexcept { return param_dim(family_); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return {values_.data(), size()}; }
  std::vector<double> to_vector() const { return {values_.begin(), values_.begin() + size()}; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  Family family_;
  std::array<double, 2> values_{};
};

std::string to_string(const ParamVector& p);

/// Strictly positive, finite observations kept in ascending order, so that
/// operator[](i) is the order statistic X_(i+1).
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::size_t size() const noexcept { return sorted_.size(); }
  double operator[](std::size_t i) const noexcept { return sorted_[i]; }
  std::span<const double> sorted() const noexcept { return sorted_; }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }
  double mean() const;

 private:
  std::vector<double> sorted_;
};

/// u_ϑ(x) = p'_ϑ(x) / p_ϑ(x). Throws DomainError for x <= 0.
double score(const ParamVector& params, double x);

/// log p_ϑ(x) up to an additive constant in x.
double log_density_unnormalized(const ParamVector& params, double x);

/// P_ϑ(X <= x). Throws UnsupportedFamilyError for ExpPoly.
double cdf(const ParamVector& params, double x);

/// Inverse CDF at u ∈ (0, 1). Throws UnsupportedFamilyError for ExpPoly.
double quantile(const ParamVector& params, double u);

/// n i.i.d. draws from p_ϑ, returned as a sorted Sample.
Sample sample(const ParamVector& params, std::size_t n, RandomStream& rng);

/// Unsorted draws, in generation order.
std::vector<double> draw(const ParamVector& params, std::size_t n, RandomStream& rng);

/// Envelope used by the exp-poly rejection sampler: proposal Exp(rate) and
/// log M = max_x [log f(x) - log g(x)] with f(x) = exp(ϑ₁x + ϑ₃x³).
struct ExpPolyEnvelope {
  double rate;
  double log_bound;
};

ExpPolyEnvelope exppoly_envelope(double theta1, double theta3);

}  // namespace smde
