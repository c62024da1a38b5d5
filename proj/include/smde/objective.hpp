#pragma once

// The empirical Stein contrast
//
//   η_n(t, ϑ) = -(1/n) Σ_j u_ϑ(X_j) min{X_j, t} - (1/n) Σ_j 1{X_j <= t}
//
// and its weighted L^q norm ψ_{n,q}(ϑ) = (∫_0^∞ |η_n(t, ϑ)|^q w(t) dt)^{1/q}.
// For w(t) = e^{-at} and q = 2 each family has a closed form for ψ², built
// from double sums over ordered pairs of order statistics.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "smde/models.hpp"

namespace smde {

struct LqWeightConfig {
  double q = 2.0;  // >= 1
  double a = 1.0;  // weight e^{-at}, > 0

  /// Throws DomainError unless q >= 1 and a > 0.
  void validate() const;
};

enum class ObjectiveMethod { ClosedForm, Quadrature, LimitA };

struct ObjectiveValue {
  double value = 0.0;
  ObjectiveMethod method = ObjectiveMethod::Quadrature;
};

/// A positive integrable weight on (0, ∞) with its tail integral
/// tail(x) = ∫_x^∞ w(t) dt in closed form.
struct Weight {
  std::function<double(double)> density;
  std::function<double(double)> tail;

  static Weight exponential(double a);
};

double eta_n(double t, const ParamVector& params, const Sample& s);

/// η_n restricted to each inter-knot segment is affine: on [X_(i), X_(i+1))
/// (with X_(0) = 0) it equals intercept[i] + slope[i] * t, and for
/// t >= X_(n) it is the constant `tail`.
struct EtaSegments {
  std::vector<double> knots;  // 0, X_(1), ..., X_(n)
  std::vector<double> intercept;
  std::vector<double> slope;
  double tail = 0.0;

  double operator()(double t) const;
};

EtaSegments eta_segments(const ParamVector& params, const Sample& s);

/// ψ_{n,q} by adaptive Gauss–Kronrod on each inter-knot segment (split again
/// where η_n changes sign) plus the closed-form tail beyond X_(n).
/// Relative tolerance 1e-9, absolute floor 1e-14.
/// Throws QuadratureError if a segment fails to converge.
ObjectiveValue psi_quadrature(const ParamVector& params, const Sample& s,
                              const LqWeightConfig& cfg);
ObjectiveValue psi_quadrature(const ParamVector& params, const Sample& s, double q,
                              const Weight& weight);

struct ExponentialPsi {
  double psi2;
  double Psi1;
  double Psi2;
  double Psi3;
};

/// ψ²_{n,2} = ϑ² Ψ₁ + ϑ Ψ₂ + Ψ₃ for the exponential family.
ExponentialPsi psi2_closed_exponential(double theta, const Sample& s, double a);

struct RayleighPsi {
  double psi2;
  double Psi1;
  double Psi2;
  double Psi3;
};

/// ψ²_{n,2} = ϑ⁻⁴ Ψ̃₁ + ϑ⁻² Ψ̃₂ + Ψ̃₃ for the Rayleigh family.
RayleighPsi psi2_closed_rayleigh(double theta, const Sample& s, double a);

/// Per-sample pieces of the Burr closed form that do not depend on (c, k).
struct BurrPrecomputed {
  double a;
  std::vector<double> x;        // order statistics
  std::vector<double> log_x;
  std::vector<double> e;        // e^{-a X_(j)}
  std::vector<double> one_minus_e;
  std::vector<double> x_e;      // X_(j) e^{-a X_(j)}
  double sum_j_e;               // Σ j e^{-a X_(j)}
  double sum_e;                 // Σ e^{-a X_(j)}

  BurrPrecomputed(const Sample& s, double a);
};

/// The Burr Type XII ψ²_{n,2}(c, k).
double psi2_closed_burr(double c, double k, const Sample& s, double a);
double psi2_closed_burr(double c, double k, const BurrPrecomputed& pre);

/// Coefficients of the exp-poly (d = 3, ϑ₂ = 0) ψ²:
///   ψ² = ϑ₁² Ψ̄₁ + ϑ₃² Ψ̄₂ + ϑ₁ϑ₃ Ψ̄₃ + ϑ₁ Ψ̄₄ + ϑ₃ Ψ̄₅ + constant.
struct ExpPolyPsi {
  double psi2;
  double Psi1;
  double Psi2;
  double Psi3;
  double Psi4;
  double Psi5;
  double constant;

  double evaluate(double theta1, double theta3) const;
  /// ∂ψ²/∂(ϑ₁, ϑ₃)
  std::array<double, 2> gradient(double theta1, double theta3) const;
};

/// Valid for any real (ϑ₁, ϑ₃); ϑ₃ < 0 matters only for reading it as a density.
ExpPolyPsi psi2_closed_exppoly(double theta1, double theta3, const Sample& s, double a);

/// lim_{a→∞} a^{q+1} ψ_{n,q}^q = Γ(q+1) |(1/n) Σ_j u_ϑ(X_j)|^q.
double limit_objective(const ParamVector& params, const Sample& s, double q);

/// ψ² via the family's closed form (q = 2, w = e^{-at}).
ObjectiveValue psi2_closed(const ParamVector& params, const Sample& s, double a);

}  // namespace smde
