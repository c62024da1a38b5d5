#pragma once

// Point estimators for the four families: the Stein-type minimum L^q distance
// estimators and the classical competitors (ML, MSE-optimal, Cramér–von Mises,
// moments, score matching, noise-contrastive estimation).

#include <array>
#include <cstdint>
#include <vector>

#include "smde/models.hpp"
#include "smde/objective.hpp"

namespace smde {

struct EstimateReport {
  ParamVector params;            // always a point of Θ
  std::vector<double> estimate;  // value aggregated by Monte Carlo; equals params
                                 // unless an unconstrained estimator left Θ
  double objective_at_opt = 0.0;
  bool converged = false;
  bool fallback_used = false;
  int iterations = 0;

  EstimateReport(ParamVector p, double objective, bool ok, int iters = 0);
};

struct NceConfig {
  int nu = 10;                                   // noise sample size T = nu * n
  std::uint64_t seed = 0;                        // noise stream
  std::uint64_t stream = 0;
  std::array<double, 3> initial{0.0, -0.1, 0.0};  // (ϑ₁, ϑ₃, c)
  double theta3_upper = -1e-8;

  /// Throws DomainError unless nu >= 1 and initial[1] <= theta3_upper < 0.
  void validate() const;
};

// Exponential
EstimateReport fit_stein_exponential(const Sample& s, double a);
EstimateReport fit_mle_exponential(const Sample& s);
/// Throws SampleTooSmallError for n < 3.
EstimateReport fit_mse_exponential(const Sample& s);

// Rayleigh
EstimateReport fit_stein_rayleigh(const Sample& s, double a);
EstimateReport fit_mle_rayleigh(const Sample& s);
EstimateReport fit_moment_rayleigh(const Sample& s);
EstimateReport fit_am_rayleigh(const Sample& s);

// Burr Type XII
EstimateReport fit_stein_burr(const Sample& s, double a);
EstimateReport fit_stein_burr(const Sample& s, double a, const ParamVector& init);
EstimateReport fit_mle_burr(const Sample& s);

/// Profile score in c whose root is the Burr ML estimate of c.
double burr_profile_score(double c, const Sample& s);

/// Minimum Cramér–von Mises distance. Starts from the ML estimate (for Burr,
/// from (1, 1) when ML fails). Throws UnsupportedFamilyError for ExpPoly.
EstimateReport fit_cvm(Family family, const Sample& s);
EstimateReport fit_cvm(Family family, const Sample& s, const ParamVector& init);

/// The CvM objective (1/n) Σ_j [F(X_(j))² - F(X_(j)) (2 - (2j-1)/n)], which
/// differs from the usual statistic only by a constant.
double cvm_objective(const ParamVector& params, const Sample& s);

// Exponential-polynomial (ϑ₁, ϑ₃)
/// Closed-form minimiser of ψ². When it lands outside ϑ₃ < 0 the minimiser on
/// the boundary ϑ₃ = -1e-8 is returned with fallback_used set.
/// Throws SingularSystemError when the quadratic form is singular.
EstimateReport fit_stein_exppoly(const Sample& s, double a);

/// Unconstrained score matching; `estimate` may have ϑ₃ >= 0, in which case
/// `params` holds ϑ₃ = -1e-8 and fallback_used is set.
/// Throws SingularSystemError when the moment system is singular.
EstimateReport fit_score_matching_exppoly(const Sample& s);

/// Score-matching loss for data on (0, ∞):
///   (1/n) Σ_j [2ϑ₁X + 12ϑ₃X³ + (ϑ₁X + 3ϑ₃X³)² / 2],  X = X_j.
double score_matching_loss(double theta1, double theta3, const Sample& s);

EstimateReport fit_nce_exppoly(const Sample& s, const NceConfig& cfg);

/// Negative NCE log-likelihood at (ϑ₁, ϑ₃, c) for data `s` and noise `noise`
/// drawn from Exp(rate). Evaluated with softplus, finite for finite inputs.
double nce_objective(std::span<const double> theta, const Sample& s,
                     std::span<const double> noise, double rate);

/// Numeric argmin of ψ_{n,q} computed by quadrature.
EstimateReport fit_stein_generic(Family family, const Sample& s, const LqWeightConfig& cfg,
                                 const ParamVector& init);

}  // namespace smde
