#pragma once

// Replication engine: bias and MSE of one estimator at one (family, ϑ₀, n) cell.
//
// Replication k draws its sample from RandomStream(seed, k) and any auxiliary
// randomness (NCE noise) from RandomStream(seed, auxiliary_stream(k)), so the
// result does not depend on how replications are scheduled across threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smde/estimators.hpp"
#include "smde/models.hpp"

namespace smde {

enum class EstimatorKind { Stein, ML, MSE, CvM, Moment, AM, ScoreMatching, NCE, Identity };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::ML;
  std::optional<double> tuning;  // weight parameter a, Stein only

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

/// "ml", "mse", "cvm", "mom", "am", "sm", "nce", "identity", "stein(a)".
std::string estimator_id(const EstimatorSpec& spec);
/// Inverse of estimator_id; also accepts "stein" with the tuning given separately.
/// Throws DomainError on an unknown name or a non-positive a.
EstimatorSpec parse_estimator(std::string_view id);
bool supports(Family family, EstimatorKind kind) noexcept;

/// Applies one estimator. `theta0` is used only by Identity; `seed` and
/// `replication` pick the NCE noise stream.
/// Throws UnsupportedFamilyError when the estimator does not apply to the family.
EstimateReport apply_estimator(Family family, const Sample& s, const EstimatorSpec& spec,
                               const ParamVector& theta0, std::uint64_t seed = 0,
                               std::uint64_t replication = 0);

struct McSummary {
  Family family = Family::Exponential;
  ParamVector theta0{Family::Exponential, {1.0}};
  std::size_t n = 0;
  std::string estimator_id;
  std::optional<double> tuning;
  std::size_t D = 0;
  std::vector<double> bias;  // per coordinate, over converged replications
  std::vector<double> mse;
  std::size_t failure_count = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const McSummary&, const McSummary&) = default;
};

struct CellRun {
  McSummary summary;
  std::vector<std::vector<double>> errors;  // ϑ̂ - ϑ₀ of each converged replication, in order
};

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Throws DomainError if D == 0, n == 0 or the estimator does not apply.
/// Per-replication failures (non-convergence, thrown errors, non-finite
/// estimates) are counted, never raised.
CellRun run_cell_detailed(Family family, const ParamVector& theta0, std::size_t n,
                          const EstimatorSpec& spec, std::size_t D, std::uint64_t seed,
                          const RunOptions& opts = {});
McSummary run_cell(Family family, const ParamVector& theta0, std::size_t n,
                   const EstimatorSpec& spec, std::size_t D, std::uint64_t seed,
                   const RunOptions& opts = {});

/// Elementwise sample standard deviation (divisor m - 1) of the errors over √m,
/// m = number of retained replications. Zero when m < 2.
std::vector<double> mc_standard_error(const McSummary& summary,
                                      const std::vector<std::vector<double>>& errors);

/// Standard error of the squared errors' mean, i.e. of the MSE estimate.
std::vector<double> mc_mse_standard_error(const McSummary& summary,
                                          const std::vector<std::vector<double>>& errors);

/// Fixed-shape pairwise summation; the result depends only on the values and
/// their order.
double pairwise_sum(std::span<const double> v) noexcept;

}  // namespace smde
