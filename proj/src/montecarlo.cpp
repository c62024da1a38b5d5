#include "smde/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "smde/error.hpp"

namespace smde {

namespace {

struct Name {
  EstimatorKind kind;
  std::string_view id;
};

constexpr Name kNames[] = {
    {EstimatorKind::ML, "ml"},        {EstimatorKind::MSE, "mse"},
    {EstimatorKind::CvM, "cvm"},      {EstimatorKind::Moment, "mom"},
    {EstimatorKind::AM, "am"},        {EstimatorKind::ScoreMatching, "sm"},
    {EstimatorKind::NCE, "nce"},      {EstimatorKind::Identity, "identity"},
    {EstimatorKind::Stein, "stein"},
};

// Shortest decimal that round-trips, so "stein(0.25)" rather than "stein(0.25000000000000000)".
std::string format_tuning(double a) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, a);
  return {buf, res.ptr};
}

}  // namespace

std::string estimator_id(const EstimatorSpec& spec) {
  for (const Name& n : kNames) {
    if (n.kind != spec.kind) continue;
    if (spec.kind == EstimatorKind::Stein && spec.tuning)
      return "stein(" + format_tuning(*spec.tuning) + ")";
    return std::string(n.id);
  }
  return "unknown";
}

EstimatorSpec parse_estimator(std::string_view id) {
  std::string_view head = id;
  std::optional<double> tuning;
  if (const auto open = id.find('('); open != std::string_view::npos) {
    if (id.back() != ')') throw DomainError("malformed estimator '" + std::string(id) + "'");
    head = id.substr(0, open);
    const std::string_view arg = id.substr(open + 1, id.size() - open - 2);
    double a = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), a);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw DomainError("malformed tuning in '" + std::string(id) + "'");
    tuning = a;
  }
  for (const Name& n : kNames) {
    if (n.id != head) continue;
    if (tuning && n.kind != EstimatorKind::Stein)
      throw DomainError("estimator '" + std::string(head) + "' takes no tuning parameter");
    if (tuning && !(*tuning > 0.0 && std::isfinite(*tuning)))
      throw DomainError("weight parameter must satisfy a > 0");
    return {n.kind, tuning};
  }
  throw DomainError("unknown estimator '" + std::string(id) + "'");
}

bool supports(Family family, EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Stein:
    case EstimatorKind::Identity:
      return true;
    case EstimatorKind::ML:
    case EstimatorKind::CvM:
      return family != Family::ExpPoly;
    case EstimatorKind::MSE:
      return family == Family::Exponential;
    case EstimatorKind::Moment:
    case EstimatorKind::AM:
      return family == Family::Rayleigh;
    case EstimatorKind::ScoreMatching:
    case EstimatorKind::NCE:
      return family == Family::ExpPoly;
  }
  return false;
}

EstimateReport apply_estimator(Family family, const Sample& s, const EstimatorSpec& spec,
                               const ParamVector& theta0, std::uint64_t seed,
                               std::uint64_t replication) {
  if (!supports(family, spec.kind))
    throw UnsupportedFamilyError("estimator '" + estimator_id(spec) + "' does not apply to " +
                                 std::string(to_string(family)));
  switch (spec.kind) {
    case EstimatorKind::Stein: {
      if (!spec.tuning) throw DomainError("Stein estimator needs a weight parameter");
      const double a = *spec.tuning;
      switch (family) {
        case Family::Exponential: return fit_stein_exponential(s, a);
        case Family::Rayleigh: return fit_stein_rayleigh(s, a);
        case Family::Burr: return fit_stein_burr(s, a);
        case Family::ExpPoly: return fit_stein_exppoly(s, a);
      }
      break;
    }
    case EstimatorKind::ML:
      switch (family) {
        case Family::Exponential: return fit_mle_exponential(s);
        case Family::Rayleigh: return fit_mle_rayleigh(s);
        case Family::Burr: return fit_mle_burr(s);
        case Family::ExpPoly: break;
      }
      break;
    case EstimatorKind::MSE: return fit_mse_exponential(s);
    case EstimatorKind::CvM: return fit_cvm(family, s);
    case EstimatorKind::Moment: return fit_moment_rayleigh(s);
    case EstimatorKind::AM: return fit_am_rayleigh(s);
    case EstimatorKind::ScoreMatching: return fit_score_matching_exppoly(s);
    case EstimatorKind::NCE: {
      NceConfig cfg;
      cfg.seed = seed;
      cfg.stream = auxiliary_stream(replication);
      return fit_nce_exppoly(s, cfg);
    }
    case EstimatorKind::Identity:
      if (theta0.family() != family) throw DomainError("identity estimator: family mismatch");
      return {theta0, 0.0, true};
  }
  throw UnsupportedFamilyError("estimator does not apply to this family");
}

double pairwise_sum(std::span<const double> v) noexcept {
  constexpr std::size_t kBlock = 8;
  if (v.size() <= kBlock) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

CellRun run_cell_detailed(Family family, const ParamVector& theta0, std::size_t n,
                          const EstimatorSpec& spec, std::size_t D, std::uint64_t seed,
                          const RunOptions& opts) {
  if (D == 0) throw DomainError("replication count D must be at least 1");
  if (n == 0) throw DomainError("sample size must be at least 1");
  if (theta0.family() != family) throw DomainError("theta0 belongs to another family");
  if (!supports(family, spec.kind))
    throw DomainError("estimator '" + estimator_id(spec) + "' does not apply to " +
                      std::string(to_string(family)));
  if (spec.kind == EstimatorKind::Stein && !spec.tuning)
    throw DomainError("Stein estimator needs a weight parameter");

  const std::size_t dim = theta0.size();
  // One slot per replication; empty means the replication failed.
  std::vector<std::vector<double>> slot(D);

  auto replicate = [&](std::size_t k) {
    try {
      RandomStream rng(seed, k);
      const Sample s = sample(theta0, n, rng);
      const EstimateReport rep = apply_estimator(family, s, spec, theta0, seed, k);
      if (!rep.converged || rep.estimate.size() != dim) return;
      std::vector<double> err(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!std::isfinite(rep.estimate[i])) return;
        err[i] = rep.estimate[i] - theta0[i];
      }
      slot[k] = std::move(err);
    } catch (const std::exception&) {
      // counted as a failure below
    }
  };

  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, D));
  if (threads <= 1) {
    for (std::size_t k = 0; k < D; ++k) replicate(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < D;) replicate(k);
      });
  }

  CellRun run;
  McSummary& m = run.summary;
  m.family = family;
  m.theta0 = theta0;
  m.n = n;
  m.estimator_id = estimator_id(spec);
  m.tuning = spec.tuning;
  m.D = D;
  m.seed = seed;
  for (auto& e : slot)
    if (!e.empty()) run.errors.push_back(std::move(e));
  m.failure_count = D - run.errors.size();

  const std::size_t kept = run.errors.size();
  m.bias.assign(dim, kept ? 0.0 : std::nan(""));
  m.mse.assign(dim, kept ? 0.0 : std::nan(""));
  if (kept == 0) return run;
  std::vector<double> col(kept), sq(kept);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < kept; ++k) {
      col[k] = run.errors[k][i];
      sq[k] = col[k] * col[k];
    }
    m.bias[i] = pairwise_sum(col) / static_cast<double>(kept);
    m.mse[i] = pairwise_sum(sq) / static_cast<double>(kept);
  }
  return run;
}

McSummary run_cell(Family family, const ParamVector& theta0, std::size_t n,
                   const EstimatorSpec& spec, std::size_t D, std::uint64_t seed,
                   const RunOptions& opts) {
  return run_cell_detailed(family, theta0, n, spec, D, seed, opts).summary;
}

namespace {

std::vector<double> column_se(std::size_t dim, const std::vector<std::vector<double>>& errors,
                              bool squared) {
  std::vector<double> se(dim, 0.0);
  const std::size_t m = errors.size();
  if (m < 2) return se;
  std::vector<double> col(m), dev(m);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double e = errors[k][i];
      col[k] = squared ? e * e : e;
    }
    const double mean = pairwise_sum(col) / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) dev[k] = (col[k] - mean) * (col[k] - mean);
    const double var = pairwise_sum(dev) / static_cast<double>(m - 1);
    se[i] = std::sqrt(var / static_cast<double>(m));
  }
  return se;
}

}  // namespace

std::vector<double> mc_standard_error(const McSummary& summary,
                                      const std::vector<std::vector<double>>& errors) {
  return column_se(summary.bias.size(), errors, false);
}

std::vector<double> mc_mse_standard_error(const McSummary& summary,
                                          const std::vector<std::vector<double>>& errors) {
  return column_se(summary.mse.size(), errors, true);
}

}  // namespace smde
