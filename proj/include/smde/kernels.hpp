#pragma once

// Reduction kernels behind the closed-form objectives and η_n.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The public entry points dispatch once at first use based on CPUID;
// set SMDE_KERNELS=scalar in the environment to pin the reference path.
//
// Inputs longer than kCompensationThreshold are accumulated with Kahan
// compensation (lane-wise in the vector variants).

#include <cstddef>
#include <span>
#include <string_view>

namespace smde::kernels {

inline constexpr std::size_t kCompensationThreshold = 1000;

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Overrides the dispatch decision. Throws if the ISA is not supported here.
void set_active_isa(Isa isa);

/// Σ_j f_j
double sum(std::span<const double> f);
/// Σ_j f_j g_j
double dot(std::span<const double> f, std::span<const double> g);
/// Σ_j u_j min(x_j, t)
double min_dot(std::span<const double> u, std::span<const double> x, double t);
/// Σ_{j<k} f_j g_k, evaluated term by term over ascending j then k.
double pair_sum(std::span<const double> f, std::span<const double> g);

namespace scalar {
double sum(std::span<const double> f);
double dot(std::span<const double> f, std::span<const double> g);
double min_dot(std::span<const double> u, std::span<const double> x, double t);
double pair_sum(std::span<const double> f, std::span<const double> g);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SMDE_HAVE_AVX2_KERNELS 1
namespace avx2 {
double sum(std::span<const double> f);
double dot(std::span<const double> f, std::span<const double> g);
double min_dot(std::span<const double> u, std::span<const double> x, double t);
double pair_sum(std::span<const double> f, std::span<const double> g);
}  // namespace avx2
#endif

}  // namespace smde::kernels
