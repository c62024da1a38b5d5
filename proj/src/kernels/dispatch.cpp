#include <atomic>
#include <cstdlib>
#include <string>

#include "smde/error.hpp"
#include "smde/kernels.hpp"

namespace smde::kernels {

namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("SMDE_KERNELS"); env != nullptr && std::string(env) == "scalar")
    return Isa::Scalar;
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SMDE_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw Error("kernel ISA '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  active().store(isa, std::memory_order_relaxed);
}

#if defined(SMDE_HAVE_AVX2_KERNELS)
#define SMDE_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define SMDE_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double sum(std::span<const double> f) { return SMDE_DISPATCH(sum, f); }

double dot(std::span<const double> f, std::span<const double> g) {
  return SMDE_DISPATCH(dot, f, g);
}

double min_dot(std::span<const double> u, std::span<const double> x, double t) {
  return SMDE_DISPATCH(min_dot, u, x, t);
}

double pair_sum(std::span<const double> f, std::span<const double> g) {
  return SMDE_DISPATCH(pair_sum, f, g);
}

#undef SMDE_DISPATCH

}  // namespace smde::kernels
