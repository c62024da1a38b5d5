// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <cmath>

#include "smde/kernels.hpp"

namespace smde::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Lane-wise Kahan accumulator.
struct KahanVec {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  void add(__m256d v) {
    const __m256d y = _mm256_sub_pd(v, c);
    const __m256d t = _mm256_add_pd(s, y);
    c = _mm256_sub_pd(_mm256_sub_pd(t, s), y);
    s = t;
  }
};

struct Kahan {
  double s = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// Folds compensated lanes plus a scalar tail into one value. The fold uses
// Neumaier's variant: lane partial sums can be large with opposite signs.
template <std::size_t N>
inline double finish(const KahanVec (&acc)[N], const Kahan& tail) {
  double s = 0.0, err = 0.0;
  auto add = [&](double x) {
    const double t = s + x;
    err += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  alignas(32) double ls[4];
  alignas(32) double lc[4];
  for (const KahanVec& a : acc) {
    _mm256_store_pd(ls, a.s);
    _mm256_store_pd(lc, a.c);
    for (int i = 0; i < 4; ++i) {
      add(ls[i]);
      add(-lc[i]);
    }
  }
  add(tail.s);
  add(-tail.c);
  return s + err;
}

// Compensated Σ load(k) over [begin, n). Four independent accumulators keep
// the add/sub latency chain off the critical path.
template <class Load, class Scalar>
inline double compensated_sum(Load load, Scalar scalar, std::size_t begin, std::size_t n) {
  KahanVec acc[4];
  std::size_t k = begin;
  for (; k + 16 <= n; k += 16) {
    acc[0].add(load(k));
    acc[1].add(load(k + 4));
    acc[2].add(load(k + 8));
    acc[3].add(load(k + 12));
  }
  for (; k + 4 <= n; k += 4) acc[0].add(load(k));
  Kahan tail;
  for (; k < n; ++k) tail.add(scalar(k));
  return finish(acc, tail);
}

// Σ_{k=begin}^{n-1} scale * g_k
inline double scaled_tail_sum(double scale, const double* g, std::size_t begin, std::size_t n,
                              bool compensated) {
  const __m256d vs = _mm256_set1_pd(scale);
  if (compensated)
    return compensated_sum([&](std::size_t k) { return _mm256_mul_pd(vs, _mm256_loadu_pd(g + k)); },
                           [&](std::size_t k) { return scale * g[k]; }, begin, n);
  std::size_t k = begin;
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  for (; k + 8 <= n; k += 8) {
    a0 = _mm256_fmadd_pd(vs, _mm256_loadu_pd(g + k), a0);
    a1 = _mm256_fmadd_pd(vs, _mm256_loadu_pd(g + k + 4), a1);
  }
  for (; k + 4 <= n; k += 4) a0 = _mm256_fmadd_pd(vs, _mm256_loadu_pd(g + k), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; k < n; ++k) s += scale * g[k];
  return s;
}

}  // namespace

double sum(std::span<const double> f) {
  const std::size_t n = f.size();
  const double* p = f.data();
  std::size_t j = 0;
  if (n > kCompensationThreshold)
    return compensated_sum([&](std::size_t k) { return _mm256_loadu_pd(p + k); },
                           [&](std::size_t k) { return p[k]; }, 0, n);
  __m256d a0 = _mm256_setzero_pd();
  for (; j + 4 <= n; j += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + j));
  double s = hsum(a0);
  for (; j < n; ++j) s += p[j];
  return s;
}

double dot(std::span<const double> f, std::span<const double> g) {
  assert(f.size() == g.size());
  const std::size_t n = f.size();
  const double* a = f.data();
  const double* b = g.data();
  std::size_t j = 0;
  if (n > kCompensationThreshold)
    return compensated_sum(
        [&](std::size_t k) { return _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)); },
        [&](std::size_t k) { return a[k] * b[k]; }, 0, n);
  __m256d a0 = _mm256_setzero_pd();
  for (; j + 4 <= n; j += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), a0);
  double s = hsum(a0);
  for (; j < n; ++j) s += a[j] * b[j];
  return s;
}

double min_dot(std::span<const double> u, std::span<const double> x, double t) {
  assert(u.size() == x.size());
  const std::size_t n = u.size();
  const double* a = u.data();
  const double* b = x.data();
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t j = 0;
  if (n > kCompensationThreshold)
    return compensated_sum(
        [&](std::size_t k) {
          return _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_min_pd(_mm256_loadu_pd(b + k), vt));
        },
        [&](std::size_t k) { return a[k] * std::min(b[k], t); }, 0, n);
  __m256d a0 = _mm256_setzero_pd();
  for (; j + 4 <= n; j += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_min_pd(_mm256_loadu_pd(b + j), vt), a0);
  double s = hsum(a0);
  for (; j < n; ++j) s += a[j] * std::min(b[j], t);
  return s;
}

double pair_sum(std::span<const double> f, std::span<const double> g) {
  assert(f.size() == g.size());
  const std::size_t n = f.size();
  const bool compensated = n > kCompensationThreshold;
  if (compensated) {
    Kahan outer;
    for (std::size_t j = 0; j < n; ++j)
      outer.add(scaled_tail_sum(f[j], g.data(), j + 1, n, true));
    return outer.s;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += scaled_tail_sum(f[j], g.data(), j + 1, n, false);
  return s;
}

}  // namespace smde::kernels::avx2
