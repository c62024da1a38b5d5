#include <algorithm>
#include <cassert>

#include "smde/kernels.hpp"

namespace smde::kernels::scalar {

namespace {

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

}  // namespace

double sum(std::span<const double> f) {
  const std::size_t n = f.size();
  if (n > kCompensationThreshold) {
    Kahan acc;
    for (double v : f) acc.add(v);
    return acc.s;
  }
  double s = 0.0;
  for (double v : f) s += v;
  return s;
}

double dot(std::span<const double> f, std::span<const double> g) {
  assert(f.size() == g.size());
  const std::size_t n = f.size();
  if (n > kCompensationThreshold) {
    Kahan acc;
    for (std::size_t j = 0; j < n; ++j) acc.add(f[j] * g[j]);
    return acc.s;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += f[j] * g[j];
  return s;
}

double min_dot(std::span<const double> u, std::span<const double> x, double t) {
  assert(u.size() == x.size());
  const std::size_t n = u.size();
  if (n > kCompensationThreshold) {
    Kahan acc;
    for (std::size_t j = 0; j < n; ++j) acc.add(u[j] * std::min(x[j], t));
    return acc.s;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += u[j] * std::min(x[j], t);
  return s;
}

double pair_sum(std::span<const double> f, std::span<const double> g) {
  assert(f.size() == g.size());
  const std::size_t n = f.size();
  if (n > kCompensationThreshold) {
    Kahan outer;
    for (std::size_t j = 0; j < n; ++j) {
      Kahan inner;
      const double fj = f[j];
      for (std::size_t k = j + 1; k < n; ++k) inner.add(fj * g[k]);
      outer.add(inner.s);
    }
    return outer.s;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double inner = 0.0;
    const double fj = f[j];
    for (std::size_t k = j + 1; k < n; ++k) inner += fj * g[k];
    s += inner;
  }
  return s;
}

}  // namespace smde::kernels::scalar
