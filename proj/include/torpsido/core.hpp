#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace torpsido {

using cplx = std::complex<double>;
using MultiIndex = std::vector<int>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Japanese bracket <k> = (1 + |k|^2)^{1/2}.
template <typename Int>
double bracket(std::span<const Int> k) {
  double s = 1.0;
  for (auto v : k) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

inline double bracket(const std::vector<int>& k) { return bracket(std::span<const int>(k)); }

template <typename Int>
double euclidean_norm(std::span<const Int> k) {
  double s = 0.0;
  for (auto v : k) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

inline int order(std::span<const int> alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// All multi-indices in N_0^n with |alpha| <= max_order, graded then lexicographic.
inline std::vector<MultiIndex> multi_indices_up_to(int n, int max_order) {
  std::vector<MultiIndex> out;
  for (int total = 0; total <= max_order; ++total) {
    MultiIndex a(n, 0);
    // enumerate compositions of `total` into n parts
    auto rec = [&](auto&& self, int axis, int remaining) -> void {
      if (axis == n - 1) {
        a[axis] = remaining;
        out.push_back(a);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        a[axis] = v;
        self(self, axis + 1, remaining - v);
      }
    };
    if (n == 0) {
      if (total == 0) out.emplace_back();
      continue;
    }
    rec(rec, 0, total);
  }
  return out;
}

inline std::vector<MultiIndex> multi_indices_exact(int n, int ord) {
  std::vector<MultiIndex> out;
  for (auto& a : multi_indices_up_to(n, ord))
    if (order(a) == ord) out.push_back(a);
  return out;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Torus distance: componentwise difference reduced to (-pi, pi], then Euclidean norm.
inline double torus_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = std::remainder(x[i] - y[i], 2.0 * pi);
    if (t <= -pi) t += 2.0 * pi;
    s += t * t;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Small dense d x d complex matrices, stored row-major in flat spans.

/// Spectral norm (largest singular value) of a row-major d x d matrix.
inline double spectral_norm(std::span<const cplx> a, int d) {
  if (d == 1) return std::abs(a[0]);
  if (d == 2) {
    // largest eigenvalue of the Hermitian H = A^* A
    const double h11 = std::norm(a[0]) + std::norm(a[2]);
    const double h22 = std::norm(a[1]) + std::norm(a[3]);
    const cplx h12 = std::conj(a[0]) * a[1] + std::conj(a[2]) * a[3];
    const double half = 0.5 * (h11 - h22);
    return std::sqrt(0.5 * (h11 + h22) + std::sqrt(half * half + std::norm(h12)));
  }
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), d, d);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

/// out += A v
inline void matvec_accumulate(std::span<const cplx> a, std::span<const cplx> v,
                              std::span<cplx> out, int d) {
  for (int r = 0; r < d; ++r) {
    cplx s = 0.0;
    for (int c = 0; c < d; ++c) s += a[r * d + c] * v[c];
    out[r] += s;
  }
}

/// out = A B
inline void matmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out, int d) {
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      cplx s = 0.0;
      for (int t = 0; t < d; ++t) s += a[r * d + t] * b[t * d + c];
      out[r * d + c] = s;
    }
}

inline double vector_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Worker pool cap. Work is split into contiguous chunks whose results are
// written to disjoint slots, so output never depends on the schedule.

inline unsigned& thread_cap() {
  static unsigned cap = 1;
  return cap;
}

inline void set_thread_cap(unsigned t) { thread_cap() = std::max(1u, t); }

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_cap(), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace torpsido
