#pragma once

#include <ostream>

#include "torpsido/difference.hpp"
#include "torpsido/grid.hpp"

namespace torpsido {

/// Transition interval [inner, outer] of the radial cutoff psi. The support
/// conditions of a dyadic decomposition require 1 <= inner < outer <= 2.
struct BumpParams {
  double inner = 1.0;
  double outer = 2.0;
};

namespace detail {
inline double mollifier_tail(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace detail

/// psi(t) = 1 on [0, inner], 0 on [outer, inf), smooth and non-increasing between.
inline double radial_cutoff(double t, const BumpParams& bp = {}) {
  if (t <= bp.inner) return 1.0;
  if (t >= bp.outer) return 0.0;
  const double u = (t - bp.inner) / (bp.outer - bp.inner);
  const double a = detail::mollifier_tail(1.0 - u);
  const double b = detail::mollifier_tail(u);
  return a / (a + b);
}

/// phi~_j(xi) as a function of |xi|.
inline double radial_block(int j, double radius, const BumpParams& bp = {}) {
  if (j < 0) return 0.0;
  if (j == 0) return radial_cutoff(radius, bp);
  return radial_cutoff(std::ldexp(radius, -j), bp) - radial_cutoff(std::ldexp(radius, 1 - j), bp);
}

/// Largest j whose annulus 2^{j-1} <= |k| meets the lattice: 4^{j-1} <= n Kmax^2.
inline int dyadic_jmax(const FrequencyLattice& lattice) {
  const double r2 = static_cast<double>(lattice.dim()) * lattice.kmax() * lattice.kmax();
  int j = 0;
  while (std::ldexp(1.0, 2 * j) <= r2) ++j;  // 4^{(j+1)-1} <= r2
  return j;
}

/**
 * Dyadic decomposition (phi_j) of Z^n restricted from the radial partition
 * phi~_0 = psi(|xi|), phi~_j = psi(2^{-j}|xi|) - psi(2^{1-j}|xi|).
 *
 * phi_j is tabulated on the lattice for j = 0..jmax. `value` evaluates the
 * closed form at any k, which is what operators use off the lattice.
 */
class DyadicDecomposition {
 public:
  static DyadicDecomposition build(const FrequencyLattice& lattice, BumpParams bump = {}) {
    if (!(bump.inner >= 1.0 && bump.outer <= 2.0 && bump.inner < bump.outer))
      throw std::invalid_argument(
          "dyadic: bump parameters violate support bounds (need 1 <= inner < outer <= 2)");
    DyadicDecomposition D(lattice, bump, dyadic_jmax(lattice));
    std::vector<int> k(lattice.dim());
    for (int j = 0; j <= D.jmax_; ++j)
      for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
        lattice.point(idx, k);
        D.table_[j * lattice.size() + idx] = radial_block(j, euclidean_norm(std::span<const int>(k)), bump);
      }
    return D;
  }

  /// Wraps an externally supplied table (used to check corrupted inputs).
  static DyadicDecomposition from_table(const FrequencyLattice& lattice, int jmax,
                                        std::vector<double> table, BumpParams bump = {}) {
    if (table.size() != static_cast<std::size_t>(jmax + 1) * lattice.size())
      throw std::invalid_argument("dyadic: table shape mismatch");
    DyadicDecomposition D(lattice, bump, jmax);
    D.table_ = std::move(table);
    return D;
  }

  const FrequencyLattice& lattice() const { return lattice_; }
  const BumpParams& bump() const { return bump_; }
  int jmax() const { return jmax_; }

  double phi(int j, std::size_t idx) const {
    if (j < 0 || j > jmax_) return 0.0;
    return table_[j * lattice_.size() + idx];
  }

  /// phi_j(k) for any k in Z^n and j >= 0 (table on the lattice, closed form off it).
  double value(int j, std::span<const int> k) const {
    if (j < 0) return 0.0;
    if (j <= jmax_ && lattice_.contains(k)) return phi(j, lattice_.index_of(k));
    return radial_block(j, euclidean_norm(k), bump_);
  }

  double chi_value(int j, std::span<const int> k) const {
    return value(j - 1, k) + value(j, k) + value(j + 1, k);
  }

  std::span<const double> table() const { return table_; }

  /// Nonzero entries as CSV rows: j,k_1..k_n,value.
  void write_csv(std::ostream& os) const {
    os << "j";
    for (int i = 1; i <= lattice_.dim(); ++i) os << ",k_" << i;
    os << ",value\n";
    std::vector<int> k(lattice_.dim());
    os.precision(17);
    for (int j = 0; j <= jmax_; ++j)
      for (std::size_t idx = 0; idx < lattice_.size(); ++idx) {
        const double v = phi(j, idx);
        if (v == 0.0) continue;
        lattice_.point(idx, k);
        os << j;
        for (int c : k) os << ',' << c;
        os << ',' << v << '\n';
      }
  }

 private:
  DyadicDecomposition(FrequencyLattice lattice, BumpParams bump, int jmax)
      : lattice_(lattice), bump_(bump), jmax_(jmax), table_((jmax + 1) * lattice.size(), 0.0) {}

  FrequencyLattice lattice_;
  BumpParams bump_;
  int jmax_;
  std::vector<double> table_;  // block-major
};

struct ChiBlock {
  int j = 0;
  std::vector<double> values;  // on the decomposition's lattice
};

/// chi_j = phi_{j-1} + phi_j + phi_{j+1} with phi_{-1} = 0.
inline ChiBlock chi(const DyadicDecomposition& D, int j) {
  if (j < 0 || j > D.jmax()) throw std::out_of_range("chi: block index out of range");
  const auto& L = D.lattice();
  ChiBlock c{j, std::vector<double>(L.size())};
  std::vector<int> k(L.dim());
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    c.values[idx] = D.chi_value(j, k);
  }
  return c;
}

/// Two-window uniformity: max over the upper half of a j-ordered series
/// divided by max over the lower half (each half has floor(L/2) entries).
inline double two_window_ratio(std::span<const double> series) {
  const std::size_t half = series.size() / 2;
  if (half == 0) return 0.0;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < half; ++i) lo = std::max(lo, series[i]);
  for (std::size_t i = series.size() - half; i < series.size(); ++i) hi = std::max(hi, series[i]);
  if (hi == 0.0) return 0.0;
  if (lo == 0.0) return infinity;
  return hi / lo;
}

struct AlphaBound {
  MultiIndex alpha;
  double c_alpha = 0.0;      // max over j >= 1
  double c_alpha_j0 = 0.0;   // block j = 0, reported separately
  std::vector<double> per_j; // per-block maxima, j = 0..jmax
  double window_ratio = 0.0; // two-window ratio over j = 1..jmax
  bool uniform = false;
};

struct DyadicReport {
  bool support_ok = true;
  bool range_ok = true;
  bool partition_ok = true;
  double partition_error = 0.0;  // on |k| <= 2^{jmax-1}
  bool overlap_ok = true;        // at most three consecutive active blocks per k
  bool bounds_ok = true;
  std::vector<AlphaBound> bounds;
  std::string first_failure;

  bool passed() const { return support_ok && range_ok && partition_ok && overlap_ok && bounds_ok; }
};

/// Checks support (exactly), partition of unity (to 1e-12 on the covered
/// region) and the difference bounds |Delta^alpha phi_j(k)| <= c_alpha <k>^{-|alpha|}.
inline DyadicReport verify_dyadic(const DyadicDecomposition& D, int rho_check,
                                  double growth_factor = 2.0) {
  const auto& L = D.lattice();
  const int n = L.dim();
  DyadicReport rep;
  auto fail = [&rep](const std::string& what) {
    if (rep.first_failure.empty()) rep.first_failure = what;
  };

  std::vector<int> k(n);
  const double covered = std::ldexp(1.0, D.jmax() - 1);
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    long long r2 = 0;
    for (int v : k) r2 += static_cast<long long>(v) * v;
    double sum = 0.0;
    int first = -1, last = -1, count = 0;
    for (int j = 0; j <= D.jmax(); ++j) {
      const double v = D.phi(j, idx);
      sum += v;
      if (v < 0.0 || v > 1.0) {
        rep.range_ok = false;
        fail("range: phi_" + std::to_string(j) + " outside [0,1]");
      }
      if (v != 0.0) {
        const bool inside = (j == 0) ? (r2 <= 4)
                                     : (std::ldexp(1.0, 2 * (j - 1)) <= static_cast<double>(r2) &&
                                        static_cast<double>(r2) <= std::ldexp(1.0, 2 * (j + 1)));
        if (!inside) {
          rep.support_ok = false;
          fail("support: phi_" + std::to_string(j) + " nonzero outside its annulus");
        }
        if (first < 0) first = j;
        last = j;
        ++count;
      }
    }
    if (count > 0 && (last - first + 1 > 3 || last - first + 1 != count)) {
      rep.overlap_ok = false;
      fail("overlap: more than three consecutive active blocks");
    }
    if (std::sqrt(static_cast<double>(r2)) <= covered) {
      rep.partition_error = std::max(rep.partition_error, std::abs(sum - 1.0));
    }
  }
  if (rep.partition_error > 1e-12) {
    rep.partition_ok = false;
    fail("partition: sum of blocks differs from 1");
  }

  // Difference bounds on a box enlarged at the top by rho_check.
  const int K = L.kmax();
  const LatticeBox box = LatticeBox::cube(n, -K, K + rho_check);
  const LatticeBox need = LatticeBox::cube(n, -K, K);
  for (const auto& alpha : multi_indices_up_to(n, rho_check)) {
    AlphaBound ab;
    ab.alpha = alpha;
    ab.per_j.assign(D.jmax() + 1, 0.0);
    const int a = order(alpha);
    for (int j = 0; j <= D.jmax(); ++j) {
      auto tab = LatticeTable<double>::tabulate(box, 1, [&](std::span<const int> kk, std::span<double> out) {
        out[0] = D.value(j, kk);
      });
      auto diff = discrete_difference(tab, alpha, need);
      double m = 0.0;
      for (std::size_t idx = 0; idx < L.size(); ++idx) {
        L.point(idx, k);
        m = std::max(m, std::pow(bracket(std::span<const int>(k)), a) * std::abs(diff.at(k)[0]));
      }
      ab.per_j[j] = m;
    }
    ab.c_alpha_j0 = ab.per_j[0];
    for (int j = 1; j <= D.jmax(); ++j) ab.c_alpha = std::max(ab.c_alpha, ab.per_j[j]);
    if (D.jmax() >= 1) {
      ab.window_ratio = two_window_ratio(std::span<const double>(ab.per_j).subspan(1));
    }
    ab.uniform = std::isfinite(ab.c_alpha) && ab.window_ratio <= growth_factor;
    if (!ab.uniform) {
      rep.bounds_ok = false;
      fail("bounds: difference bound not uniform in j");
    }
    rep.bounds.push_back(std::move(ab));
  }
  return rep;
}

}  // namespace torpsido
