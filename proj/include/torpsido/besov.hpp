#pragma once

#include <ostream>

#include "torpsido/psido.hpp"

namespace torpsido {

/// Smoothness s and integrability p, q in [1, inf] (inf spelled `infinity`).
struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
};

inline void validate(const BesovParams& bp) {
  if (!(bp.p >= 1.0)) throw std::invalid_argument("besov: p must be >= 1");
  if (!(bp.q >= 1.0)) throw std::invalid_argument("besov: q must be >= 1");
  if (!std::isfinite(bp.s)) throw std::invalid_argument("besov: s must be finite");
}

/// (N^{-n} sum_m |f(x_m)|^p)^{1/p}, or max_m |f(x_m)| for p = inf.
inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const std::size_t count = f.grid.size();
  if (std::isinf(p)) return max_norm(f);
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = vector_norm(f.at(i));
    s += (p == 2.0) ? v * v : std::pow(v, p);
  }
  s *= f.grid.weight();
  return (p == 2.0) ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

/// ell^q norm of a finite sequence.
inline double lq_norm(std::span<const double> v, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), q);
  return std::pow(s, 1.0 / q);
}

struct BesovResult {
  double norm = 0.0;
  std::vector<double> block_lp;      // |op[phi_j] f|_{L^p}
  std::vector<double> contributions; // 2^{js} |op[phi_j] f|_{L^p}
  BesovParams params;

  /// Rows j, 2^{js}, block L^p, contribution.
  void write_csv(std::ostream& os) const {
    os << "j,weight,block_lp,contribution\n";
    os.precision(17);
    for (std::size_t j = 0; j < block_lp.size(); ++j)
      os << j << ',' << std::exp2(static_cast<double>(j) * params.s) << ',' << block_lp[j] << ','
         << contributions[j] << '\n';
  }
};

/// Blocks op[phi_j] f for j = 0..jmax from a single forward transform.
inline std::vector<GridFunction> dyadic_blocks(const GridFunction& f, const DyadicDecomposition& D) {
  if (f.grid.dim() != D.lattice().dim()) throw std::invalid_argument("besov: dimension mismatch");
  const FrequencyLattice L = full_lattice(f.grid);
  const SpectralCoeffs F = forward_transform(f, L);
  std::vector<GridFunction> blocks;
  blocks.reserve(D.jmax() + 1);
  std::vector<int> k(L.dim());
  for (int j = 0; j <= D.jmax(); ++j) {
    SpectralCoeffs G = F;
    for (std::size_t idx = 0; idx < L.size(); ++idx) {
      L.point(idx, k);
      const double w = D.value(j, k);
      for (auto& c : G.at(idx)) c *= w;
    }
    blocks.push_back(inverse_transform(G, f.grid));
  }
  return blocks;
}

/**
 * |f|_{B^s_{pq}} = |(2^{js} |op[phi_j] f|_{L^p})_{j=0..jmax}|_{ell^q}.
 * Blocks beyond jmax are not summed, so f must be band-limited inside the
 * region the decomposition covers.
 */
inline BesovResult besov_norm(const GridFunction& f, const DyadicDecomposition& D, const BesovParams& bp) {
  validate(bp);
  BesovResult res;
  res.params = bp;
  for (const auto& b : dyadic_blocks(f, D)) {
    const std::size_t j = res.block_lp.size();
    const double lp = lp_norm(b, bp.p);
    res.block_lp.push_back(lp);
    res.contributions.push_back(std::exp2(static_cast<double>(j) * bp.s) * lp);
  }
  res.norm = lq_norm(res.contributions, bp.q);
  return res;
}

/// d^alpha f via the multiplier (i k)^alpha over all resolved frequencies.
inline GridFunction spectral_derivative(const GridFunction& f, std::span<const int> alpha) {
  const FrequencyLattice L = full_lattice(f.grid);
  SpectralCoeffs F = forward_transform(f, L);
  std::vector<int> k(L.dim());
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    cplx w = 1.0;
    for (int i = 0; i < L.dim(); ++i)
      for (int t = 0; t < alpha[i]; ++t) w *= cplx(0.0, k[i]);
    for (auto& c : F.at(idx)) c *= w;
  }
  return inverse_transform(F, f.grid);
}

/// sum_{|alpha| <= s0} |d^alpha f|_{B^{s1}_{pq}} with s = s0 + s1, s0 integer, s1 in (0,1).
inline double besov_norm_derivative_form(const GridFunction& f, const DyadicDecomposition& D,
                                         const BesovParams& bp) {
  validate(bp);
  const double s0 = std::floor(bp.s);
  const double s1 = bp.s - s0;
  if (s0 < 0.0 || !(s1 > 0.0 && s1 < 1.0))
    throw std::invalid_argument("besov derivative form: s must split as s0 + s1 with s0 in N_0, s1 in (0,1)");
  double total = 0.0;
  for (const auto& alpha : multi_indices_up_to(f.grid.dim(), static_cast<int>(s0)))
    total += besov_norm(spectral_derivative(f, alpha), D, {s1, bp.p, bp.q}).norm;
  return total;
}

}  // namespace torpsido
