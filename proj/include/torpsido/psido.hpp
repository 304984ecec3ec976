#pragma once

#include "torpsido/dyadic.hpp"
#include "torpsido/symbol.hpp"

namespace torpsido {

inline std::size_t& memory_limit_bytes() {
  static std::size_t limit = std::size_t{2} << 30;  // 2 GiB
  return limit;
}

inline void check_memory(std::size_t bytes, const char* what) {
  if (bytes > memory_limit_bytes())
    throw std::length_error(std::string(what) + ": table of " + std::to_string(bytes) +
                            " bytes exceeds the memory guard");
}

/**
 * Symbol sampled once on grid x lattice. x-independent symbols keep a single
 * row. Application costs O(N^n |lattice| d^2) for x-dependent symbols and one
 * inverse FFT otherwise.
 */
class SampledSymbol {
 public:
  SampledSymbol(const Symbol& a, const TorusGrid& grid, const FrequencyLattice& lattice)
      : grid_(grid), lattice_(lattice), d_(a.d), m_(a.m), x_independent_(a.x_independent) {
    validate(a);
    if (a.n != grid.dim() || a.n != lattice.dim())
      throw std::invalid_argument("SampledSymbol: dimension mismatch");
    const std::size_t rows = x_independent_ ? 1 : grid.size();
    const std::size_t dd = static_cast<std::size_t>(d_) * d_;
    check_memory(rows * lattice.size() * dd * sizeof(cplx), "SampledSymbol");
    values_.resize(rows * lattice.size() * dd);
    const std::vector<int> zero(a.n, 0);
    parallel_for(rows, [&](std::size_t xi) {
      std::vector<double> x(a.n);
      grid.node(xi, x);
      std::vector<int> k(a.n);
      for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
        lattice.point(idx, k);
        a.eval(x, k, zero, std::span<cplx>(values_).subspan((xi * lattice.size() + idx) * dd, dd));
      }
    });
  }

  const TorusGrid& grid() const { return grid_; }
  const FrequencyLattice& lattice() const { return lattice_; }
  int dim() const { return d_; }
  double order() const { return m_; }
  bool x_independent() const { return x_independent_; }

  std::span<const cplx> at(std::size_t node, std::size_t kidx) const {
    const std::size_t dd = static_cast<std::size_t>(d_) * d_;
    const std::size_t row = x_independent_ ? 0 : node;
    return std::span<const cplx>(values_).subspan((row * lattice_.size() + kidx) * dd, dd);
  }

 private:
  TorusGrid grid_;
  FrequencyLattice lattice_;
  int d_;
  double m_;
  bool x_independent_;
  std::vector<cplx> values_;
};

/// x -> sum_k e^{i k.x} a(x, k) F(k) on the sampled symbol's grid.
inline GridFunction apply_symbol(const SampledSymbol& a, const SpectralCoeffs& F) {
  if (!(F.lattice == a.lattice())) throw std::invalid_argument("apply_symbol: lattice mismatch");
  if (F.dim != a.dim()) throw std::invalid_argument("apply_symbol: fiber dimension mismatch");
  const int d = a.dim();
  const auto& L = a.lattice();
  const auto& grid = a.grid();
  if (a.x_independent()) {
    SpectralCoeffs G(L, d);
    for (std::size_t idx = 0; idx < L.size(); ++idx) matvec_accumulate(a.at(0, idx), F.at(idx), G.at(idx), d);
    return inverse_transform(G, grid);
  }
  require_nyquist(grid, L);
  const int n = grid.dim();
  const int N = grid.points_per_axis();
  const int K = L.kmax();
  // phase[m][k + K] = e^{i k x_m} along one axis
  std::vector<cplx> phase(static_cast<std::size_t>(N) * L.side());
  for (int m = 0; m < N; ++m)
    for (int k = -K; k <= K; ++k) phase[m * L.side() + (k + K)] = std::polar(1.0, k * grid.coordinate(m));

  GridFunction out(grid, d);
  parallel_for(grid.size(), [&](std::size_t node) {
    std::vector<int> mi(n), k(n);
    grid.multi_index(node, mi);
    auto dst = out.at(node);
    std::vector<cplx> v(d);
    for (std::size_t idx = 0; idx < L.size(); ++idx) {
      L.point(idx, k);
      cplx e = 1.0;
      for (int i = 0; i < n; ++i) e *= phase[mi[i] * L.side() + (k[i] + K)];
      std::fill(v.begin(), v.end(), cplx(0.0));
      matvec_accumulate(a.at(node, idx), F.at(idx), v, d);
      for (int c = 0; c < d; ++c) dst[c] += e * v[c];
    }
  });
  return out;
}

/// (op[a] f)(x) = sum_k e^{i k.x} a(x, k) f^(k) with f^ taken on `lattice`.
inline GridFunction apply_op(const SampledSymbol& a, const GridFunction& f) {
  return apply_symbol(a, forward_transform(f, a.lattice()));
}

inline GridFunction apply_op(const Symbol& a, const GridFunction& f, const FrequencyLattice& lattice) {
  if (a.d != f.dim) throw std::invalid_argument("apply_op: fiber dimension mismatch");
  return apply_op(SampledSymbol(a, f.grid, lattice), f);
}

/// Fourier multiplier with scalar weight w(k) over every frequency the grid resolves.
inline GridFunction fourier_multiplier(const GridFunction& f,
                                       const std::function<double(std::span<const int>)>& w) {
  const FrequencyLattice L = full_lattice(f.grid);
  SpectralCoeffs F = forward_transform(f, L);
  std::vector<int> k(L.dim());
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    const double wk = w(k);
    for (auto& c : F.at(idx)) c *= wk;
  }
  return inverse_transform(F, f.grid);
}

/// op[phi_j] f
inline GridFunction op_phi(const GridFunction& f, const DyadicDecomposition& D, int j) {
  return fourier_multiplier(f, [&](std::span<const int> k) { return D.value(j, k); });
}

/// op[chi_j] f
inline GridFunction op_chi(const GridFunction& f, const DyadicDecomposition& D, int j) {
  return fourier_multiplier(f, [&](std::span<const int> k) { return D.chi_value(j, k); });
}

/// F(k) phi_j(k) on the decomposition's lattice.
inline SpectralCoeffs restrict_to_block(const SpectralCoeffs& F, const DyadicDecomposition& D, int j) {
  if (!(F.lattice == D.lattice())) throw std::invalid_argument("block: lattice mismatch");
  SpectralCoeffs G = F;
  for (std::size_t idx = 0; idx < F.lattice.size(); ++idx) {
    const double w = D.phi(j, idx);
    for (auto& c : G.at(idx)) c *= w;
  }
  return G;
}

inline void require_block(const DyadicDecomposition& D, int j) {
  if (j < 0 || j > D.jmax()) throw std::out_of_range("block index out of range");
}

/// op[a] op[phi_j] f evaluated in frequency space.
inline GridFunction apply_block(const SampledSymbol& a, const GridFunction& f,
                                const DyadicDecomposition& D, int j) {
  require_block(D, j);
  return apply_symbol(a, restrict_to_block(forward_transform(f, D.lattice()), D, j));
}

inline GridFunction apply_block(const Symbol& a, const GridFunction& f, const DyadicDecomposition& D, int j) {
  return apply_block(SampledSymbol(a, f.grid, D.lattice()), f, D, j);
}

/**
 * K_j(x, y) = sum_k e^{i k.y} a(x, k) phi_j(k), tabulated at grid nodes x and
 * offset nodes y_l = 2 pi l / N. Rows are shared when a is x-independent.
 */
struct KernelBlock {
  TorusGrid grid;
  int dim = 1;
  int j = 0;
  bool shared_rows = false;
  std::vector<cplx> values;  // [row][offset][d*d]

  std::span<const cplx> at(std::size_t node, std::size_t offset) const {
    const std::size_t dd = static_cast<std::size_t>(dim) * dim;
    const std::size_t row = shared_rows ? 0 : node;
    return std::span<const cplx>(values).subspan((row * grid.size() + offset) * dd, dd);
  }
};

namespace detail {

/// Evaluates sum_k e^{i k.y_l} c(k) at every offset node via one backward FFT.
/// Frequencies congruent mod N are summed, which is exact at the nodes.
inline void offsets_from_coeffs(const TorusGrid& grid, const FrequencyLattice& L,
                                const std::function<bool(std::size_t, std::span<cplx>)>& coeff,
                                int comps, std::span<cplx> out) {
  std::vector<cplx> buf(grid.size() * comps, cplx(0.0));
  std::vector<cplx> c(comps);
  std::vector<int> k(L.dim());
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    if (!coeff(idx, c)) continue;
    L.point(idx, k);
    const std::size_t dst = grid.flat_index(k);
    for (int t = 0; t < comps; ++t) buf[dst * comps + t] += c[t];
  }
  detail::fft_inplace(buf, grid.dim(), grid.points_per_axis(), comps, FFTW_BACKWARD);
  std::copy(buf.begin(), buf.end(), out.begin());
}

}  // namespace detail

/// One row x -> K_j(x, .) over all offset nodes; out has grid.size() * d*d entries.
inline void kernel_row(const Symbol& a, const DyadicDecomposition& D, int j, const TorusGrid& grid,
                       std::span<const double> x, std::span<cplx> out) {
  const auto& L = D.lattice();
  const int dd = a.d * a.d;
  const std::vector<int> zero(a.n, 0);
  std::vector<int> k(a.n);
  detail::offsets_from_coeffs(grid, L, [&](std::size_t idx, std::span<cplx> c) {
    const double w = D.phi(j, idx);
    if (w == 0.0) return false;
    L.point(idx, k);
    a.eval(x, k, zero, c);
    for (auto& v : c) v *= w;
    return true;
  }, dd, out);
}

inline KernelBlock kernel_block(const Symbol& a, const DyadicDecomposition& D, int j, const TorusGrid& grid) {
  validate(a);
  require_block(D, j);
  if (grid.dim() != a.n || D.lattice().dim() != a.n)
    throw std::invalid_argument("kernel_block: dimension mismatch");
  KernelBlock K{grid, a.d, j, a.x_independent, {}};
  const std::size_t rows = K.shared_rows ? 1 : grid.size();
  const std::size_t dd = static_cast<std::size_t>(a.d) * a.d;
  check_memory(rows * grid.size() * dd * sizeof(cplx), "kernel_block");
  K.values.resize(rows * grid.size() * dd);
  parallel_for(rows, [&](std::size_t xi) {
    std::vector<double> x(a.n);
    grid.node(xi, x);
    kernel_row(a, D, j, grid, x, std::span<cplx>(K.values).subspan(xi * grid.size() * dd, grid.size() * dd));
  });
  return K;
}

/// K~_j(y) id = sum_l e^{i l.y} phi_j(l) id over `lattice` (closed-form phi off D's lattice).
inline KernelBlock multiplier_kernel(const DyadicDecomposition& D, int j, const TorusGrid& grid,
                                     const FrequencyLattice& lattice, int d) {
  KernelBlock K{grid, d, j, true, std::vector<cplx>(grid.size() * d * d)};
  std::vector<cplx> scalar(grid.size());
  std::vector<int> k(lattice.dim());
  detail::offsets_from_coeffs(grid, lattice, [&](std::size_t idx, std::span<cplx> c) {
    lattice.point(idx, k);
    const double w = D.value(j, k);
    if (w == 0.0) return false;
    c[0] = w;
    return true;
  }, 1, scalar);
  for (std::size_t l = 0; l < grid.size(); ++l)
    for (int i = 0; i < d; ++i) K.values[(l * d + i) * d + i] = scalar[l];
  return K;
}

/// F(x_m) = N^{-n} sum_l K(x_m, y_l) f(x_m - y_l)
inline GridFunction apply_via_kernel(const KernelBlock& K, const GridFunction& f) {
  if (!(K.grid == f.grid)) throw std::invalid_argument("apply_via_kernel: grid mismatch");
  if (K.dim != f.dim) throw std::invalid_argument("apply_via_kernel: fiber dimension mismatch");
  const auto& grid = f.grid;
  const int n = grid.dim();
  const int d = f.dim;
  const double w = grid.weight();
  GridFunction out(grid, d);
  parallel_for(grid.size(), [&](std::size_t node) {
    std::vector<int> mi(n), li(n), diff(n);
    grid.multi_index(node, mi);
    std::vector<cplx> acc(d, cplx(0.0));
    for (std::size_t l = 0; l < grid.size(); ++l) {
      grid.multi_index(l, li);
      for (int i = 0; i < n; ++i) diff[i] = mi[i] - li[i];
      matvec_accumulate(K.at(node, l), f.at(grid.flat_index(diff)), acc, d);
    }
    auto dst = out.at(node);
    for (int c = 0; c < d; ++c) dst[c] = w * acc[c];
  });
  return out;
}

/**
 * Double-kernel evaluation in factored form.
 *   kind 1: sum_kappa  int int K~_j(y) K_kappa(x, z) (op[chi_kappa] f)(x - y - z)   = op[a] op[phi_j] f
 *   kind 2: sum_kappa  int int K~_j(y) K_kappa(x - y, z) (op[chi_kappa] f)(x - y - z) = op[phi_j] op[a] f
 * The three-argument kernels are never stored: kind 1 convolves with K~_j
 * first and applies K_kappa second; kind 2 applies every K_kappa first and
 * convolves the sum with K~_j (taken over all frequencies the grid resolves).
 */
inline GridFunction double_kernel_apply(const Symbol& a, const GridFunction& f,
                                        const DyadicDecomposition& D, int j, int kind) {
  require_block(D, j);
  if (kind != 1 && kind != 2) throw std::invalid_argument("double_kernel_apply: kind must be 1 or 2");
  require_nyquist(f.grid, D.lattice());
  const auto& grid = f.grid;
  GridFunction out(grid, f.dim);
  if (kind == 1) {
    const KernelBlock tilde = multiplier_kernel(D, j, grid, D.lattice(), f.dim);
    for (int kappa = 0; kappa <= D.jmax(); ++kappa) {
      const GridFunction h = op_chi(f, D, kappa);
      const GridFunction u = apply_via_kernel(tilde, h);
      out += apply_via_kernel(kernel_block(a, D, kappa, grid), u);
    }
    return out;
  }
  GridFunction v(grid, f.dim);
  for (int kappa = 0; kappa <= D.jmax(); ++kappa) {
    const GridFunction h = op_chi(f, D, kappa);
    v += apply_via_kernel(kernel_block(a, D, kappa, grid), h);
  }
  const KernelBlock tilde = multiplier_kernel(D, j, grid, full_lattice(grid), f.dim);
  return apply_via_kernel(tilde, v);
}

/**
 * (op[phi_j] op[a] - op[a] op[phi_j]) f computed from both orderings.
 * For x-independent a both orderings are the same Fourier multiplier
 * phi_j(k) a(k), so the commutator vanishes identically and no arithmetic is
 * performed unless `force_direct` is set.
 */
inline GridFunction commutator_block(const SampledSymbol& a, const GridFunction& f,
                                     const DyadicDecomposition& D, int j, bool force_direct = false) {
  require_block(D, j);
  if (a.x_independent() && !force_direct) return GridFunction(f.grid, f.dim);
  const SpectralCoeffs F = forward_transform(f, a.lattice());
  GridFunction first = op_phi(apply_symbol(a, F), D, j);
  std::vector<int> k(F.lattice.dim());
  SpectralCoeffs G = F;
  for (std::size_t idx = 0; idx < F.lattice.size(); ++idx) {
    F.lattice.point(idx, k);
    const double w = D.value(j, k);
    for (auto& c : G.at(idx)) c *= w;
  }
  first -= apply_symbol(a, G);
  return first;
}

inline GridFunction commutator_block(const Symbol& a, const GridFunction& f, const DyadicDecomposition& D,
                                     int j, bool force_direct = false) {
  return commutator_block(SampledSymbol(a, f.grid, D.lattice()), f, D, j, force_direct);
}

}  // namespace torpsido
