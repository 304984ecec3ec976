#pragma once

#include <functional>
#include <utility>

#include "torpsido/core.hpp"
#include "torpsido/fft.hpp"

namespace torpsido {

/**
 * Uniform sample grid on T^n with N points per axis.
 *
 * Node m has coordinates x_i = -pi + 2 pi m_i / N. Nodes are stored row-major
 * (last axis fastest). The quadrature weight N^{-n} realizes the normalized
 * measure (2 pi)^{-n} dx.
 */
class TorusGrid {
 public:
  TorusGrid(int n, int N) : n_(n), N_(N) {
    if (n < 1) throw std::invalid_argument("TorusGrid: dimension must be positive");
    if (N < 1) throw std::invalid_argument("TorusGrid: points per axis must be positive");
    size_ = ipow(static_cast<std::size_t>(N), n);
  }

  int dim() const { return n_; }
  int points_per_axis() const { return N_; }
  std::size_t size() const { return size_; }
  double weight() const { return 1.0 / static_cast<double>(size_); }

  /// Largest ell-infinity radius whose frequencies this grid resolves without aliasing.
  int full_kmax() const { return (N_ - 1) / 2; }

  double coordinate(int m) const { return -pi + 2.0 * pi * m / N_; }

  void multi_index(std::size_t idx, std::span<int> m) const {
    for (int i = n_ - 1; i >= 0; --i) {
      m[i] = static_cast<int>(idx % N_);
      idx /= N_;
    }
  }

  std::size_t flat_index(std::span<const int> m) const {
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) {
      int v = m[i] % N_;
      if (v < 0) v += N_;
      idx = idx * N_ + static_cast<std::size_t>(v);
    }
    return idx;
  }

  void node(std::size_t idx, std::span<double> x) const {
    for (int i = n_ - 1; i >= 0; --i) {
      x[i] = coordinate(static_cast<int>(idx % N_));
      idx /= N_;
    }
  }

  std::vector<double> node(std::size_t idx) const {
    std::vector<double> x(n_);
    node(idx, x);
    return x;
  }

  /// Offset (difference) node y_l = 2 pi l / N represented in [-pi, pi)^n.
  /// These are the points used for convolution quadrature; x_m - y_l = x_{m-l}.
  void offset(std::size_t idx, std::span<double> y) const {
    for (int i = n_ - 1; i >= 0; --i) {
      int l = static_cast<int>(idx % N_);
      idx /= N_;
      if (2 * l >= N_) l -= N_;
      y[i] = 2.0 * pi * l / N_;
    }
  }

  bool operator==(const TorusGrid& o) const { return n_ == o.n_ && N_ == o.N_; }

 private:
  int n_;
  int N_;
  std::size_t size_;
};

/// All k in Z^n with |k|_inf <= Kmax, indexed lexicographically (last axis fastest).
class FrequencyLattice {
 public:
  FrequencyLattice(int n, int kmax) : n_(n), kmax_(kmax) {
    if (n < 1) throw std::invalid_argument("FrequencyLattice: dimension must be positive");
    if (kmax < 0) throw std::invalid_argument("FrequencyLattice: radius must be nonnegative");
    size_ = ipow(static_cast<std::size_t>(side()), n);
  }

  int dim() const { return n_; }
  int kmax() const { return kmax_; }
  int side() const { return 2 * kmax_ + 1; }
  std::size_t size() const { return size_; }

  bool contains(std::span<const int> k) const {
    for (int v : k)
      if (v < -kmax_ || v > kmax_) return false;
    return true;
  }

  std::size_t index_of(std::span<const int> k) const {
    if (!contains(k)) throw std::out_of_range("FrequencyLattice: point outside lattice");
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) idx = idx * side() + static_cast<std::size_t>(k[i] + kmax_);
    return idx;
  }

  void point(std::size_t idx, std::span<int> k) const {
    for (int i = n_ - 1; i >= 0; --i) {
      k[i] = static_cast<int>(idx % side()) - kmax_;
      idx /= side();
    }
  }

  std::vector<int> point(std::size_t idx) const {
    std::vector<int> k(n_);
    point(idx, k);
    return k;
  }

  /// Index of -k.
  std::size_t mirror(std::size_t idx) const { return size_ - 1 - idx; }

  bool operator==(const FrequencyLattice& o) const { return n_ == o.n_ && kmax_ == o.kmax_; }

 private:
  int n_;
  int kmax_;
  std::size_t size_;
};

inline void require_nyquist(const TorusGrid& grid, const FrequencyLattice& lattice) {
  if (grid.dim() != lattice.dim())
    throw std::invalid_argument("grid and lattice dimensions differ");
  if (grid.points_per_axis() < 2 * lattice.kmax() + 1)
    throw std::invalid_argument("Nyquist violation: need N >= 2*Kmax+1 (N=" +
                                std::to_string(grid.points_per_axis()) +
                                ", Kmax=" + std::to_string(lattice.kmax()) + ")");
}

/// Lattice of all frequencies the grid resolves.
inline FrequencyLattice full_lattice(const TorusGrid& grid) {
  return FrequencyLattice(grid.dim(), grid.full_kmax());
}

/// C^d-valued samples on a torus grid.
struct GridFunction {
  TorusGrid grid;
  int dim = 1;
  std::vector<cplx> values;  // node-major, `dim` components per node

  GridFunction(TorusGrid g, int d) : grid(g), dim(d), values(g.size() * d) {
    if (d < 1) throw std::invalid_argument("GridFunction: fiber dimension must be positive");
  }

  GridFunction(TorusGrid g, int d, std::vector<cplx> v) : grid(g), dim(d), values(std::move(v)) {
    if (values.size() != g.size() * static_cast<std::size_t>(d))
      throw std::invalid_argument("GridFunction: values do not match N^n x d");
  }

  /// Samples fn(x, out) at every node.
  static GridFunction sample(const TorusGrid& g, int d,
                             const std::function<void(std::span<const double>, std::span<cplx>)>& fn) {
    GridFunction f(g, d);
    std::vector<double> x(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.node(i, x);
      fn(x, std::span<cplx>(f.values).subspan(i * d, d));
    }
    return f;
  }

  std::span<cplx> at(std::size_t node) { return std::span<cplx>(values).subspan(node * dim, dim); }
  std::span<const cplx> at(std::size_t node) const {
    return std::span<const cplx>(values).subspan(node * dim, dim);
  }

  GridFunction& operator+=(const GridFunction& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  GridFunction& operator*=(cplx c) {
    for (auto& v : values) v *= c;
    return *this;
  }

  void check_compatible(const GridFunction& o) const {
    if (!(grid == o.grid) || dim != o.dim)
      throw std::invalid_argument("GridFunction: incompatible operands");
  }
};

inline GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
inline GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
inline GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

/// Largest pointwise difference in the Euclidean fiber norm.
inline double max_difference(const GridFunction& a, const GridFunction& b) {
  a.check_compatible(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < a.dim; ++c) s += std::norm(a.at(i)[c] - b.at(i)[c]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

inline double max_norm(const GridFunction& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) m = std::max(m, vector_norm(a.at(i)));
  return m;
}

/// C^d-valued Fourier coefficients on a truncated lattice.
struct SpectralCoeffs {
  FrequencyLattice lattice;
  int dim = 1;
  std::vector<cplx> coeffs;  // lattice-major, `dim` components per point

  SpectralCoeffs(FrequencyLattice l, int d) : lattice(l), dim(d), coeffs(l.size() * d) {
    if (d < 1) throw std::invalid_argument("SpectralCoeffs: fiber dimension must be positive");
  }

  std::span<cplx> at(std::size_t idx) { return std::span<cplx>(coeffs).subspan(idx * dim, dim); }
  std::span<const cplx> at(std::size_t idx) const {
    return std::span<const cplx>(coeffs).subspan(idx * dim, dim);
  }
  std::span<cplx> at(std::span<const int> k) { return at(lattice.index_of(k)); }
  std::span<const cplx> at(std::span<const int> k) const { return at(lattice.index_of(k)); }
};

namespace detail {

inline int parity_sign(std::span<const int> k) {
  int s = 0;
  for (int v : k) s += v;
  return (s % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/// f^(k) ~ N^{-n} sum_m e^{-i k.x_m} f(x_m) for every k in the lattice.
inline SpectralCoeffs forward_transform(const GridFunction& f, const FrequencyLattice& lattice) {
  require_nyquist(f.grid, lattice);
  const int n = f.grid.dim();
  const int N = f.grid.points_per_axis();
  const int d = f.dim;
  std::vector<cplx> buf = f.values;
  detail::fft_inplace(buf, n, N, d, FFTW_FORWARD);
  SpectralCoeffs out(lattice, d);
  const double w = f.grid.weight();
  std::vector<int> k(n);
  for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
    lattice.point(idx, k);
    // e^{-ik.x_m} = (-1)^{|k|_1} e^{-2 pi i k.m / N}
    const double s = detail::parity_sign(k) * w;
    const std::size_t src = f.grid.flat_index(k);
    for (int c = 0; c < d; ++c) out.coeffs[idx * d + c] = s * buf[src * d + c];
  }
  return out;
}

/// x_m -> sum_k e^{i k.x_m} F(k) at every node.
inline GridFunction inverse_transform(const SpectralCoeffs& F, const TorusGrid& grid) {
  require_nyquist(grid, F.lattice);
  const int n = grid.dim();
  const int N = grid.points_per_axis();
  const int d = F.dim;
  std::vector<cplx> buf(grid.size() * d, cplx(0.0));
  std::vector<int> k(n);
  for (std::size_t idx = 0; idx < F.lattice.size(); ++idx) {
    F.lattice.point(idx, k);
    const double s = detail::parity_sign(k);
    const std::size_t dst = grid.flat_index(k);
    for (int c = 0; c < d; ++c) buf[dst * d + c] += s * F.coeffs[idx * d + c];
  }
  detail::fft_inplace(buf, n, N, d, FFTW_BACKWARD);
  return GridFunction(grid, d, std::move(buf));
}

struct DecayRow {
  int order = 0;
  double value = 0.0;
};

/// sup_k <k>^N |F(k)| for each requested N; a smoothness diagnostic.
inline std::vector<DecayRow> spectral_decay_report(const SpectralCoeffs& F,
                                                   std::span<const int> orders) {
  std::vector<DecayRow> rows;
  std::vector<int> k(F.lattice.dim());
  for (int N : orders) {
    double m = 0.0;
    for (std::size_t idx = 0; idx < F.lattice.size(); ++idx) {
      F.lattice.point(idx, k);
      m = std::max(m, std::pow(bracket(std::span<const int>(k)), N) * vector_norm(F.at(idx)));
    }
    rows.push_back({N, m});
  }
  return rows;
}

}  // namespace torpsido
