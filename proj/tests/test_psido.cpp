#include <random>

#include <gtest/gtest.h>

#include "torpsido/psido.hpp"
#include "torpsido/zoo.hpp"

using namespace torpsido;

namespace {

// (op[a] f)(x_m) = sum_k e^{i k.x_m} a(x_m, k) f^(k), with f^ by direct summation.
GridFunction op_oracle(const Symbol& a, const GridFunction& f, const FrequencyLattice& L) {
  const auto& g = f.grid;
  const int n = g.dim(), d = f.dim;
  std::vector<cplx> fh(L.size() * d, cplx(0.0));
  std::vector<double> x(n);
  std::vector<int> k(n);
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    for (std::size_t m = 0; m < g.size(); ++m) {
      g.node(m, x);
      double ph = 0.0;
      for (int i = 0; i < n; ++i) ph -= k[i] * x[i];
      for (int c = 0; c < d; ++c) fh[idx * d + c] += g.weight() * std::polar(1.0, ph) * f.at(m)[c];
    }
  }
  GridFunction out(g, d);
  std::vector<cplx> mat(d * d);
  for (std::size_t m = 0; m < g.size(); ++m) {
    g.node(m, x);
    for (std::size_t idx = 0; idx < L.size(); ++idx) {
      L.point(idx, k);
      double ph = 0.0;
      for (int i = 0; i < n; ++i) ph += k[i] * x[i];
      a.eval(x, k, std::vector<int>(n, 0), mat);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out.at(m)[r] += std::polar(1.0, ph) * mat[r * d + c] * fh[idx * d + c];
    }
  }
  return out;
}

GridFunction band_limited(const FrequencyLattice& L, const TorusGrid& g, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  SpectralCoeffs F(L, d);
  for (auto& c : F.coeffs) c = cplx(gauss(rng), gauss(rng));
  return inverse_transform(F, g);
}

struct Geometry {
  int n, d, K, N;
};

Symbol symbol_for(const Geometry& g, int which) {
  switch (which) {
    case 0: return zoo::identity(g.n, g.d);
    case 1: return zoo::bracket_power(g.n, g.d, 1.0);
    case 2: return zoo::cosine_multiplication(g.n, g.d, -1.0);
    default: return g.d == 2 ? zoo::rotation(g.n, 1.0, 0.0) : zoo::weierstrass(g.n, 1, 0.5, 2);
  }
}

const std::vector<Geometry> geometries = {{1, 1, 16, 41}, {1, 2, 16, 41}, {2, 1, 6, 21}, {2, 2, 6, 21}};

}  // namespace

TEST(Apply, MatchesDirectSummationOracle) {
  for (const auto& G : geometries)
    for (int w = 0; w < 4; ++w) {
      const Symbol a = symbol_for(G, w);
      const TorusGrid grid(G.n, G.N);
      const FrequencyLattice L(G.n, G.K);
      const auto f = band_limited(L, grid, G.d, 3 + w);
      EXPECT_LT(max_difference(apply_op(a, f, L), op_oracle(a, f, L)), 1e-10) << a.name << " n=" << G.n;
    }
}

TEST(Apply, IdentityReproducesInput) {
  for (const auto& G : geometries) {
    const TorusGrid grid(G.n, G.N);
    const FrequencyLattice L(G.n, G.K);
    const auto f = band_limited(L, grid, G.d, 9);
    EXPECT_LT(max_difference(apply_op(zoo::identity(G.n, G.d), f, L), f), 1e-12);
  }
}

TEST(Apply, MultiplicationOperatorIsPointwise) {
  for (const auto& G : geometries) {
    const TorusGrid grid(G.n, G.N);
    const FrequencyLattice L(G.n, G.K);
    ASSERT_GE(G.N, 2 * (G.K + 1) + 1);
    const auto f = band_limited(L, grid, G.d, 10);
    GridFunction bf = f;
    std::vector<double> x(G.n);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      grid.node(m, x);
      for (auto& v : bf.at(m)) v *= std::cos(x[0]);
    }
    EXPECT_LT(max_difference(apply_op(zoo::cosine_multiplication(G.n, G.d), f, L), bf), 1e-10);
  }
}

TEST(Apply, BlocksSumToOperator) {
  for (const auto& G : geometries)
    for (int w = 1; w < 4; ++w) {
      const Symbol a = symbol_for(G, w);
      const TorusGrid grid(G.n, G.N);
      const FrequencyLattice L(G.n, G.K);
      const auto D = DyadicDecomposition::build(L);
      const auto f = band_limited(L, grid, G.d, 12);
      const SampledSymbol sa(a, grid, L);
      GridFunction acc(grid, G.d);
      for (int j = 0; j <= D.jmax(); ++j) acc += apply_block(sa, f, D, j);
      EXPECT_LT(max_difference(acc, apply_op(sa, f)), 1e-10) << a.name;
    }
}

TEST(Kernel, QuadratureMatchesFrequencyPath) {
  for (const auto& G : geometries)
    for (int w = 0; w < 4; ++w) {
      const Symbol a = symbol_for(G, w);
      const TorusGrid grid(G.n, G.N);
      const FrequencyLattice L(G.n, G.K);
      const auto D = DyadicDecomposition::build(L);
      const auto f = band_limited(L, grid, G.d, 13);
      for (int j = 0; j <= D.jmax(); ++j)
        EXPECT_LT(max_difference(apply_via_kernel(kernel_block(a, D, j, grid), f), apply_block(a, f, D, j)), 1e-10)
            << a.name << " j=" << j;
    }
}

TEST(Kernel, RowMatchesDirectSum) {
  const Symbol a = zoo::rotation(1, 1.0, -1.0);
  const TorusGrid grid(1, 21);
  const auto D = DyadicDecomposition::build(FrequencyLattice(1, 10));
  const int j = 2;
  const auto K = kernel_block(a, D, j, grid);
  std::vector<double> x(1), y(1);
  std::vector<cplx> ref(4), mat(4);
  for (std::size_t m : {0u, 7u})
    for (std::size_t l : {0u, 3u, 15u}) {
      grid.node(m, x);
      grid.offset(l, y);
      std::fill(ref.begin(), ref.end(), cplx(0.0));
      for (int k = -10; k <= 10; ++k) {
        const std::vector<int> kk{k};
        a.eval(x, kk, std::vector<int>{0}, mat);
        for (int t = 0; t < 4; ++t) ref[t] += std::polar(1.0, k * y[0]) * D.value(j, kk) * mat[t];
      }
      for (int t = 0; t < 4; ++t) EXPECT_NEAR(std::abs(K.at(m, l)[t] - ref[t]), 0.0, 1e-12);
    }
}

TEST(Kernel, DoubleKernelsMatchOperatorProducts) {
  for (const auto& G : {geometries[0], geometries[1], geometries[2]}) {
    const Symbol a = symbol_for(G, 3);
    const TorusGrid grid(G.n, G.N);
    const FrequencyLattice L(G.n, G.K);
    const auto D = DyadicDecomposition::build(L);
    const auto f = band_limited(L, grid, G.d, 14);
    for (int j : {1, 2}) {
      EXPECT_LT(max_difference(double_kernel_apply(a, f, D, j, 1), apply_block(a, f, D, j)), 1e-10);
      EXPECT_LT(max_difference(double_kernel_apply(a, f, D, j, 2), op_phi(apply_op(a, f, L), D, j)), 1e-10);
    }
    EXPECT_THROW(double_kernel_apply(a, f, D, 1, 3), std::invalid_argument);
  }
}

TEST(Commutator, XIndependentSymbolsCommuteExactly) {
  const TorusGrid grid(1, 41);
  const FrequencyLattice L(1, 16);
  const auto D = DyadicDecomposition::build(L);
  const auto f = band_limited(L, grid, 2, 15);
  for (const auto& a : {zoo::bracket_power(1, 2, -1.0), zoo::derivative(1, 2)})
    for (int j = 0; j <= D.jmax(); ++j) {
      EXPECT_EQ(max_norm(commutator_block(a, f, D, j)), 0.0);
      EXPECT_LT(max_norm(commutator_block(a, f, D, j, true)), 1e-10);
    }
}

TEST(Commutator, MultiplicationDoesNotCommute) {
  const TorusGrid grid(1, 41);
  const FrequencyLattice L(1, 16);
  const auto D = DyadicDecomposition::build(L);
  const auto f = band_limited(L, grid, 1, 16);
  double m = 0.0;
  for (int j = 0; j <= D.jmax(); ++j) m = std::max(m, max_norm(commutator_block(zoo::cosine_multiplication(1, 1), f, D, j)));
  EXPECT_GT(m, 1e-3);
}

// Property: op[a] is linear in f.
TEST(Apply, LinearityInFunctionProperty) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 8; ++trial) {
    const auto& G = geometries[trial % geometries.size()];
    const Symbol a = symbol_for(G, trial % 4);
    const TorusGrid grid(G.n, G.N);
    const FrequencyLattice L(G.n, G.K);
    const auto f = band_limited(L, grid, G.d, 100 + trial);
    const auto g = band_limited(L, grid, G.d, 200 + trial);
    const cplx c(gauss(rng), gauss(rng));
    GridFunction h = f;
    GridFunction cg = g;
    cg *= c;
    h += cg;
    GridFunction rhs = apply_op(a, g, L);
    rhs *= c;
    rhs += apply_op(a, f, L);
    EXPECT_LT(max_difference(apply_op(a, h, L), rhs), 1e-10);
  }
}

TEST(Apply, GuardsAndErrors) {
  const TorusGrid grid(1, 16);
  EXPECT_THROW(apply_op(zoo::identity(1, 1), GridFunction(grid, 1), FrequencyLattice(1, 8)), std::invalid_argument);
  EXPECT_THROW(apply_op(zoo::identity(1, 2), GridFunction(grid, 1), FrequencyLattice(1, 4)), std::invalid_argument);
  const auto D = DyadicDecomposition::build(FrequencyLattice(1, 4));
  EXPECT_THROW(apply_block(zoo::identity(1, 1), GridFunction(TorusGrid(1, 9), 1), D, D.jmax() + 1),
               std::out_of_range);
  const std::size_t saved = memory_limit_bytes();
  memory_limit_bytes() = 1024;
  EXPECT_THROW(SampledSymbol(zoo::cosine_multiplication(1, 1), TorusGrid(1, 64), FrequencyLattice(1, 20)),
               std::length_error);
  memory_limit_bytes() = saved;
}
