#include <random>

#include <gtest/gtest.h>

#include "torpsido/difference.hpp"
#include "torpsido/grid.hpp"

using namespace torpsido;

namespace {

// Direct-summation oracle: N^{-n} sum_m f(x_m) e^{-i k.x_m}.
std::vector<cplx> naive_forward(const GridFunction& f, const FrequencyLattice& L) {
  const auto& g = f.grid;
  std::vector<cplx> out(L.size() * f.dim, cplx(0.0));
  std::vector<double> x(g.dim());
  std::vector<int> k(g.dim());
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    for (std::size_t m = 0; m < g.size(); ++m) {
      g.node(m, x);
      double ph = 0.0;
      for (int i = 0; i < g.dim(); ++i) ph -= k[i] * x[i];
      for (int c = 0; c < f.dim; ++c) out[idx * f.dim + c] += f.at(m)[c] * std::polar(1.0, ph);
    }
    for (int c = 0; c < f.dim; ++c) out[idx * f.dim + c] *= g.weight();
  }
  return out;
}

GridFunction random_function(const TorusGrid& g, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  GridFunction f(g, d);
  for (auto& v : f.values) v = cplx(gauss(rng), gauss(rng));
  return f;
}

}  // namespace

TEST(TorusGrid, NodesAndWeight) {
  const TorusGrid g(2, 8);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_DOUBLE_EQ(g.weight(), 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(g.coordinate(0), -pi);
  EXPECT_NEAR(g.coordinate(4), 0.0, 1e-15);
  EXPECT_EQ(g.full_kmax(), 3);
  EXPECT_EQ(TorusGrid(1, 9).full_kmax(), 4);
}

TEST(TorusGrid, FlatIndexWrapsModN) {
  const TorusGrid g(2, 5);
  const std::vector<int> a{-1, 7};
  const std::vector<int> b{4, 2};
  EXPECT_EQ(g.flat_index(a), g.flat_index(b));
}

TEST(TorusGrid, OffsetsAreNodeDifferences) {
  const TorusGrid g(1, 7);
  std::vector<double> x(1), y(1), off(1);
  for (std::size_t m = 0; m < g.size(); ++m)
    for (std::size_t l = 0; l < g.size(); ++l) {
      g.node(m, x);
      g.offset(l, off);
      const std::vector<int> diff{static_cast<int>(m) - static_cast<int>(l)};
      g.node(g.flat_index(diff), y);
      EXPECT_NEAR(torus_distance(std::vector<double>{x[0] - off[0]}, y), 0.0, 1e-12);
    }
}

TEST(FrequencyLattice, IndexRoundTripAndMirror) {
  const FrequencyLattice L(2, 3);
  EXPECT_EQ(L.size(), 49u);
  std::vector<int> k(2), km(2);
  for (std::size_t idx = 0; idx < L.size(); ++idx) {
    L.point(idx, k);
    EXPECT_EQ(L.index_of(k), idx);
    L.point(L.mirror(idx), km);
    EXPECT_EQ(km[0], -k[0]);
    EXPECT_EQ(km[1], -k[1]);
  }
  EXPECT_THROW(L.index_of(std::vector<int>{4, 0}), std::out_of_range);
}

TEST(Transform, NyquistViolationRejected) {
  const TorusGrid g(1, 8);
  EXPECT_THROW(forward_transform(GridFunction(g, 1), FrequencyLattice(1, 4)), std::invalid_argument);
  EXPECT_NO_THROW(forward_transform(GridFunction(g, 1), FrequencyLattice(1, 3)));
}

TEST(Transform, ForwardMatchesDirectSummation) {
  std::mt19937_64 rng(11);
  for (int n : {1, 2})
    for (int N : {7, 8}) {
      const TorusGrid g(n, N);
      const FrequencyLattice L(n, (N - 1) / 2);
      for (int d : {1, 2}) {
        const auto f = random_function(g, d, rng);
        const auto F = forward_transform(f, L);
        const auto ref = naive_forward(f, L);
        for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(std::abs(F.coeffs[i] - ref[i]), 0.0, 1e-12);
      }
    }
}

TEST(Transform, SingleModeCoefficient) {
  const TorusGrid g(1, 16);
  const auto f = GridFunction::sample(g, 1, [](std::span<const double> x, std::span<cplx> out) {
    out[0] = std::polar(1.0, 3.0 * x[0]);
  });
  const auto F = forward_transform(f, FrequencyLattice(1, 5));
  for (int k = -5; k <= 5; ++k) {
    const std::vector<int> kk{k};
    EXPECT_NEAR(std::abs(F.at(F.lattice.index_of(kk))[0] - cplx(k == 3 ? 1.0 : 0.0)), 0.0, 1e-14);
  }
}

// Property: inverse then forward is the identity on band-limited coefficients.
TEST(Transform, RoundTripProperty) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 2), kmax(1, 6), extra(0, 4), fib(1, 3);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = dim(rng);
    const int K = kmax(rng);
    const FrequencyLattice L(n, K);
    const TorusGrid g(n, 2 * K + 1 + extra(rng));
    SpectralCoeffs F(L, fib(rng));
    for (auto& c : F.coeffs) c = cplx(gauss(rng), gauss(rng));
    const auto back = forward_transform(inverse_transform(F, g), L);
    for (std::size_t i = 0; i < F.coeffs.size(); ++i) ASSERT_NEAR(std::abs(back.coeffs[i] - F.coeffs[i]), 0.0, 1e-12);
  }
}

TEST(Transform, DecayReportOnSmoothFunction) {
  const TorusGrid g(1, 64);
  const auto f = GridFunction::sample(g, 1, [](std::span<const double> x, std::span<cplx> out) {
    out[0] = 1.0 / (2.0 - std::cos(x[0]));
  });
  const auto rows = spectral_decay_report(forward_transform(f, full_lattice(g)), std::vector<int>{0, 2, 4});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.value));
}

TEST(GridFunctionOps, ArithmeticAndNorms) {
  const TorusGrid g(1, 4);
  GridFunction a(g, 2), b(g, 2);
  a.values[3] = cplx(3.0, 4.0);
  b.values[3] = cplx(1.0, 0.0);
  EXPECT_DOUBLE_EQ(max_norm(a), 5.0);
  EXPECT_DOUBLE_EQ(max_difference(a, b), std::abs(cplx(2.0, 4.0)));
  EXPECT_THROW(a += GridFunction(TorusGrid(1, 5), 2), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Discrete differences

TEST(Difference, PolynomialClosedForms) {
  const LatticeBox box = LatticeBox::cube(1, -5, 7);
  const auto t = LatticeTable<cplx>::tabulate(box, 1, [](std::span<const int> k, std::span<cplx> out) {
    out[0] = static_cast<double>(k[0]) * k[0];
  });
  const auto d1 = discrete_difference(t, std::vector<int>{1});
  const auto d2 = discrete_difference(t, std::vector<int>{2});
  const auto d3 = discrete_difference(t, std::vector<int>{3});
  for (int k = -5; k <= 4; ++k) {
    const std::vector<int> kk{k};
    EXPECT_DOUBLE_EQ(d1.at(kk)[0].real(), 2.0 * k + 1.0);
    EXPECT_DOUBLE_EQ(d2.at(kk)[0].real(), 2.0);
    EXPECT_DOUBLE_EQ(d3.at(kk)[0].real(), 0.0);
  }
}

TEST(Difference, MixedDifferenceOfProduct) {
  // f(k) = k1 k2: Delta_1 Delta_2 f = 1
  const LatticeBox box = LatticeBox::cube(2, -3, 3);
  const auto t = LatticeTable<cplx>::tabulate(box, 1, [](std::span<const int> k, std::span<cplx> out) {
    out[0] = static_cast<double>(k[0] * k[1]);
  });
  const auto d = discrete_difference(t, std::vector<int>{1, 1});
  for (int a = -3; a <= 2; ++a)
    for (int b = -3; b <= 2; ++b) EXPECT_DOUBLE_EQ(d.at(std::vector<int>{a, b})[0].real(), 1.0);
}

TEST(Difference, InsufficientMarginThrows) {
  const LatticeBox box = LatticeBox::cube(1, 0, 4);
  const auto t = LatticeTable<cplx>::tabulate(box, 1, [](auto, std::span<cplx> out) { out[0] = 1.0; });
  const auto d = discrete_difference(t, std::vector<int>{2});
  EXPECT_THROW(d.at(std::vector<int>{3}), std::out_of_range);
  EXPECT_THROW(discrete_difference(t, std::vector<int>{2}, LatticeBox::cube(1, 0, 4)), std::out_of_range);
}

// Property: differences commute with each other and are linear.
TEST(Difference, CommutativityProperty) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  const LatticeBox box = LatticeBox::cube(2, -4, 4);
  for (int trial = 0; trial < 10; ++trial) {
    LatticeTable<cplx> t(box, 1);
    for (auto& v : t.data) v = cplx(gauss(rng), gauss(rng));
    const auto ab = discrete_difference(discrete_difference(t, std::vector<int>{1, 0}), std::vector<int>{0, 2});
    const auto ba = discrete_difference(t, std::vector<int>{1, 2});
    for (int a = -4; a <= 3; ++a)
      for (int b = -4; b <= 2; ++b) {
        const std::vector<int> k{a, b};
        ASSERT_NEAR(std::abs(ab.at(k)[0] - ba.at(k)[0]), 0.0, 1e-12);
      }
  }
}
