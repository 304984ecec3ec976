#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "torpsido/report.hpp"
#include "torpsido/zoo.hpp"

using namespace torpsido;

namespace {

void expect_series(const std::vector<double>& got, const std::vector<double>& frozen, double rel) {
  ASSERT_EQ(got.size(), frozen.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], frozen[i], rel * std::abs(frozen[i])) << i;
}

struct Setting {
  TorusGrid grid;
  FrequencyLattice lattice;
  DyadicDecomposition D;
};

Setting setting(const Symbol& a, int K) {
  const TorusGrid g(a.n, margin_points(K, a));
  return {g, FrequencyLattice(a.n, K), DyadicDecomposition::build(full_lattice(g))};
}

}  // namespace

// ---------------------------------------------------------------------------
// Weight and elementary inequalities

TEST(Weight, ClosedFormValue) {
  EXPECT_NEAR(weight_value(0, 0.5, pi, 1), std::sqrt(pi) / (pi * (1.0 + pi)), 1e-15);
  EXPECT_GT(weight_value(5, 0.3, 1e-3, 2), 0.0);
}

TEST(Weight, L1MatchesDirectQuadrature) {
  const TorusGrid g(1, 64);
  for (int j : {0, 3, 6}) {
    double ref = 0.0;
    for (int l = 1; l < 64; ++l) {
      const double y = std::abs(2.0 * pi * (l <= 32 ? l : l - 64) / 64.0);
      ref += std::pow(std::exp2(j) * y, 0.5) / (y * (1.0 + std::exp2(j) * y)) / 64.0;
    }
    EXPECT_NEAR(weight_l1(j, 0.5, g), ref, 1e-13);
  }
  EXPECT_THROW(weight_l1(0, 1.0, g), std::invalid_argument);
  EXPECT_THROW(weight_l1(0, 0.0, g), std::invalid_argument);
}

TEST(Weight, L1SweepFrozen) {
  const auto rep = weight_l1_sweep(0, 8, 0.5, TorusGrid(1, 513), 2.0);
  expect_series(rep.values_of("weight_l1"),
                {0.6216313212536807, 0.68584220787726535, 0.72278538903260536, 0.73115508279955677,
                 0.71061117179148714, 0.66107971171517554, 0.58451823367660871, 0.48833586867266732,
                 0.38616024849439889},
                1e-10);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Weight, ContinuousInTheta) {
  const TorusGrid g(1, 257);
  double prev = weight_l1(4, 0.1, g);
  for (double th = 0.15; th < 0.95; th += 0.05) {
    const double v = weight_l1(4, th, g);
    EXPECT_LT(std::abs(v - prev), 0.5 * std::max(v, prev));
    prev = v;
  }
}

// Property: |e^{ik.eta} - 1| <= 2 |k|^theta |eta|^theta.
TEST(Elementary, PhaseIncrementProperty) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> kd(-50, 50);
  std::uniform_real_distribution<double> ed(-pi, pi), td(0.01, 0.99);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::vector<int> k{kd(rng), kd(rng)};
    const std::vector<double> eta{ed(rng), ed(rng)};
    EXPECT_LE(phase_increment_ratio(k, eta, td(rng)), 1.0 + 1e-12);
  }
}

TEST(Elementary, NormEquivalenceConstant) {
  // n = 1: sup |eta| / |e^{-i eta} - 1| = sup eta / (2 sin(eta/2)) = pi/2 at eta = pi
  EXPECT_NEAR(norm_equivalence_constant(1, 1, 64), pi / 2.0, 1e-14);
  // n = 2, N = 2: attained on an axis at eta = (pi, 0): pi^2 / 4
  EXPECT_NEAR(norm_equivalence_constant(2, 2, 32), pi * pi / 4.0, 1e-13);
}

TEST(Fit, LeastSquaresExactLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{1.5, -0.5, -2.5, -4.5};
  const auto f = least_squares(x, y, "line");
  EXPECT_NEAR(f.slope, -2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 3.5, 1e-14);
  EXPECT_NEAR(f.residual, 0.0, 1e-14);
  EXPECT_EQ(f.points, 4);
}

// ---------------------------------------------------------------------------
// Kernel estimate

TEST(KernelBound, IdentityFrozen) {
  const auto rep = kernel_bound_experiment(zoo::identity(1, 1), {}, 2, 5, 0.5, TorusGrid(1, 129));
  expect_series(rep.values_of("C_j"), {7.4377127365684395, 7.4844587622509984, 7.4778798701165661, 7.3283679474135655},
                1e-9);
  EXPECT_TRUE(rep.all_pass());
}

TEST(KernelBound, ZeroSymbolGivesZero) {
  const auto rep = kernel_bound_experiment(zoo::zero(1, 1), {}, 1, 4, 0.5, TorusGrid(1, 65));
  for (double v : rep.values_of("C_j")) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(rep.all_pass());
}

TEST(KernelBound, BracketWeightFlattensAcrossJ) {
  const Symbol a = times_bracket(zoo::identity(1, 1), 1.0);
  const auto rep = kernel_bound_experiment(a, {}, 2, 5, 0.5, TorusGrid(1, 129));
  expect_series(rep.values_of("C_j"), {7.7464277030145086, 7.6599449484199509, 7.1848427402341795, 6.443390444951083},
                1e-9);
  EXPECT_TRUE(rep.all_pass());
}

TEST(KernelBound, ShiftedOrderStaysNonGrowing) {
  for (double m0 : {-1.0, 0.5, 2.0}) {
    const auto rep =
        kernel_bound_experiment(times_bracket(zoo::cosine_multiplication(1, 1), m0), {}, 2, 5, 0.5, TorusGrid(1, 129));
    EXPECT_TRUE(rep.all_pass()) << m0;
  }
}

TEST(KernelBound, EmptyRangeRejected) {
  EXPECT_THROW(kernel_bound_experiment(zoo::identity(1, 1), {}, 3, 2, 0.5, TorusGrid(1, 33)), std::invalid_argument);
  EXPECT_THROW(kernel_bound_experiment(zoo::identity(1, 1), {}, 1, 2, 1.5, TorusGrid(1, 33)), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Young bounds

TEST(Young, ConstantKernelGivesMean) {
  const TorusGrid g(1, 16);
  KernelBlock K{g, 1, 0, true, std::vector<cplx>(16, cplx(1.0))};
  std::mt19937_64 rng(2);
  const auto f = random_grid_function(g, 1, rng);
  cplx mean = 0.0;
  for (const auto& v : f.values) mean += v / 16.0;
  const auto F = apply_via_kernel(K, f);
  for (const auto& v : F.values) EXPECT_NEAR(std::abs(v - mean), 0.0, 1e-14);
  for (double p : {1.0, 2.0, infinity}) {
    const auto c = convolution_bound_check(K, f, p);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.lhs, std::abs(mean), 1e-14);
  }
}

TEST(Young, PointMassKernelsNearEquality) {
  const TorusGrid g(1, 12);
  KernelBlock A{g, 1, 0, true, std::vector<cplx>(12, cplx(1e-6))};
  A.values[0] = 12.0;
  const KernelBlock B = A;
  GridFunction one(g, 1);
  for (auto& v : one.values) v = 1.0;
  for (double p : {1.0, 2.0, infinity}) {
    const auto c = double_convolution_bound_check(A, B, one, p);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.lhs / c.rhs, 1.0, 1e-12);
  }
}

TEST(Young, RandomizedTrials) {
  for (double p : {1.0, 2.0, infinity}) {
    const auto rep = young_trials(100, p, 1234);
    EXPECT_TRUE(rep.all_pass()) << p;
    for (double v : rep.values_of("lhs_over_rhs")) EXPECT_LE(v, 1.0 + 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Block estimate and commutators

TEST(BlockEstimate, IdentityRatiosAtMostOne) {
  const Symbol a = zoo::identity(1, 1);
  const auto st = setting(a, 64);
  FamilySpec spec;
  spec.trials = 6;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  const auto rep = block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, 2.0, 1, 6);
  for (double v : rep.values_of("max_ratio")) EXPECT_LE(v, 1.0 + 1e-9);
}

TEST(BlockEstimate, WeierstrassSupNormFrozen) {
  const Symbol a = zoo::weierstrass(1, 1, 0.5, 6);
  const auto st = setting(a, 64);
  FamilySpec spec;
  spec.trials = 4;
  spec.seed = 3;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  const auto rep = block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, infinity, 2, 6);
  expect_series(rep.values_of("max_ratio"),
                {0.82412560805544866, 1.1587669744117157, 1.1011652459611447, 1.2951885205555647, 1.0838761355106974},
                1e-9);
  EXPECT_TRUE(rep.all_pass());
}

TEST(BlockEstimate, HomogeneityProperty) {
  const Symbol a = zoo::rotation(1, 1.0, 0.0);
  const auto st = setting(a, 32);
  FamilySpec spec;
  spec.trials = 3;
  auto fam = random_family(spec, st.lattice, st.grid, 2, st.D);
  const auto base = block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, 2.0, 1, 5);
  for (auto& f : fam) f *= cplx(0.0, 3.0);
  const auto fscaled = block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, 2.0, 1, 5);
  const auto ascaled =
      block_estimate_experiment(SampledSymbol(scaled(a, -2.0), st.grid, st.lattice), st.D, fam, 2.0, 1, 5);
  const auto b = base.values_of("max_ratio"), fs = fscaled.values_of("max_ratio"), as = ascaled.values_of("max_ratio");
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_NEAR(fs[i], b[i], 1e-12 * b[i]);
    EXPECT_NEAR(as[i], 2.0 * b[i], 1e-12 * b[i]);
  }
}

TEST(BlockEstimate, DegenerateFamilyRejected) {
  const Symbol a = zoo::identity(1, 1);
  const auto st = setting(a, 16);
  const std::vector<GridFunction> fam{GridFunction(st.grid, 1)};
  EXPECT_THROW(block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, 2.0, 1, 3),
               std::invalid_argument);
}

TEST(Commutator, XIndependentReportsExactCommutation) {
  const Symbol a = zoo::bracket_power(1, 1, 1.0);
  const auto st = setting(a, 32);
  FamilySpec spec;
  spec.trials = 2;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  const auto rep = commutator_decay_experiment(SampledSymbol(a, st.grid, st.lattice), a, st.D, fam, 2.0, 1, 4);
  ASSERT_EQ(rep.notes.size(), 1u);
  EXPECT_NE(rep.notes[0].find("exact commutation"), std::string::npos);
  for (double v : rep.values_of("c_j")) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Commutator, WeierstrassDecayFrozen) {
  const Symbol a = zoo::weierstrass(1, 1, 0.5, 6);
  const auto st = setting(a, 64);
  FamilySpec spec;
  spec.trials = 2;
  spec.seed = 3;
  spec.envelope = Envelope::single_block;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  const auto rep = commutator_decay_experiment(SampledSymbol(a, st.grid, st.lattice), a, st.D, fam, 2.0, 2, 6);
  ASSERT_EQ(rep.fits.size(), 1u);
  EXPECT_NEAR(rep.fits[0].slope, -0.40504565808934273, 1e-9);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Commutator, SmoothSymbolDecaysFasterThanR) {
  const Symbol a = zoo::cosine_multiplication(1, 1, 0.0, 0.9);
  const auto st = setting(a, 64);
  FamilySpec spec;
  spec.trials = 2;
  spec.seed = 3;
  spec.envelope = Envelope::single_block;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  const auto rep = commutator_decay_experiment(SampledSymbol(a, st.grid, st.lattice), a, st.D, fam, 2.0, 2, 6);
  EXPECT_LE(rep.fits[0].slope, -0.9 + 0.35);
}

TEST(Commutator, TooFewPointsRejected) {
  const Symbol a = zoo::cosine_multiplication(1, 1);
  const auto st = setting(a, 16);
  FamilySpec spec;
  spec.trials = 1;
  const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
  EXPECT_THROW(commutator_decay_experiment(SampledSymbol(a, st.grid, st.lattice), a, st.D, fam, 2.0, 1, 2),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Operator norm and linearity

TEST(OperatorNorm, IdentityIsOne) {
  for (auto pq : {std::pair{2.0, 1.0}, std::pair{infinity, infinity}, std::pair{1.0, 2.0}}) {
    OpNormSetup st;
    st.s = 0.5;
    st.p = pq.first;
    st.q = pq.second;
    st.kmax = 32;
    st.family.trials = 3;
    const auto rep = operator_norm_experiment(zoo::identity(1, 2), st);
    for (double Q : rep.values_of("Q")) EXPECT_NEAR(Q, 1.0, 1e-12);
    EXPECT_TRUE(rep.all_pass());
  }
}

TEST(OperatorNorm, BracketInverseFrozen) {
  OpNormSetup st;
  st.s = 0.5;
  st.kmax = 32;
  st.family.trials = 4;
  const auto rep = operator_norm_experiment(zoo::bracket_power(1, 1, -1.0), st);
  expect_series(rep.values_of("Q"), {0.88939913305525575, 0.94503290677753016}, 1e-9);
  EXPECT_TRUE(rep.all_pass());
}

TEST(OperatorNorm, HomogeneousInSymbol) {
  OpNormSetup st;
  st.s = 0.5;
  st.kmax = 16;
  st.family.trials = 3;
  const Symbol a = zoo::rotation(1, 0.0, -1.0);
  const double q1 = empirical_operator_norm(a, st, 16, margin_points(16, a));
  const double q3 = empirical_operator_norm(scaled(a, 3.0), st, 16, margin_points(16, a));
  EXPECT_NEAR(q3, 3.0 * q1, 1e-12 * q1);
}

TEST(OperatorNorm, HypothesisEnforced) {
  OpNormSetup st;
  st.s = 0.6;
  EXPECT_THROW(operator_norm_experiment(zoo::weierstrass(1, 1, 0.5, 4), st), std::invalid_argument);
  st.s = 0.0;
  EXPECT_THROW(operator_norm_experiment(zoo::identity(1, 1), st), std::invalid_argument);
}

TEST(Linearity, ResidualsVanish) {
  const TorusGrid g(1, 41);
  const FrequencyLattice L(1, 16);
  const auto D = DyadicDecomposition::build(full_lattice(g));
  FamilySpec spec;
  spec.trials = 1;
  const auto f = random_family(spec, L, g, 1, D)[0];
  EXPECT_EQ(linearity_in_symbol_check(zoo::weierstrass(1, 1, 0.5, 3), zoo::zero(1, 1), f, L), 0.0);
  const std::vector<Symbol> pool = {zoo::identity(1, 1), zoo::bracket_power(1, 1, -1.0), zoo::derivative(1, 1),
                                    zoo::cosine_multiplication(1, 1, 1.0), zoo::weierstrass(1, 1, 0.5, 3)};
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int t = 0; t < 10; ++t)
    EXPECT_LT(linearity_in_symbol_check(pool[pick(rng)], pool[pick(rng)], f, L), 1e-12);
}

// ---------------------------------------------------------------------------
// Families, determinism and serialization

TEST(Family, RealValuedIsReal) {
  const TorusGrid g(2, 17);
  const FrequencyLattice L(2, 8);
  const auto D = DyadicDecomposition::build(full_lattice(g));
  FamilySpec spec;
  spec.trials = 3;
  spec.real_valued = true;
  for (const auto& f : random_family(spec, L, g, 2, D))
    for (const auto& v : f.values) EXPECT_LT(std::abs(v.imag()), 1e-13);
}

TEST(Family, SingleBlockSupport) {
  const TorusGrid g(1, 65);
  const FrequencyLattice L(1, 32);
  const auto D = DyadicDecomposition::build(full_lattice(g));
  FamilySpec spec;
  spec.trials = 1;
  spec.envelope = Envelope::single_block;
  const auto fam = random_family(spec, L, g, 1, D);
  EXPECT_EQ(fam.size(), 6u);  // phi_6 vanishes at |k| = 32, so blocks 0..5
  for (std::size_t kappa = 0; kappa < fam.size(); ++kappa)
    for (int j = 0; j <= D.jmax(); ++j)
      if (std::abs(j - static_cast<int>(kappa)) > 1) EXPECT_LT(max_norm(op_phi(fam[kappa], D, j)), 1e-12);
}

TEST(Determinism, RepeatedRunsAreBitIdentical) {
  auto run = [] {
    const Symbol a = zoo::weierstrass(1, 1, 0.5, 5);
    const auto st = setting(a, 32);
    FamilySpec spec;
    spec.trials = 3;
    spec.seed = 99;
    const auto fam = random_family(spec, st.lattice, st.grid, 1, st.D);
    return to_json(block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, fam, 2.0, 1, 5)).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(Report, JsonAndCsvShape) {
  EstimateReport r;
  r.experiment = "demo";
  r.param("theta", 0.5);
  r.param("p", infinity);
  r.label("symbol", "identity");
  r.point("C_j", 2, 1.5);
  r.fits.push_back({"fit", -0.5, 1.0, 0.01, 3});
  r.verdicts.push_back({"ok", true, 1.0, 2.0, "x"});
  const auto j = to_json(r);
  EXPECT_EQ(j["experiment"], "demo");
  EXPECT_EQ(j["params"]["p"], "inf");
  EXPECT_EQ(j["params"]["symbol"], "identity");
  EXPECT_EQ(j["series"][0]["value"], 1.5);
  EXPECT_EQ(j["fits"][0]["slope"], -0.5);
  EXPECT_EQ(j["verdicts"][0]["pass"], true);
  std::ostringstream os;
  write_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "experiment,series,index,value");
  std::getline(is, line);
  EXPECT_EQ(line, "demo,C_j,2,1.5");
}
