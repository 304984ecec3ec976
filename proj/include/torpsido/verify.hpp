#pragma once

#include <random>

#include "torpsido/besov.hpp"

namespace torpsido {

// ---------------------------------------------------------------------------
// Reports

struct SeriesPoint {
  std::string series;
  double index = 0.0;
  double value = 0.0;
};

struct LinearFit {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square deviation from the line
  int points = 0;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Per-experiment record. Verdicts derive only from the recorded numbers.
struct EstimateReport {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<SeriesPoint> series;
  std::vector<LinearFit> fits;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;

  void param(const std::string& key, double v) { params.emplace_back(key, v); }
  void label(const std::string& key, const std::string& v) { labels.emplace_back(key, v); }
  void point(const std::string& s, double index, double value) { series.push_back({s, index, value}); }

  std::vector<double> values_of(const std::string& s) const {
    std::vector<double> out;
    for (const auto& p : series)
      if (p.series == s) out.push_back(p.value);
    return out;
  }

  const Verdict* verdict(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return &v;
    return nullptr;
  }

  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y, std::string name = "") {
  LinearFit fit;
  fit.name = std::move(name);
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) return fit;
  const double cnt = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = cnt * sxx - sx * sx;
  fit.slope = (cnt * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / cnt;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / cnt);
  return fit;
}

/// Verdict for a j-ordered series: every value finite and the two-window ratio bounded.
inline Verdict non_growing_verdict(const std::string& name, std::span<const double> series, double growth_factor) {
  Verdict v;
  v.name = name;
  v.threshold = growth_factor;
  const bool finite = std::all_of(series.begin(), series.end(), [](double x) { return std::isfinite(x) && x >= 0.0; });
  v.measured = two_window_ratio(series);
  v.pass = finite && v.measured <= growth_factor;
  v.detail = finite ? "max(upper half) / max(lower half)" : "non-finite entry in series";
  return v;
}

// ---------------------------------------------------------------------------
// Weight g_{j,theta} and the elementary inequalities behind the kernel estimate

/// g_{j,theta}(y) = (2^j |y|)^theta / (|y|^n (1 + 2^j |y|)), y != 0.
inline double weight_value(int j, double theta, double abs_y, int n) {
  const double t = std::ldexp(abs_y, j);
  return std::pow(t, theta) / (std::pow(abs_y, n) * (1.0 + t));
}

inline void require_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0,1)");
}

/// N^{-n} sum over offset nodes y != 0 of g_{j,theta}(y).
inline double weight_l1(int j, double theta, const TorusGrid& grid) {
  require_theta(theta);
  std::vector<double> y(grid.dim());
  double s = 0.0;
  for (std::size_t l = 1; l < grid.size(); ++l) {
    grid.offset(l, y);
    s += weight_value(j, theta, euclidean_norm(std::span<const double>(y)), grid.dim());
  }
  return s * grid.weight();
}

inline EstimateReport weight_l1_sweep(int j_lo, int j_hi, double theta, const TorusGrid& grid,
                                      double bound_factor) {
  EstimateReport rep;
  rep.experiment = "weight-l1";
  rep.param("theta", theta);
  rep.param("N", grid.points_per_axis());
  rep.param("n", grid.dim());
  std::vector<double> vals;
  for (int j = j_lo; j <= j_hi; ++j) {
    vals.push_back(weight_l1(j, theta, grid));
    rep.point("weight_l1", j, vals.back());
  }
  const double mx = *std::max_element(vals.begin(), vals.end());
  const double mn = *std::min_element(vals.begin(), vals.end());
  rep.verdicts.push_back({"uniform_in_j", mn > 0.0 && mx / mn <= bound_factor, mx / mn, bound_factor,
                          "max/min of |g_j|_1 over the j range"});
  return rep;
}

/// |e^{i k.eta} - 1| / (2 |k|^theta |eta|^theta); at most 1 for theta in (0,1).
inline double phase_increment_ratio(std::span<const int> k, std::span<const double> eta, double theta) {
  double dot = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) dot += k[i] * eta[i];
  const double lhs = std::abs(std::polar(1.0, dot) - 1.0);
  const double rhs = 2.0 * std::pow(euclidean_norm(k), theta) * std::pow(euclidean_norm(eta), theta);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : infinity;
  return lhs / rhs;
}

/**
 * Smallest C with |eta|^N <= C sum_{|gamma| = N} |(e^{-i eta} - 1)^gamma|
 * over the grid of `samples` points per axis in [-pi, pi)^n, eta != 0.
 */
inline double norm_equivalence_constant(int n, int power, int samples) {
  const TorusGrid g(n, samples);
  const auto gammas = multi_indices_exact(n, power);
  std::vector<double> eta(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.offset(i, eta);
    const double r = euclidean_norm(std::span<const double>(eta));
    if (r == 0.0) continue;
    double s = 0.0;
    for (const auto& gm : gammas) {
      double prod = 1.0;
      for (int a = 0; a < n; ++a) prod *= std::pow(std::abs(std::polar(1.0, -eta[a]) - 1.0), gm[a]);
      s += prod;
    }
    worst = std::max(worst, std::pow(r, power) / s);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Random band-limited test families

enum class Envelope { flat, weighted, single_block };

struct FamilySpec {
  Envelope envelope = Envelope::flat;
  double sigma = 0.0;  // weighted envelope: block j scaled by 2^{-j sigma}
  int trials = 8;
  std::uint64_t seed = 1;
  bool real_valued = false;
};

inline std::string to_string(Envelope e) {
  switch (e) {
    case Envelope::flat: return "flat";
    case Envelope::weighted: return "weighted";
    case Envelope::single_block: return "single-block";
  }
  return "?";
}

/// Complex Gaussian coefficients on `lattice`, conjugate-symmetrized on request.
inline SpectralCoeffs random_coeffs(const FrequencyLattice& lattice, int d, std::mt19937_64& rng, bool real_valued) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralCoeffs F(lattice, d);
  for (auto& c : F.coeffs) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    c = cplx(re, im);
  }
  if (real_valued) {
    for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
      const std::size_t mir = lattice.mirror(idx);
      if (mir < idx) continue;
      for (int c = 0; c < d; ++c) {
        if (mir == idx) {
          F.coeffs[idx * d + c] = F.coeffs[idx * d + c].real();
        } else {
          F.coeffs[mir * d + c] = std::conj(F.coeffs[idx * d + c]);
        }
      }
    }
  }
  return F;
}

/**
 * Test functions band-limited to `lattice`. Single-block families hold one
 * function per (trial, block) with nonzero block on the lattice.
 */
inline std::vector<GridFunction> random_family(const FamilySpec& spec, const FrequencyLattice& lattice,
                                               const TorusGrid& grid, int d, const DyadicDecomposition& D) {
  require_nyquist(grid, lattice);
  std::mt19937_64 rng(spec.seed);
  std::vector<GridFunction> out;
  std::vector<int> k(lattice.dim());
  for (int t = 0; t < spec.trials; ++t) {
    if (spec.envelope == Envelope::single_block) {
      for (int kappa = 0; kappa <= D.jmax(); ++kappa) {
        SpectralCoeffs F = random_coeffs(lattice, d, rng, spec.real_valued);
        double mass = 0.0;
        for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
          lattice.point(idx, k);
          const double w = D.value(kappa, k);
          mass += w;
          for (auto& c : F.at(idx)) c *= w;
        }
        if (mass > 0.0) out.push_back(inverse_transform(F, grid));
      }
      continue;
    }
    SpectralCoeffs F = random_coeffs(lattice, d, rng, spec.real_valued);
    if (spec.envelope == Envelope::weighted) {
      for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
        lattice.point(idx, k);
        double w = 0.0;
        for (int j = 0; j <= D.jmax() + 1; ++j) w += D.value(j, k) * std::exp2(-j * spec.sigma);
        for (auto& c : F.at(idx)) c *= w;
      }
    }
    out.push_back(inverse_transform(F, grid));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernel estimate

struct NormGeometry {
  int kmax = 16;
  int N = 64;
};

/**
 * C_j = max_{x, y != 0} |K_j(x,y)| / (2^{jm} g_{j,theta}(y) |a|_m^{(rho,0)}).
 * Each K_j is the full finite sum over supp phi_j: the decomposition used
 * for the kernels lives on a lattice containing every requested block.
 */
inline EstimateReport kernel_bound_experiment(const Symbol& a, const BumpParams& bump, int j_lo, int j_hi,
                                              double theta, const TorusGrid& grid, NormGeometry norm_geom = {},
                                              double growth_factor = 2.0) {
  validate(a);
  require_theta(theta);
  if (j_hi < j_lo || j_lo < 0) throw std::invalid_argument("kernel_bound_experiment: empty j range");
  const int n = a.n;
  const int kk = std::max(grid.full_kmax(), 1 << (j_hi + 1));
  const DyadicDecomposition D = DyadicDecomposition::build(FrequencyLattice(n, kk), bump);

  SymbolNormOptions opt;
  opt.r = 0.0;
  const double anorm =
      symbol_norm(a, FrequencyLattice(n, norm_geom.kmax), TorusGrid(n, norm_geom.N), opt).value;

  EstimateReport rep;
  rep.experiment = "kernel-bound";
  rep.label("symbol", a.name);
  rep.param("m", a.m);
  rep.param("theta", theta);
  rep.param("N", grid.points_per_axis());
  rep.param("n", n);
  rep.param("d", a.d);
  rep.param("j_lo", j_lo);
  rep.param("j_hi", j_hi);
  rep.param("kernel_lattice_kmax", kk);
  rep.param("symbol_norm_rho0", anorm);
  rep.param("growth_factor", growth_factor);

  const std::size_t dd = static_cast<std::size_t>(a.d) * a.d;
  const std::size_t rows = a.x_independent ? 1 : grid.size();
  std::vector<double> absy(grid.size());
  {
    std::vector<double> y(n);
    for (std::size_t l = 0; l < grid.size(); ++l) {
      grid.offset(l, y);
      absy[l] = euclidean_norm(std::span<const double>(y));
    }
  }
  std::vector<double> cj;
  for (int j = j_lo; j <= j_hi; ++j) {
    std::vector<double> row_max(rows, 0.0);
    const double scale = std::exp2(j * a.m) * anorm;
    parallel_for(rows, [&](std::size_t xi) {
      std::vector<double> x(n);
      grid.node(xi, x);
      std::vector<cplx> K(grid.size() * dd);
      kernel_row(a, D, j, grid, x, K);
      double m = 0.0;
      for (std::size_t l = 1; l < grid.size(); ++l) {
        const double num = spectral_norm(std::span<const cplx>(K).subspan(l * dd, dd), a.d);
        if (num == 0.0) continue;
        m = std::max(m, num / (scale * weight_value(j, theta, absy[l], n)));
      }
      row_max[xi] = m;
    });
    double c = *std::max_element(row_max.begin(), row_max.end());
    if (anorm == 0.0) c = 0.0;
    cj.push_back(c);
    rep.point("C_j", j, c);
  }
  if (anorm == 0.0) rep.notes.push_back("zero symbol: all kernels vanish");
  rep.verdicts.push_back(non_growing_verdict("non_growing", cj, growth_factor));
  return rep;
}

// ---------------------------------------------------------------------------
// Young-type convolution bounds

struct YoungCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// y -> max_x |K(x, y)|
inline std::vector<double> kernel_majorant(const KernelBlock& K) {
  std::vector<double> g(K.grid.size(), 0.0);
  const std::size_t rows = K.shared_rows ? 1 : K.grid.size();
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t l = 0; l < K.grid.size(); ++l) g[l] = std::max(g[l], spectral_norm(K.at(x, l), K.dim));
  return g;
}

inline double quadrature_l1(std::span<const double> g, const TorusGrid& grid) {
  double s = 0.0;
  for (double v : g) s += std::abs(v);
  return s * grid.weight();
}

/// |F|_p <= |g|_1 |f|_p for F(x) = int K(x,y) f(x-y) dy with |K(x,y)| <= g(y).
inline YoungCheck convolution_bound_check(const KernelBlock& K, const GridFunction& f, double p,
                                          std::span<const double> g) {
  YoungCheck c;
  c.lhs = lp_norm(apply_via_kernel(K, f), p);
  c.rhs = quadrature_l1(g, K.grid) * lp_norm(f, p);
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-9);
  return c;
}

inline YoungCheck convolution_bound_check(const KernelBlock& K, const GridFunction& f, double p) {
  const auto g = kernel_majorant(K);
  return convolution_bound_check(K, f, p, g);
}

/**
 * Double form: K(x,y,z) = A(x,y) B(x,z), |K| <= g(y) h(z) with g, h the
 * majorants of A and B. F(x) = int int K(x,y,z) f(x-y-z) dy dz directly.
 */
inline YoungCheck double_convolution_bound_check(const KernelBlock& A, const KernelBlock& B,
                                                 const GridFunction& f, double p) {
  if (!(A.grid == f.grid) || !(B.grid == f.grid)) throw std::invalid_argument("double convolution: grid mismatch");
  const auto& grid = f.grid;
  const int n = grid.dim();
  const int d = f.dim;
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  GridFunction F(grid, d);
  const double w = grid.weight() * grid.weight();
  parallel_for(grid.size(), [&](std::size_t node) {
    std::vector<int> mi(n), yi(n), zi(n), diff(n);
    grid.multi_index(node, mi);
    std::vector<cplx> prod(dd), acc(d, cplx(0.0));
    for (std::size_t y = 0; y < grid.size(); ++y) {
      grid.multi_index(y, yi);
      for (std::size_t z = 0; z < grid.size(); ++z) {
        grid.multi_index(z, zi);
        for (int i = 0; i < n; ++i) diff[i] = mi[i] - yi[i] - zi[i];
        matmul(A.at(node, y), B.at(node, z), prod, d);
        matvec_accumulate(prod, f.at(grid.flat_index(diff)), acc, d);
      }
    }
    auto dst = F.at(node);
    for (int c = 0; c < d; ++c) dst[c] = w * acc[c];
  });
  YoungCheck c;
  c.lhs = lp_norm(F, p);
  c.rhs = quadrature_l1(kernel_majorant(A), grid) * quadrature_l1(kernel_majorant(B), grid) * lp_norm(f, p);
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-9);
  return c;
}

/// Random kernel table on `grid`; positive scalars when d = 1 and `positive`.
inline KernelBlock random_kernel(const TorusGrid& grid, int d, bool x_dependent, bool positive,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  KernelBlock K{grid, d, 0, !x_dependent, {}};
  const std::size_t rows = x_dependent ? grid.size() : 1;
  K.values.resize(rows * grid.size() * d * d);
  for (auto& v : K.values) v = positive ? cplx(uni(rng), 0.0) : cplx(gauss(rng), gauss(rng));
  return K;
}

inline GridFunction random_grid_function(const TorusGrid& grid, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridFunction f(grid, d);
  for (auto& v : f.values) v = cplx(gauss(rng), gauss(rng));
  return f;
}

/// Randomized Young checks; single and double forms alternate.
inline EstimateReport young_trials(int trials, double p, std::uint64_t seed, int N = 24) {
  EstimateReport rep;
  rep.experiment = "young";
  rep.param("p", p);
  rep.param("trials", trials);
  rep.param("seed", static_cast<double>(seed));
  std::mt19937_64 rng(seed);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int d = 1 + t % 2;
    const bool positive = d == 1;
    const TorusGrid grid(1, (t % 3 == 2) ? N / 2 : N);
    const GridFunction f = random_grid_function(grid, d, rng);
    YoungCheck c;
    if (t % 4 == 3) {
      const TorusGrid small(1, 10);
      const GridFunction fs = random_grid_function(small, d, rng);
      c = double_convolution_bound_check(random_kernel(small, d, true, positive, rng),
                                         random_kernel(small, d, true, positive, rng), fs, p);
    } else {
      c = convolution_bound_check(random_kernel(grid, d, t % 2 == 0, positive, rng), f, p);
    }
    if (!c.holds) ++violations;
    const double ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
    worst = std::max(worst, ratio);
    rep.point("lhs_over_rhs", t, ratio);
  }
  rep.verdicts.push_back({"no_violations", violations == 0, static_cast<double>(violations), 0.0,
                          "trials with |F|_p > (1+1e-9) rhs"});
  rep.param("worst_ratio", worst);
  return rep;
}

// ---------------------------------------------------------------------------
// Block estimate and commutator decay

inline double guard_denominator() { return 1e-14; }

/**
 * Ratios |op[a] op[phi_j] f|_p / (2^{jm} |op[chi_j] f|_p) over a family.
 * D must cover every frequency the grid resolves; the symbol is sampled on
 * the family lattice.
 */
inline EstimateReport block_estimate_experiment(const SampledSymbol& a, const DyadicDecomposition& D,
                                                const std::vector<GridFunction>& family, double p, int j_lo,
                                                int j_hi, double growth_factor = 2.0) {
  if (j_hi < j_lo || j_lo < 0) throw std::invalid_argument("block_estimate_experiment: empty j range");
  EstimateReport rep;
  rep.experiment = "block-estimate";
  rep.param("m", a.order());
  rep.param("p", p);
  rep.param("j_lo", j_lo);
  rep.param("j_hi", j_hi);
  rep.param("family_size", static_cast<double>(family.size()));
  rep.param("growth_factor", growth_factor);
  const auto& L = a.lattice();
  std::vector<int> k(L.dim());
  std::vector<double> per_j(j_hi - j_lo + 1, 0.0);
  int skipped = 0, used = 0;
  for (const auto& f : family) {
    const SpectralCoeffs F = forward_transform(f, L);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double den = std::exp2(j * a.order()) * lp_norm(op_chi(f, D, j), p);
      if (den <= guard_denominator()) {
        ++skipped;
        continue;
      }
      SpectralCoeffs G = F;
      for (std::size_t idx = 0; idx < L.size(); ++idx) {
        L.point(idx, k);
        const double w = D.value(j, k);
        for (auto& c : G.at(idx)) c *= w;
      }
      const double ratio = lp_norm(apply_symbol(a, G), p) / den;
      per_j[j - j_lo] = std::max(per_j[j - j_lo], ratio);
      ++used;
    }
  }
  if (used == 0) throw std::invalid_argument("block_estimate_experiment: all denominators vanish");
  for (int j = j_lo; j <= j_hi; ++j) rep.point("max_ratio", j, per_j[j - j_lo]);
  rep.param("skipped", skipped);
  rep.verdicts.push_back(non_growing_verdict("non_growing", per_j, growth_factor));
  return rep;
}

/**
 * c_j = max_f |(op[phi_j] op[a] - op[a] op[phi_j]) f|_p / |f|_{B^m_{p1}} and
 * the least-squares slope of log2 c_j against j.
 */
inline EstimateReport commutator_decay_experiment(const SampledSymbol& a, const Symbol& meta,
                                                  const DyadicDecomposition& D,
                                                  const std::vector<GridFunction>& family, double p, int j_lo,
                                                  int j_hi, double slope_tolerance = 0.35) {
  if (j_hi < j_lo || j_lo < 0) throw std::invalid_argument("commutator_decay_experiment: empty j range");
  EstimateReport rep;
  rep.experiment = "commutator-decay";
  rep.label("symbol", meta.name);
  rep.param("m", meta.m);
  rep.param("r", meta.r);
  rep.param("p", p);
  rep.param("j_lo", j_lo);
  rep.param("j_hi", j_hi);
  rep.param("slope_tolerance", slope_tolerance);
  rep.param("family_size", static_cast<double>(family.size()));

  if (a.x_independent()) {
    for (int j = j_lo; j <= j_hi; ++j) rep.point("c_j", j, 0.0);
    rep.notes.push_back("exact commutation: x-independent symbol, op[phi_j] and op[a] commute");
    rep.verdicts.push_back({"exact_commutation", true, 0.0, 0.0, "x-independent symbol"});
    return rep;
  }

  std::vector<double> bnorm(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) bnorm[i] = besov_norm(family[i], D, {meta.m, p, 1.0}).norm;

  std::vector<double> cj;
  for (int j = j_lo; j <= j_hi; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (bnorm[i] <= guard_denominator()) continue;
      c = std::max(c, lp_norm(commutator_block(a, family[i], D, j), p) / bnorm[i]);
    }
    cj.push_back(c);
    rep.point("c_j", j, c);
  }
  std::vector<double> xs, ys;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double c = cj[j - j_lo];
    if (c > 0.0 && std::isfinite(c)) {
      xs.push_back(j);
      ys.push_back(std::log2(c));
    }
  }
  if (xs.size() < 3) throw std::invalid_argument("commutator_decay_experiment: fewer than 3 usable j points");
  auto fit = least_squares(xs, ys, "log2_c_j");
  rep.fits.push_back(fit);
  const double bound = -meta.r + slope_tolerance;
  rep.verdicts.push_back({"decay_slope", fit.slope <= bound, fit.slope, bound,
                          "least-squares slope of log2 c_j vs j; residual " + std::to_string(fit.residual)});
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical operator norm between Besov spaces

struct OpNormSetup {
  double s = 0.5;
  double p = 2.0;
  double q = 1.0;
  int kmax = 128;        // family band; doubled for the stability check
  int N = 0;             // 0: smallest N with N >= 2 (kmax + bandwidth) + 1
  FamilySpec family{};
  BumpParams bump{};
  NormGeometry norm_geom{};
  double stability_factor = 1.5;
};

inline int margin_points(int kmax, const Symbol& a) {
  const int bw = a.x_bandwidth < 0 ? kmax : a.x_bandwidth;
  return 2 * (kmax + bw) + 1;
}

/// Q = max_f |op[a] f|_{B^s_{pq}} / |f|_{B^{s+m}_{pq}} at one geometry.
inline double empirical_operator_norm(const Symbol& a, const OpNormSetup& setup, int kmax, int N,
                                      std::vector<double>* per_trial = nullptr) {
  const TorusGrid grid(a.n, N);
  const FrequencyLattice L(a.n, kmax);
  const DyadicDecomposition D = DyadicDecomposition::build(full_lattice(grid), setup.bump);
  const SampledSymbol sa(a, grid, L);
  const auto family = random_family(setup.family, L, grid, a.d, D);
  double Q = 0.0;
  for (const auto& f : family) {
    const double den = besov_norm(f, D, {setup.s + a.m, setup.p, setup.q}).norm;
    if (den <= guard_denominator()) continue;
    const double ratio = besov_norm(apply_op(sa, f), D, {setup.s, setup.p, setup.q}).norm / den;
    if (per_trial) per_trial->push_back(ratio);
    Q = std::max(Q, ratio);
  }
  return Q;
}

inline EstimateReport operator_norm_experiment(const Symbol& a, const OpNormSetup& setup) {
  validate(a);
  if (!(setup.s > 0.0 && setup.s < a.r))
    throw std::invalid_argument("opnorm: hypothesis 0 < s < r violated (s=" + std::to_string(setup.s) +
                                ", r=" + std::to_string(a.r) + ")");
  EstimateReport rep;
  rep.experiment = "opnorm";
  rep.label("symbol", a.name);
  rep.label("envelope", to_string(setup.family.envelope));
  rep.param("m", a.m);
  rep.param("r", a.r);
  rep.param("s", setup.s);
  rep.param("p", setup.p);
  rep.param("q", setup.q);
  rep.param("n", a.n);
  rep.param("d", a.d);
  rep.param("trials", setup.family.trials);
  rep.param("seed", static_cast<double>(setup.family.seed));
  rep.param("stability_factor", setup.stability_factor);

  const int N1 = setup.N > 0 ? setup.N : margin_points(setup.kmax, a);
  if (N1 < margin_points(setup.kmax, a))
    throw std::invalid_argument("opnorm: N below the aliasing margin 2(Kmax + bandwidth) + 1");
  double Qs[2];
  for (int level = 0; level < 2; ++level) {
    const int kmax = setup.kmax << level;
    const int N = N1 << level;
    std::vector<double> trials;
    Qs[level] = empirical_operator_norm(a, setup, kmax, N, &trials);
    rep.param("Kmax_" + std::to_string(level), kmax);
    rep.param("N_" + std::to_string(level), N);
    for (std::size_t t = 0; t < trials.size(); ++t) rep.point("ratio_K" + std::to_string(kmax), t, trials[t]);
    rep.point("Q", kmax, Qs[level]);
  }
  const double anorm =
      symbol_norm(a, FrequencyLattice(a.n, setup.norm_geom.kmax), TorusGrid(a.n, setup.norm_geom.N)).value;
  rep.param("symbol_norm", anorm);
  rep.param("Q_over_symbol_norm", anorm > 0.0 ? Qs[1] / anorm : 0.0);
  const bool finite = std::isfinite(Qs[0]) && std::isfinite(Qs[1]);
  rep.verdicts.push_back({"finite", finite, Qs[1], 0.0, "empirical Q at the finer geometry"});
  const double stab = Qs[0] > 0.0 ? Qs[1] / Qs[0] : (Qs[1] == 0.0 ? 1.0 : infinity);
  rep.verdicts.push_back({"stable_under_doubling", finite && stab <= setup.stability_factor, stab,
                          setup.stability_factor, "Q(2 Kmax) / Q(Kmax)"});
  return rep;
}

/// |op[a1 + a2] f - op[a1] f - op[a2] f|_inf
inline double linearity_in_symbol_check(const Symbol& a1, const Symbol& a2, const GridFunction& f,
                                        const FrequencyLattice& lattice) {
  const GridFunction lhs = apply_op(sum(a1, a2), f, lattice);
  const GridFunction rhs = apply_op(a1, f, lattice) + apply_op(a2, f, lattice);
  return max_difference(lhs, rhs);
}

}  // namespace torpsido
