#pragma once

#include <memory>

#include "torpsido/difference.hpp"
#include "torpsido/grid.hpp"

namespace torpsido {

/**
 * Operator-valued symbol a(x, k) in C^{d x d} on T^n x Z^n.
 *
 * `eval(x, k, beta, out)` writes the row-major matrix d_x^beta a(x, k) into
 * `out` for every |beta| <= floor(r). Evaluators must be pure and reentrant.
 * `x_bandwidth` is the ell-infinity degree of x -> a(x, k) when that is a
 * trigonometric polynomial, or -1 when it is not (or unknown).
 */
struct Symbol {
  using Evaluator = std::function<void(std::span<const double> x, std::span<const int> k,
                                       std::span<const int> beta, std::span<cplx> out)>;

  std::string name;
  int n = 1;
  int d = 1;
  double m = 0.0;    // order
  double r = 0.0;    // smoothness in x
  int rho = 2;       // number of k-differences controlled
  bool x_independent = false;
  bool k_independent = false;
  int x_bandwidth = -1;
  Evaluator eval;

  int max_derivative() const { return static_cast<int>(std::floor(r)); }

  std::vector<cplx> value(std::span<const double> x, std::span<const int> k) const {
    std::vector<cplx> out(static_cast<std::size_t>(d) * d);
    const std::vector<int> zero(n, 0);
    eval(x, k, zero, out);
    return out;
  }
};

inline void validate(const Symbol& a) {
  if (a.n < 1 || a.d < 1) throw std::invalid_argument("symbol: invalid dimensions");
  if (a.r < 0.0) throw std::invalid_argument("symbol: smoothness r must be >= 0");
  if (a.rho < 0) throw std::invalid_argument("symbol: difference order must be >= 0");
  if (!a.eval) throw std::invalid_argument("symbol: missing evaluator");
}

/// c * a
inline Symbol scaled(const Symbol& a, cplx c) {
  Symbol s = a;
  s.name = a.name + "*scaled";
  s.eval = [inner = a.eval, c](auto x, auto k, auto beta, std::span<cplx> out) {
    inner(x, k, beta, out);
    for (auto& v : out) v *= c;
  };
  return s;
}

/// a1 + a2 (orders combine as the max, smoothness as the min).
inline Symbol sum(const Symbol& a1, const Symbol& a2) {
  if (a1.n != a2.n || a1.d != a2.d) throw std::invalid_argument("symbol sum: shape mismatch");
  Symbol s;
  s.name = a1.name + "+" + a2.name;
  s.n = a1.n;
  s.d = a1.d;
  s.m = std::max(a1.m, a2.m);
  s.r = std::min(a1.r, a2.r);
  s.rho = std::min(a1.rho, a2.rho);
  s.x_independent = a1.x_independent && a2.x_independent;
  s.k_independent = a1.k_independent && a2.k_independent;
  s.x_bandwidth = (a1.x_bandwidth < 0 || a2.x_bandwidth < 0) ? -1 : std::max(a1.x_bandwidth, a2.x_bandwidth);
  const int dd = a1.d * a1.d;
  s.eval = [e1 = a1.eval, e2 = a2.eval, dd](auto x, auto k, auto beta, std::span<cplx> out) {
    std::vector<cplx> tmp(dd);
    e1(x, k, beta, out);
    e2(x, k, beta, tmp);
    for (int i = 0; i < dd; ++i) out[i] += tmp[i];
  };
  return s;
}

/// <k>^{m0} a, declared with order m + m0.
inline Symbol times_bracket(const Symbol& a, double m0) {
  Symbol s = a;
  s.name = a.name + "*bracket";
  s.m = a.m + m0;
  s.k_independent = a.k_independent && m0 == 0.0;
  s.eval = [inner = a.eval, m0](auto x, std::span<const int> k, auto beta, std::span<cplx> out) {
    inner(x, k, beta, out);
    const double w = std::pow(bracket(k), m0);
    for (auto& v : out) v *= w;
  };
  return s;
}

/// d_x^beta a(x, k) tabulated over a k-box at fixed x.
inline LatticeTable<cplx> tabulate_in_k(const Symbol& a, std::span<const double> x,
                                        std::span<const int> beta, const LatticeBox& box) {
  return LatticeTable<cplx>::tabulate(box, a.d * a.d, [&](std::span<const int> k, std::span<cplx> out) {
    a.eval(x, k, beta, out);
  });
}

struct SymbolNormArgmax {
  MultiIndex alpha;
  MultiIndex beta;
  std::vector<double> x;
  std::vector<double> y;  // second point for the Hoelder term, empty otherwise
  std::vector<int> k;
};

struct SymbolNormReport {
  double value = 0.0;         // integer part + Hoelder part
  double integer_part = 0.0;  // ||a||_m^{(rho, floor r)}
  double holder_part = 0.0;   // 0 when r is an integer
  bool lower_bound = true;    // finite sampling of an infinite supremum
  SymbolNormArgmax argmax;
  std::vector<std::pair<MultiIndex, double>> per_alpha;
};

struct SymbolNormOptions {
  int rho = -1;                 // < 0: use the symbol's declared rho
  double r = -1.0;              // < 0: use the symbol's declared r
  bool include_holder = true;
};

/**
 * ||a||_m^{(rho,r)} sampled on grid x lattice:
 *   max_{|alpha|<=rho, |beta|<=floor r} sup_{x,k} <k>^{|alpha|-m} |Delta^alpha_k d_x^beta a(x,k)|
 * plus, for non-integer r, the Hoelder quotient over distinct grid pairs with
 * the torus distance. The result is a lower bound for the true supremum.
 */
inline SymbolNormReport symbol_norm(const Symbol& a, const FrequencyLattice& lattice,
                                    const TorusGrid& grid, SymbolNormOptions opt = {}) {
  validate(a);
  if (grid.dim() != a.n || lattice.dim() != a.n)
    throw std::invalid_argument("symbol_norm: dimension mismatch");
  const double r = opt.r >= 0.0 ? opt.r : a.r;
  if (r < 0.0) throw std::invalid_argument("symbol_norm: r must be >= 0");
  const int rho = opt.rho >= 0 ? opt.rho : a.rho;
  const int n = a.n;
  const int d = a.d;
  const int dd = d * d;
  const int K = lattice.kmax();
  const int rfloor = static_cast<int>(std::floor(r));
  const bool fractional = (r - rfloor) > 0.0 && opt.include_holder;
  const double holder_exp = r - rfloor;

  const auto alphas = multi_indices_up_to(n, rho);
  const auto betas = multi_indices_up_to(n, rfloor);
  const LatticeBox box = LatticeBox::cube(n, -K, K + rho);
  const LatticeBox need = LatticeBox::cube(n, -K, K);

  std::vector<double> kweight(lattice.size() * (rho + 1));
  {
    std::vector<int> k(n);
    for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
      lattice.point(idx, k);
      const double br = bracket(std::span<const int>(k));
      for (int t = 0; t <= rho; ++t) kweight[idx * (rho + 1) + t] = std::pow(br, t - a.m);
    }
  }

  SymbolNormReport rep;
  rep.per_alpha.reserve(alphas.size());
  for (const auto& al : alphas) rep.per_alpha.emplace_back(al, 0.0);

  // Per-node maxima, reduced in node order afterwards.
  struct Cell {
    double value = 0.0;
    std::size_t alpha = 0, beta = 0, kidx = 0;
    std::vector<double> per_alpha;
  };
  const std::size_t xcount = a.x_independent ? 1 : grid.size();
  std::vector<Cell> cells(xcount);
  parallel_for(xcount, [&](std::size_t xi) {
    std::vector<double> x(n);
    grid.node(xi, x);
    std::vector<int> k(n);
    Cell& cell = cells[xi];
    cell.per_alpha.assign(alphas.size(), 0.0);
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      const auto tab = tabulate_in_k(a, x, betas[bi], box);
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const auto diff = discrete_difference(tab, alphas[ai], need);
        const int aord = order(alphas[ai]);
        for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
          lattice.point(idx, k);
          const auto mat = diff.at(k);
          const double v = kweight[idx * (rho + 1) + aord] * spectral_norm(mat, d);
          if (v > cell.per_alpha[ai]) cell.per_alpha[ai] = v;
          if (v > cell.value) {
            cell.value = v;
            cell.alpha = ai;
            cell.beta = bi;
            cell.kidx = idx;
          }
        }
      }
    }
  });

  std::size_t best_x = 0;
  for (std::size_t xi = 0; xi < xcount; ++xi) {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai)
      rep.per_alpha[ai].second = std::max(rep.per_alpha[ai].second, cells[xi].per_alpha[ai]);
    if (cells[xi].value > cells[best_x].value) best_x = xi;
  }
  rep.integer_part = cells[best_x].value;
  rep.argmax.alpha = alphas[cells[best_x].alpha];
  rep.argmax.beta = betas[cells[best_x].beta];
  rep.argmax.x = grid.node(best_x);
  rep.argmax.k = lattice.point(cells[best_x].kidx);

  if (fractional && !a.x_independent) {
    // Hoelder quotient for every |beta| = floor r.
    const auto top_betas = multi_indices_exact(n, rfloor);
    double best = 0.0;
    SymbolNormArgmax arg;
    for (const auto& beta : top_betas) {
      // diffs[xi][ai][kidx] matrices
      std::vector<std::vector<cplx>> diffs(grid.size());
      parallel_for(grid.size(), [&](std::size_t xi) {
        std::vector<double> x(n);
        grid.node(xi, x);
        std::vector<int> k(n);
        const auto tab = tabulate_in_k(a, x, beta, box);
        auto& out = diffs[xi];
        out.resize(alphas.size() * lattice.size() * dd);
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          const auto diff = discrete_difference(tab, alphas[ai], need);
          for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
            lattice.point(idx, k);
            const auto mat = diff.at(k);
            std::copy(mat.begin(), mat.end(), out.begin() + (ai * lattice.size() + idx) * dd);
          }
        }
      });
      struct PairBest {
        double value = 0.0;
        std::size_t y = 0, ai = 0, kidx = 0;
      };
      std::vector<PairBest> per_x(grid.size());
      parallel_for(grid.size(), [&](std::size_t xi) {
        std::vector<double> x(n), y(n);
        grid.node(xi, x);
        std::vector<cplx> delta(dd);
        PairBest pb;
        for (std::size_t yi = xi + 1; yi < grid.size(); ++yi) {
          grid.node(yi, y);
          const double dist = torus_distance(x, y);
          const double denom = std::pow(dist, holder_exp);
          for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const int aord = order(alphas[ai]);
            for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
              const std::size_t off = (ai * lattice.size() + idx) * dd;
              for (int c = 0; c < dd; ++c) delta[c] = diffs[xi][off + c] - diffs[yi][off + c];
              const double v = kweight[idx * (rho + 1) + aord] * spectral_norm(delta, d) / denom;
              if (v > pb.value) pb = PairBest{v, yi, ai, idx};
            }
          }
        }
        per_x[xi] = pb;
      });
      for (std::size_t xi = 0; xi < grid.size(); ++xi) {
        if (per_x[xi].value > best) {
          best = per_x[xi].value;
          arg.alpha = alphas[per_x[xi].ai];
          arg.beta = beta;
          arg.x = grid.node(xi);
          arg.y = grid.node(per_x[xi].y);
          arg.k = lattice.point(per_x[xi].kidx);
        }
      }
    }
    rep.holder_part = best;
    if (best > 0.0 && best >= rep.integer_part) rep.argmax = arg;
  }
  rep.value = rep.integer_part + rep.holder_part;
  return rep;
}

/**
 * Checks the discrete Leibniz rule
 *   Delta^alpha (f g)(k) = sum_{beta <= alpha} C(alpha,beta) (Delta^beta f)(k) (Delta^{alpha-beta} g)(k+beta)
 * for matrix-valued tables (comps = d*d) and returns the largest residual.
 */
inline double discrete_leibniz_check(const LatticeTable<cplx>& f, const LatticeTable<cplx>& g,
                                     std::span<const int> alpha) {
  if (f.comps != g.comps || f.box.lo != g.box.lo || f.box.hi != g.box.hi)
    throw std::invalid_argument("leibniz: table shapes differ");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(f.comps))));
  if (d * d != f.comps) throw std::invalid_argument("leibniz: comps must be a square");
  const int n = f.box.dim();

  LatticeTable<cplx> fg(f.box, f.comps);
  for (std::size_t i = 0; i < f.box.size(); ++i)
    matmul(std::span<const cplx>(f.data).subspan(i * f.comps, f.comps),
           std::span<const cplx>(g.data).subspan(i * g.comps, g.comps),
           std::span<cplx>(fg.data).subspan(i * f.comps, f.comps), d);
  const auto lhs = discrete_difference(fg, alpha);  // throws on margin violation

  // All sub-multi-indices beta <= alpha.
  std::vector<MultiIndex> subs;
  {
    MultiIndex b(n, 0);
    auto rec = [&](auto&& self, int axis) -> void {
      if (axis == n) {
        subs.push_back(b);
        return;
      }
      for (int v = 0; v <= alpha[axis]; ++v) {
        b[axis] = v;
        self(self, axis + 1);
      }
    };
    rec(rec, 0);
  }
  std::vector<LatticeTable<cplx>> df, dg;
  std::vector<double> coef;
  for (const auto& b : subs) {
    MultiIndex rest(n);
    double c = 1.0;
    for (int i = 0; i < n; ++i) {
      rest[i] = alpha[i] - b[i];
      c *= binomial(alpha[i], b[i]);
    }
    df.push_back(discrete_difference(f, b));
    dg.push_back(discrete_difference(g, rest));
    coef.push_back(c);
  }

  double residual = 0.0;
  std::vector<int> k(n), kb(n);
  std::vector<cplx> acc(f.comps), prod(f.comps);
  for (std::size_t i = 0; i < lhs.box.size(); ++i) {
    lhs.box.point(i, k);
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    for (std::size_t s = 0; s < subs.size(); ++s) {
      for (int a = 0; a < n; ++a) kb[a] = k[a] + subs[s][a];
      matmul(df[s].at(k), dg[s].at(kb), prod, d);
      for (int c = 0; c < f.comps; ++c) acc[c] += coef[s] * prod[c];
    }
    const auto l = lhs.at(k);
    for (int c = 0; c < f.comps; ++c) residual = std::max(residual, std::abs(l[c] - acc[c]));
  }
  return residual;
}

}  // namespace torpsido
