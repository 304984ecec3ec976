#pragma once

// Config-driven experiment runner behind tools/torpsido_cli.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "torpsido/report.hpp"
#include "torpsido/zoo.hpp"

namespace torpsido::cli {

enum ExitCode : int { ok = 0, verdict_failed = 1, usage_error = 2 };

/// Malformed or inconsistent configuration; `what()` names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymbolSpec {
  std::string name = "identity";
  nlohmann::json params = nlohmann::json::object();
};

struct RunConfig {
  std::string experiment;
  int n = 1;
  int d = 1;
  int kmax = 32;
  int N = 0;  // 0: derived from kmax and the symbol's bandwidth
  BumpParams bump{};
  SymbolSpec symbol{};
  NormGeometry norm_geom{};

  int j_lo = 2;
  int j_hi = 6;
  double theta = 0.5;
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  FamilySpec family{};
  int rho_check = -1;  // -1: n + 1
  double growth_factor = 2.0;
  double slope_tolerance = 0.35;
  double stability_factor = 1.5;
  double equivalence_bound = 2.5;

  std::string out_dir = "torpsido_out";
  std::string stem;  // file stem; defaults to the experiment name
  nlohmann::json raw;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"check-dyadic", "kernel-bound",  "block-estimate", "commutator-decay",
                                                 "opnorm",       "besov-norm",    "young",          "selftest"};
  return names;
}

namespace detail {

/// Field access with dotted-path diagnostics and unknown-key rejection.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), field(key));
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(field(key) + ": required field missing");
    return convert<T>(j_.at(key), field(key));
  }

  /// Exponent-like fields accept numbers or the string "inf".
  double get_extended(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return infinity;
    return convert<double>(v, field(key));
  }

  std::optional<Reader> child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Reader(j_.at(key), field(key));
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k) + ": unknown field");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  template <class T>
  static T convert(const nlohmann::json& v, const std::string& name) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(name + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(name + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(name + ": expected a string");
    }
    return v.get<T>();
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Envelope parse_envelope(const std::string& s, const std::string& field) {
  if (s == "flat") return Envelope::flat;
  if (s == "weighted") return Envelope::weighted;
  if (s == "single-block") return Envelope::single_block;
  throw ConfigError(field + ": unknown envelope '" + s + "' (flat, weighted, single-block)");
}

/// 1-based line and column of a byte offset.
inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Builds a zoo symbol from its name and parameter map.
inline Symbol make_symbol(const SymbolSpec& spec, int n, int d) {
  detail::Reader r(spec.params, "symbol.params");
  Symbol a;
  const std::string& nm = spec.name;
  if (nm == "identity") {
    a = zoo::identity(n, d, r.get("r", 1.0));
  } else if (nm == "zero") {
    a = zoo::zero(n, d);
  } else if (nm == "bracket") {
    a = zoo::bracket_power(n, d, r.get("m", 1.0), r.get("r", 1.0));
  } else if (nm == "derivative") {
    a = zoo::derivative(n, d, r.get("axis", 0), r.get("r", 1.0));
  } else if (nm == "cosine") {
    a = zoo::cosine_multiplication(n, d, r.get("m", 0.0), r.get("r", 2.0));
  } else if (nm == "weierstrass") {
    a = zoo::weierstrass(n, d, r.get("r", 0.5), r.get("J", 8), r.get("m", 0.0));
  } else if (nm == "rotation") {
    if (d != 2) throw ConfigError("symbol: rotation requires geometry.d = 2");
    a = zoo::rotation(n, r.get("m", 0.0), r.get("m2", 0.0), r.get("r", 1.0));
  } else {
    throw ConfigError("symbol.name: unknown symbol '" + nm +
                      "' (identity, zero, bracket, derivative, cosine, weierstrass, rotation)");
  }
  const double scale = r.get("scale", 1.0);
  if (spec.params.contains("rho")) a.rho = r.get("rho", a.rho);
  r.finish();
  if (scale != 1.0) a = scaled(a, scale);
  return a;
}

inline void validate(const RunConfig& c) {
  if (std::find(experiment_names().begin(), experiment_names().end(), c.experiment) == experiment_names().end())
    throw ConfigError("experiment: unknown experiment '" + c.experiment + "'");
  if (c.n < 1 || c.n > 3) throw ConfigError("geometry.n: must be 1, 2 or 3");
  if (c.d < 1) throw ConfigError("geometry.d: must be >= 1");
  if (c.kmax < 1) throw ConfigError("geometry.kmax: must be >= 1");
  if (c.N != 0 && c.N < 2 * c.kmax + 1)
    throw ConfigError("geometry.N: N >= 2 Kmax + 1 required (N=" + std::to_string(c.N) +
                      ", Kmax=" + std::to_string(c.kmax) + ")");
  if (!(c.theta > 0.0 && c.theta < 1.0)) throw ConfigError("estimate.theta: must lie in (0,1)");
  if (!(c.p >= 1.0)) throw ConfigError("estimate.p: must be >= 1");
  if (!(c.q >= 1.0)) throw ConfigError("estimate.q: must be >= 1");
  if (c.j_lo < 0 || c.j_hi < c.j_lo) throw ConfigError("estimate.j_range: empty or negative range");
  if (c.family.trials < 1) throw ConfigError("estimate.trials: must be >= 1");
  if (!(1.0 <= c.bump.inner && c.bump.inner < c.bump.outer && c.bump.outer <= 2.0))
    throw ConfigError("bump: need 1 <= inner < outer <= 2");
}

/// Parses and validates a config document; `text` is used only for diagnostics.
inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON at " + detail::line_col(text, e.byte) + ": " + e.what());
  }
  RunConfig c;
  c.raw = j;
  detail::Reader root(j, "");
  c.experiment = root.require<std::string>("experiment");
  if (auto g = root.child("geometry")) {
    c.n = g->get("n", c.n);
    c.d = g->get("d", c.d);
    c.kmax = g->get("kmax", c.kmax);
    c.N = g->get("N", c.N);
    g->finish();
  }
  if (auto b = root.child("bump")) {
    c.bump.inner = b->get("inner", c.bump.inner);
    c.bump.outer = b->get("outer", c.bump.outer);
    b->finish();
  }
  if (auto s = root.child("symbol")) {
    c.symbol.name = s->require<std::string>("name");
    if (s->has("params")) c.symbol.params = s->raw("params");
    if (!c.symbol.params.is_object()) throw ConfigError("symbol.params: expected an object");
    s->finish();
  }
  if (auto g = root.child("norm_geometry")) {
    c.norm_geom.kmax = g->get("kmax", c.norm_geom.kmax);
    c.norm_geom.N = g->get("N", c.norm_geom.N);
    g->finish();
    if (c.norm_geom.N < 2 * c.norm_geom.kmax + 1) throw ConfigError("norm_geometry.N: N >= 2 Kmax + 1 required");
  }
  if (auto e = root.child("estimate")) {
    if (e->has("j_range")) {
      const auto& jr = e->raw("j_range");
      if (!jr.is_array() || jr.size() != 2 || !jr[0].is_number_integer() || !jr[1].is_number_integer())
        throw ConfigError("estimate.j_range: expected [j_lo, j_hi]");
      c.j_lo = jr[0].get<int>();
      c.j_hi = jr[1].get<int>();
    }
    c.theta = e->get("theta", c.theta);
    c.s = e->get("s", c.s);
    c.p = e->get_extended("p", c.p);
    c.q = e->get_extended("q", c.q);
    c.family.trials = e->get("trials", c.family.trials);
    c.family.seed = e->get<std::uint64_t>("seed", c.family.seed);
    c.family.envelope = detail::parse_envelope(e->get<std::string>("envelope", "flat"), e->field("envelope"));
    c.family.sigma = e->get("sigma", c.family.sigma);
    c.family.real_valued = e->get("real_valued", c.family.real_valued);
    c.rho_check = e->get("rho_check", c.rho_check);
    c.growth_factor = e->get("growth_factor", c.growth_factor);
    c.slope_tolerance = e->get("slope_tolerance", c.slope_tolerance);
    c.stability_factor = e->get("stability_factor", c.stability_factor);
    c.equivalence_bound = e->get("equivalence_bound", c.equivalence_bound);
    e->finish();
  }
  if (auto o = root.child("output")) {
    c.out_dir = o->get<std::string>("dir", c.out_dir);
    c.stem = o->get<std::string>("stem", c.stem);
    o->finish();
  }
  root.finish();
  validate(c);
  if (c.stem.empty()) c.stem = c.experiment;
  return c;
}

// ---------------------------------------------------------------------------
// Experiments

inline void add_geometry(EstimateReport& rep, const RunConfig& c, int N) {
  rep.param("Kmax", c.kmax);
  if (N > 0) rep.param("N", N);
  rep.param("seed", static_cast<double>(c.family.seed));
  rep.param("bump_inner", c.bump.inner);
  rep.param("bump_outer", c.bump.outer);
}

inline int resolved_N(const RunConfig& c, const Symbol& a) {
  const int need = margin_points(c.kmax, a);
  return c.N > 0 ? c.N : need;
}

inline EstimateReport run_check_dyadic(const RunConfig& c) {
  const FrequencyLattice L(c.n, c.kmax);
  const auto D = DyadicDecomposition::build(L, c.bump);
  const int rho = c.rho_check >= 0 ? c.rho_check : c.n + 1;
  const auto dr = verify_dyadic(D, rho, c.growth_factor);
  EstimateReport rep;
  rep.experiment = "check-dyadic";
  rep.param("n", c.n);
  rep.param("jmax", D.jmax());
  rep.param("rho_check", rho);
  rep.param("growth_factor", c.growth_factor);
  add_geometry(rep, c, 0);
  rep.verdicts.push_back({"support", dr.support_ok, 0.0, 0.0, "supp phi_j inside the dyadic shells"});
  rep.verdicts.push_back({"range", dr.range_ok, 0.0, 0.0, "0 <= phi_j <= 1"});
  rep.verdicts.push_back({"partition", dr.partition_ok, dr.partition_error, 1e-12, "max |sum_j phi_j - 1|"});
  rep.verdicts.push_back({"overlap", dr.overlap_ok, 0.0, 3.0, "at most three consecutive active blocks"});
  double worst = 0.0;
  for (const auto& b : dr.bounds) {
    std::string tag = "c_alpha[";
    for (std::size_t i = 0; i < b.alpha.size(); ++i) tag += (i ? "," : "") + std::to_string(b.alpha[i]);
    tag += "]";
    for (std::size_t j = 0; j < b.per_j.size(); ++j) rep.point(tag, j, b.per_j[j]);
    rep.param(tag + "_j0", b.c_alpha_j0);
    worst = std::max(worst, b.window_ratio);
  }
  rep.verdicts.push_back({"difference_bounds_uniform", dr.bounds_ok, worst, c.growth_factor,
                          "worst two-window ratio of per-block difference constants"});
  if (!dr.first_failure.empty()) rep.notes.push_back(dr.first_failure);
  return rep;
}

inline EstimateReport run_kernel_bound(const RunConfig& c) {
  const Symbol a = make_symbol(c.symbol, c.n, c.d);
  const int N = c.N > 0 ? c.N : 2 * c.kmax + 1;
  auto rep = kernel_bound_experiment(a, c.bump, c.j_lo, c.j_hi, c.theta, TorusGrid(c.n, N), c.norm_geom,
                                     c.growth_factor);
  add_geometry(rep, c, N);
  return rep;
}

struct ExperimentSetting {
  TorusGrid grid;
  FrequencyLattice lattice;
  DyadicDecomposition D;
};

inline ExperimentSetting setting_for(const RunConfig& c, const Symbol& a) {
  const TorusGrid grid(c.n, resolved_N(c, a));
  return {grid, FrequencyLattice(c.n, c.kmax), DyadicDecomposition::build(full_lattice(grid), c.bump)};
}

inline EstimateReport run_block_estimate(const RunConfig& c) {
  const Symbol a = make_symbol(c.symbol, c.n, c.d);
  const auto st = setting_for(c, a);
  const auto family = random_family(c.family, st.lattice, st.grid, c.d, st.D);
  auto rep = block_estimate_experiment(SampledSymbol(a, st.grid, st.lattice), st.D, family, c.p, c.j_lo, c.j_hi,
                                       c.growth_factor);
  rep.label("symbol", a.name);
  rep.label("envelope", to_string(c.family.envelope));
  add_geometry(rep, c, st.grid.points_per_axis());
  return rep;
}

inline EstimateReport run_commutator_decay(const RunConfig& c) {
  const Symbol a = make_symbol(c.symbol, c.n, c.d);
  const auto st = setting_for(c, a);
  const auto family = random_family(c.family, st.lattice, st.grid, c.d, st.D);
  auto rep = commutator_decay_experiment(SampledSymbol(a, st.grid, st.lattice), a, st.D, family, c.p, c.j_lo,
                                         c.j_hi, c.slope_tolerance);
  rep.label("envelope", to_string(c.family.envelope));
  add_geometry(rep, c, st.grid.points_per_axis());
  return rep;
}

inline EstimateReport run_opnorm(const RunConfig& c) {
  const Symbol a = make_symbol(c.symbol, c.n, c.d);
  if (!(c.s > 0.0 && c.s < a.r))
    throw ConfigError("estimate.s: hypothesis 0 < s < r violated (s=" + std::to_string(c.s) +
                      ", r=" + std::to_string(a.r) + ")");
  OpNormSetup setup;
  setup.s = c.s;
  setup.p = c.p;
  setup.q = c.q;
  setup.kmax = c.kmax;
  setup.N = c.N;
  setup.family = c.family;
  setup.bump = c.bump;
  setup.norm_geom = c.norm_geom;
  setup.stability_factor = c.stability_factor;
  auto rep = operator_norm_experiment(a, setup);
  add_geometry(rep, c, 0);
  return rep;
}

/// Besov norms of a random family in the block and derivative forms.
inline EstimateReport run_besov_norm(const RunConfig& c) {
  const TorusGrid grid(c.n, c.N > 0 ? c.N : 2 * c.kmax + 1);
  const FrequencyLattice L(c.n, c.kmax);
  const auto D = DyadicDecomposition::build(full_lattice(grid), c.bump);
  const auto family = random_family(c.family, L, grid, c.d, D);
  EstimateReport rep;
  rep.experiment = "besov-norm";
  rep.param("s", c.s);
  rep.param("p", c.p);
  rep.param("q", c.q);
  rep.param("equivalence_bound", c.equivalence_bound);
  rep.label("envelope", to_string(c.family.envelope));
  add_geometry(rep, c, grid.points_per_axis());
  const double s1 = c.s - std::floor(c.s);
  const bool derivative_form = c.s > 0.0 && s1 > 0.0;
  double lo = infinity, hi = 0.0;
  bool finite = true;
  for (std::size_t t = 0; t < family.size(); ++t) {
    const double b = besov_norm(family[t], D, {c.s, c.p, c.q}).norm;
    finite = finite && std::isfinite(b);
    rep.point("besov_norm", t, b);
    if (derivative_form && b > guard_denominator()) {
      const double ratio = besov_norm_derivative_form(family[t], D, {c.s, c.p, c.q}) / b;
      rep.point("derivative_form_ratio", t, ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  rep.verdicts.push_back({"finite", finite, 0.0, 0.0, "every block-form norm finite"});
  if (derivative_form) {
    const double C = c.equivalence_bound;
    rep.param("ratio_min", lo);
    rep.param("ratio_max", hi);
    rep.verdicts.push_back({"derivative_form_equivalence", lo >= 1.0 / C && hi <= C, std::max(hi, 1.0 / lo), C,
                            "derivative-form / block-form ratio inside [1/C, C]"});
  }
  return rep;
}

inline EstimateReport run_young(const RunConfig& c) {
  auto rep = young_trials(c.family.trials, c.p, c.family.seed);
  return rep;
}

/// Exact identities on a small n = 1 geometry.
inline EstimateReport selftest_report(std::uint64_t seed = 7) {
  EstimateReport rep;
  rep.experiment = "selftest";
  const int K = 8;
  const TorusGrid grid(1, 2 * (K + 1) + 1);
  const FrequencyLattice L(1, K);
  const auto D = DyadicDecomposition::build(L, {});
  std::mt19937_64 rng(seed);
  const GridFunction f = inverse_transform(random_coeffs(L, 1, rng, false), grid);
  auto exact = [&rep](const std::string& name, double err, double tol, const std::string& what) {
    rep.verdicts.push_back({name, err <= tol, err, tol, what});
  };

  const Symbol id = zoo::identity(1, 1);
  const Symbol cosine = zoo::cosine_multiplication(1, 1);
  exact("identity", max_difference(apply_op(id, f, L), f), 1e-10, "op[id] f = f");

  GridFunction bf = f;
  std::vector<double> x(1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    bf.at(i)[0] *= std::cos(x[0]);
  }
  const GridFunction af = apply_op(cosine, f, L);
  exact("multiplication", max_difference(af, bf), 1e-10, "op[b id] f = b f");

  GridFunction blocks(grid, 1);
  double kernel_err = 0.0;
  for (int j = 0; j <= D.jmax(); ++j) {
    const GridFunction bj = apply_block(cosine, f, D, j);
    blocks += bj;
    kernel_err = std::max(kernel_err, max_difference(apply_via_kernel(kernel_block(cosine, D, j, grid), f), bj));
  }
  exact("block_sum", max_difference(blocks, af), 1e-10, "sum_j op[a] op[phi_j] f = op[a] f");
  exact("kernel_path", kernel_err, 1e-10, "kernel quadrature = frequency path, every block");
  exact("linearity", linearity_in_symbol_check(cosine, zoo::bracket_power(1, 1, -1.0), f, L), 1e-12,
        "op[a1 + a2] f = op[a1] f + op[a2] f");

  double comm = 0.0;
  for (int j = 0; j <= D.jmax(); ++j)
    comm = std::max(comm, max_norm(commutator_block(zoo::bracket_power(1, 1, 1.0), f, D, j, true)));
  exact("x_independent_commutation", comm, 1e-10, "[op[phi_j], op[<k>]] = 0");

  const auto Dfull = DyadicDecomposition::build(full_lattice(grid), {});
  GridFunction constant(grid, 1);
  for (auto& v : constant.values) v = cplx(-2.5, 0.0);
  double besov_err = 0.0;
  for (double s : {-1.0, 0.5, 2.0})
    for (double pq : {1.0, 2.0, infinity})
      besov_err = std::max(besov_err, std::abs(besov_norm(constant, Dfull, {s, pq, pq}).norm - 2.5));
  exact("besov_constant", besov_err, 1e-12, "|c|_{B^s_pq} = |c|");

  const auto dr = verify_dyadic(D, 2);
  rep.verdicts.push_back({"dyadic_partition", dr.support_ok && dr.range_ok && dr.partition_ok && dr.overlap_ok,
                          dr.partition_error, 1e-12, "support, range, partition, overlap"});

  OpNormSetup setup;
  setup.kmax = K;
  setup.family.trials = 3;
  setup.family.seed = seed;
  const double Q = empirical_operator_norm(id, setup, K, 2 * K + 1);
  exact("identity_Q", std::abs(Q - 1.0), 1e-12, "empirical operator norm of op[id] is 1");
  return rep;
}

inline EstimateReport run_experiment(const RunConfig& c) {
  if (c.experiment == "check-dyadic") return run_check_dyadic(c);
  if (c.experiment == "kernel-bound") return run_kernel_bound(c);
  if (c.experiment == "block-estimate") return run_block_estimate(c);
  if (c.experiment == "commutator-decay") return run_commutator_decay(c);
  if (c.experiment == "opnorm") return run_opnorm(c);
  if (c.experiment == "besov-norm") return run_besov_norm(c);
  if (c.experiment == "young") return run_young(c);
  return selftest_report(c.family.seed);
}

// ---------------------------------------------------------------------------
// Output

inline void print_summary(std::ostream& os, const EstimateReport& rep) {
  os << "experiment: " << rep.experiment << '\n';
  for (const auto& [k, v] : rep.labels) os << "  " << k << " = " << v << '\n';
  for (const auto& f : rep.fits)
    os << "  fit " << f.name << ": slope " << f.slope << ", intercept " << f.intercept << ", residual "
       << f.residual << " (" << f.points << " points)\n";
  os << "  " << std::left << std::setw(30) << "verdict" << std::setw(8) << "result" << std::setw(16) << "measured"
     << "threshold\n";
  for (const auto& v : rep.verdicts)
    os << "  " << std::left << std::setw(30) << v.name << std::setw(8) << (v.pass ? "PASS" : "FAIL")
       << std::setw(16) << v.measured << v.threshold << '\n';
  for (const auto& n : rep.notes) os << "  note: " << n << '\n';
}

struct RunOutputs {
  std::filesystem::path json;
  std::filesystem::path csv;
};

inline RunOutputs write_outputs(const EstimateReport& rep, const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunOutputs out{dir / (c.stem + ".json"), dir / (c.stem + ".csv")};
  nlohmann::json j = to_json(rep);
  j["config"] = c.raw;
  std::ofstream(out.json) << j.dump(2) << '\n';
  std::ofstream csv(out.csv);
  write_csv(csv, rep);
  return out;
}

/// Environment variable that overrides the output directory of every run.
inline constexpr const char* out_dir_env = "TORPSIDO_OUT_DIR";

inline std::filesystem::path output_dir(const RunConfig& c, const std::string& flag) {
  if (const char* env = std::getenv(out_dir_env); env && *env) return env;
  if (!flag.empty()) return flag;
  return c.out_dir;
}

/// Full `run` subcommand: parse, execute, write artifacts, summarize.
inline int run(const std::string& config_path, const std::string& out_flag, bool verbose, std::ostream& os,
               std::ostream& err) {
  std::ifstream in(config_path);
  if (!in) {
    err << "error: cannot open config '" << config_path << "'\n";
    return usage_error;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig c;
  EstimateReport rep;
  try {
    c = parse_config(buf.str());
    const auto t0 = std::chrono::steady_clock::now();
    rep = run_experiment(c);
    if (verbose)
      os << "elapsed: "
         << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return usage_error;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return usage_error;
  } catch (const std::length_error& e) {
    err << "resource limit: " << e.what() << '\n';
    return usage_error;
  }
  const auto paths = write_outputs(rep, c, output_dir(c, out_flag));
  print_summary(os, rep);
  os << "report: " << paths.json.string() << "\nseries: " << paths.csv.string() << '\n';
  return rep.all_pass() ? ok : verdict_failed;
}

inline int selftest(std::ostream& os) {
  const auto rep = selftest_report();
  print_summary(os, rep);
  return rep.all_pass() ? ok : verdict_failed;
}

}  // namespace torpsido::cli
