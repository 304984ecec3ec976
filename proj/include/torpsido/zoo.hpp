#pragma once

// Built-in symbols. Every constructor supplies closed-form x-derivatives.

#include "torpsido/symbol.hpp"

namespace torpsido::zoo {

namespace detail {

inline void fill_identity(std::span<cplx> out, int d, cplx diag) {
  std::fill(out.begin(), out.end(), cplx(0.0));
  for (int i = 0; i < d; ++i) out[i * d + i] = diag;
}

inline bool has_x_derivative(std::span<const int> beta) {
  for (int b : beta)
    if (b != 0) return true;
  return false;
}

/// d^b/dt^b cos(w t) = w^b cos(w t + b pi / 2)
inline double cos_derivative(double w, double t, int b) {
  return std::pow(w, b) * std::cos(w * t + b * pi / 2.0);
}

inline int default_rho(int n) { return n + 1; }

inline void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace detail

/// a(x, k) = id
inline Symbol identity(int n, int d, double r = 1.0) {
  detail::require(n >= 1 && d >= 1, "identity: invalid dimensions");
  Symbol s;
  s.name = "identity";
  s.n = n;
  s.d = d;
  s.m = 0.0;
  s.r = r;
  s.rho = detail::default_rho(n);
  s.x_independent = true;
  s.k_independent = true;
  s.x_bandwidth = 0;
  s.eval = [d](auto, auto, std::span<const int> beta, std::span<cplx> out) {
    detail::fill_identity(out, d, detail::has_x_derivative(beta) ? 0.0 : 1.0);
  };
  return s;
}

/// a(x, k) = 0
inline Symbol zero(int n, int d) {
  Symbol s = identity(n, d);
  s.name = "zero";
  s.eval = [](auto, auto, auto, std::span<cplx> out) { std::fill(out.begin(), out.end(), cplx(0.0)); };
  return s;
}

/// a(k) = <k>^m id
inline Symbol bracket_power(int n, int d, double m, double r = 1.0) {
  detail::require(n >= 1 && d >= 1, "bracket: invalid dimensions");
  Symbol s;
  s.name = "bracket";
  s.n = n;
  s.d = d;
  s.m = m;
  s.r = r;
  s.rho = detail::default_rho(n);
  s.x_independent = true;
  s.x_bandwidth = 0;
  s.eval = [d, m](auto, std::span<const int> k, std::span<const int> beta, std::span<cplx> out) {
    detail::fill_identity(out, d, detail::has_x_derivative(beta) ? 0.0 : std::pow(bracket(k), m));
  };
  return s;
}

/// a(k) = i k_axis id  (order 1)
inline Symbol derivative(int n, int d, int axis = 0, double r = 1.0) {
  detail::require(n >= 1 && d >= 1, "derivative: invalid dimensions");
  detail::require(axis >= 0 && axis < n, "derivative: axis out of range");
  Symbol s;
  s.name = "derivative";
  s.n = n;
  s.d = d;
  s.m = 1.0;
  s.r = r;
  s.rho = detail::default_rho(n);
  s.x_independent = true;
  s.x_bandwidth = 0;
  s.eval = [d, axis](auto, std::span<const int> k, std::span<const int> beta, std::span<cplx> out) {
    detail::fill_identity(out, d, detail::has_x_derivative(beta) ? cplx(0.0) : cplx(0.0, k[axis]));
  };
  return s;
}

/// Scalar function b(x) with its derivatives: b(x, beta).
using ScalarField = std::function<double(std::span<const double>, std::span<const int>)>;

/**
 * Multiplication operator a(x, k) = b(x) <k>^m id. With m = 0, op[a]f = b f.
 * `bandwidth` is the ell-infinity degree of b when it is a trigonometric
 * polynomial, -1 otherwise.
 */
inline Symbol multiplication(int n, int d, ScalarField b, double r, int bandwidth = -1,
                             double m = 0.0, std::string name = "multiplication") {
  detail::require(n >= 1 && d >= 1, "multiplication: invalid dimensions");
  detail::require(static_cast<bool>(b), "multiplication: missing field");
  Symbol s;
  s.name = std::move(name);
  s.n = n;
  s.d = d;
  s.m = m;
  s.r = r;
  s.rho = detail::default_rho(n);
  s.k_independent = (m == 0.0);
  s.x_bandwidth = bandwidth;
  s.eval = [d, m, b = std::move(b)](std::span<const double> x, std::span<const int> k,
                                    std::span<const int> beta, std::span<cplx> out) {
    const double w = (m == 0.0) ? 1.0 : std::pow(bracket(k), m);
    detail::fill_identity(out, d, b(x, beta) * w);
  };
  return s;
}

/// b(x) = cos(x_1)
inline ScalarField cosine_field() {
  return [](std::span<const double> x, std::span<const int> beta) {
    for (std::size_t i = 1; i < beta.size(); ++i)
      if (beta[i] != 0) return 0.0;
    return detail::cos_derivative(1.0, x[0], beta[0]);
  };
}

inline Symbol cosine_multiplication(int n, int d, double m = 0.0, double r = 2.0) {
  return multiplication(n, d, cosine_field(), r, 1, m, "cosine");
}

/// Weierstrass-type b_r(x) = sum_{j=0..J} 2^{-j r} cos(2^j x_1), Hoelder of order r.
inline ScalarField weierstrass_field(double r, int J) {
  return [r, J](std::span<const double> x, std::span<const int> beta) {
    for (std::size_t i = 1; i < beta.size(); ++i)
      if (beta[i] != 0) return 0.0;
    double s = 0.0;
    for (int j = 0; j <= J; ++j) s += std::pow(2.0, -j * r) *
                                      detail::cos_derivative(std::ldexp(1.0, j), x[0], beta[0]);
    return s;
  };
}

inline Symbol weierstrass(int n, int d, double r, int J, double m = 0.0) {
  detail::require(r > 0.0 && r < 1.0, "weierstrass: r must lie in (0,1)");
  detail::require(J >= 0 && J < 30, "weierstrass: J out of range");
  return multiplication(n, d, weierstrass_field(r, J), r, 1 << J, m, "weierstrass");
}

/**
 * a(x, k) = R(x_1) diag(<k>^m, <k>^m2) R(x_1)^{-1}, d = 2, R a rotation.
 * Values at different x do not commute.
 *
 * With c = cos 2x_1, s = sin 2x_1:
 *   a = (l1 + l2)/2 I + (l1 - l2)/2 [[c, s], [s, -c]].
 */
inline Symbol rotation(int n, double m, double m2 = 0.0, double r = 1.0) {
  detail::require(n >= 1, "rotation: invalid dimension");
  Symbol s;
  s.name = "rotation";
  s.n = n;
  s.d = 2;
  s.m = std::max(m, m2);
  s.r = r;
  s.rho = detail::default_rho(n);
  s.x_bandwidth = 2;
  s.eval = [m, m2](std::span<const double> x, std::span<const int> k, std::span<const int> beta,
                   std::span<cplx> out) {
    for (std::size_t i = 1; i < beta.size(); ++i)
      if (beta[i] != 0) {
        std::fill(out.begin(), out.end(), cplx(0.0));
        return;
      }
    const int b = beta[0];
    const double br = bracket(k);
    const double l1 = std::pow(br, m);
    const double l2 = std::pow(br, m2);
    const double mean = (b == 0) ? 0.5 * (l1 + l2) : 0.0;
    const double half = 0.5 * (l1 - l2);
    const double c = detail::cos_derivative(2.0, x[0], b);
    const double sn = detail::cos_derivative(2.0, x[0] - pi / 4.0, b);  // sin(2t) = cos(2t - pi/2)
    out[0] = mean + half * c;
    out[1] = half * sn;
    out[2] = half * sn;
    out[3] = mean - half * c;
  };
  return s;
}

}  // namespace torpsido::zoo
