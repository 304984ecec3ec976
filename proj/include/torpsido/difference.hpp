#pragma once

// Tabulated maps Z^n -> C^{comps} on axis-aligned boxes and the forward
// differences Delta_{k_j} a(k) = a(k + e_j) - a(k) acting on them.

#include <functional>

#include "torpsido/core.hpp"

namespace torpsido {

/// Axis-aligned integer box [lo_i, hi_i] in Z^n (inclusive).
struct LatticeBox {
  std::vector<int> lo;
  std::vector<int> hi;

  static LatticeBox cube(int n, int lo, int hi) { return {std::vector<int>(n, lo), std::vector<int>(n, hi)}; }

  int dim() const { return static_cast<int>(lo.size()); }
  int extent(int i) const { return hi[i] - lo[i] + 1; }

  bool empty() const {
    for (int i = 0; i < dim(); ++i)
      if (hi[i] < lo[i]) return true;
    return false;
  }

  std::size_t size() const {
    if (empty()) return 0;
    std::size_t s = 1;
    for (int i = 0; i < dim(); ++i) s *= static_cast<std::size_t>(extent(i));
    return s;
  }

  bool contains(std::span<const int> k) const {
    for (int i = 0; i < dim(); ++i)
      if (k[i] < lo[i] || k[i] > hi[i]) return false;
    return true;
  }

  bool contains(const LatticeBox& o) const {
    for (int i = 0; i < dim(); ++i)
      if (o.lo[i] < lo[i] || o.hi[i] > hi[i]) return false;
    return true;
  }

  std::size_t index_of(std::span<const int> k) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * extent(i) + static_cast<std::size_t>(k[i] - lo[i]);
    return idx;
  }

  void point(std::size_t idx, std::span<int> k) const {
    for (int i = dim() - 1; i >= 0; --i) {
      k[i] = lo[i] + static_cast<int>(idx % extent(i));
      idx /= extent(i);
    }
  }
};

/// Values of a map k -> T^{comps} on a box.
template <typename T>
struct LatticeTable {
  LatticeBox box;
  int comps = 1;
  std::vector<T> data;

  LatticeTable() = default;
  LatticeTable(LatticeBox b, int c) : box(std::move(b)), comps(c), data(box.size() * c) {}

  static LatticeTable tabulate(LatticeBox b, int c,
                               const std::function<void(std::span<const int>, std::span<T>)>& fn) {
    LatticeTable t(std::move(b), c);
    std::vector<int> k(t.box.dim());
    for (std::size_t i = 0; i < t.box.size(); ++i) {
      t.box.point(i, k);
      fn(k, std::span<T>(t.data).subspan(i * c, c));
    }
    return t;
  }

  std::span<const T> at(std::span<const int> k) const {
    if (!box.contains(k)) throw std::out_of_range("LatticeTable: insufficient table margin");
    return std::span<const T>(data).subspan(box.index_of(k) * comps, comps);
  }
  std::span<T> at(std::span<const int> k) {
    if (!box.contains(k)) throw std::out_of_range("LatticeTable: insufficient table margin");
    return std::span<T>(data).subspan(box.index_of(k) * comps, comps);
  }
};

/// Single forward difference along `axis`; the box shrinks by one at the top.
template <typename T>
LatticeTable<T> forward_difference(const LatticeTable<T>& f, int axis) {
  LatticeBox out_box = f.box;
  out_box.hi[axis] -= 1;
  if (out_box.empty()) throw std::out_of_range("discrete_difference: insufficient table margin");
  LatticeTable<T> out(out_box, f.comps);
  std::vector<int> k(out_box.dim());
  for (std::size_t i = 0; i < out_box.size(); ++i) {
    out_box.point(i, k);
    const std::size_t base = f.box.index_of(k);
    k[axis] += 1;
    const std::size_t next = f.box.index_of(k);
    for (int c = 0; c < f.comps; ++c)
      out.data[i * f.comps + c] = f.data[next * f.comps + c] - f.data[base * f.comps + c];
  }
  return out;
}

/// Delta^alpha_k f on the largest box where it is defined.
template <typename T>
LatticeTable<T> discrete_difference(const LatticeTable<T>& f, std::span<const int> alpha) {
  if (static_cast<int>(alpha.size()) != f.box.dim())
    throw std::invalid_argument("discrete_difference: multi-index dimension mismatch");
  LatticeTable<T> cur = f;
  for (int axis = 0; axis < f.box.dim(); ++axis)
    for (int t = 0; t < alpha[axis]; ++t) cur = forward_difference(cur, axis);
  return cur;
}

/// Delta^alpha_k f required on `need`; throws if the table margin is too small.
template <typename T>
LatticeTable<T> discrete_difference(const LatticeTable<T>& f, std::span<const int> alpha,
                                    const LatticeBox& need) {
  auto out = discrete_difference(f, alpha);
  if (!out.box.contains(need)) throw std::out_of_range("discrete_difference: insufficient table margin");
  return out;
}

}  // namespace torpsido
