#pragma once

#include <array>
#include <cassert>
#include <utility>
#include <vector>

#include "hetsol/scalar.hpp"

namespace hetsol {

inline constexpr int kMaxJetOrder = 4;

using MultiIndex = std::array<int, 3>;

// Graded enumeration of multi-indices with |alpha| <= kMaxJetOrder. A jet of
// order n uses exactly the first count(n) entries.
class MultiIndexTable {
 public:
  static const MultiIndexTable& get();

  static constexpr int count(int order) { return (order + 1) * (order + 2) * (order + 3) / 6; }
  const MultiIndex& at(int idx) const { return indices_[idx]; }
  int index(const MultiIndex& a) const {
    if (a[0] < 0 || a[1] < 0 || a[2] < 0) return -1;
    if (a[0] + a[1] + a[2] > kMaxJetOrder) return -1;
    return lookup_[a[0]][a[1]][a[2]];
  }
  // All (i, j) with at(i) + at(j) == at(k).
  const std::vector<std::pair<int, int>>& splittings(int k) const { return splits_[k]; }

 private:
  MultiIndexTable();
  std::vector<MultiIndex> indices_;
  int lookup_[kMaxJetOrder + 1][kMaxJetOrder + 1][kMaxJetOrder + 1];
  std::vector<std::vector<std::pair<int, int>>> splits_;
};

inline MultiIndexTable::MultiIndexTable() {
  for (auto& a : lookup_)
    for (auto& b : a)
      for (auto& c : b) c = -1;
  for (int deg = 0; deg <= kMaxJetOrder; ++deg)
    for (int i = deg; i >= 0; --i)
      for (int j = deg - i; j >= 0; --j) {
        int k = deg - i - j;
        lookup_[i][j][k] = static_cast<int>(indices_.size());
        indices_.push_back({i, j, k});
      }
  splits_.resize(indices_.size());
  for (int a = 0; a < static_cast<int>(indices_.size()); ++a)
    for (int b = 0; b < static_cast<int>(indices_.size()); ++b) {
      MultiIndex s{indices_[a][0] + indices_[b][0], indices_[a][1] + indices_[b][1],
                   indices_[a][2] + indices_[b][2]};
      int k = index(s);
      if (k >= 0) splits_[k].emplace_back(a, b);
    }
}

inline const MultiIndexTable& MultiIndexTable::get() {
  static const MultiIndexTable table;
  return table;
}

// Truncated multivariate Taylor expansion around a point: coefficient c_alpha
// multiplies (x - p)^alpha. Arithmetic truncates to the smaller operand order.
template <class T>
class Jet {
 public:
  Jet() : order_(0), c_(1, T(0)) {}
  Jet(int order, T value) : order_(order), c_(MultiIndexTable::count(order), T(0)) {
    assert(order >= 0 && order <= kMaxJetOrder);
    c_[0] = std::move(value);
  }

  // The coordinate function x_axis expanded around `at`.
  static Jet coordinate(int order, int axis, const T& at) {
    Jet j(order, at);
    if (order >= 1) j.c_[1 + axis] = T(1);
    return j;
  }

  int order() const { return order_; }
  int size() const { return static_cast<int>(c_.size()); }
  const T& value() const { return c_[0]; }
  const T& coeff(int idx) const { return c_[idx]; }
  T& coeff(int idx) { return c_[idx]; }

  // d^alpha f at the expansion point (alpha! * c_alpha).
  T partial(const MultiIndex& alpha) const {
    int idx = MultiIndexTable::get().index(alpha);
    assert(idx >= 0 && idx < size());
    long fact = 1;
    for (int a : alpha)
      for (int m = 2; m <= a; ++m) fact *= m;
    return T(c_[idx] * cast<T>(fact));
  }

  Jet derivative(int axis) const {
    assert(order_ >= 1);
    const auto& tab = MultiIndexTable::get();
    Jet out(order_ - 1, T(0));
    for (int i = 0; i < out.size(); ++i) {
      MultiIndex a = tab.at(i);
      int mult = a[axis] + 1;
      a[axis] += 1;
      out.c_[i] = T(c_[tab.index(a)] * cast<T>(mult));
    }
    return out;
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet out(order, T(0));
    for (int i = 0; i < out.size(); ++i) out.c_[i] = c_[i];
    return out;
  }

  Jet reciprocal() const {
    if (sign_of(c_[0]) == 0) throw Error(ErrorKind::PoleAtPoint, "reciprocal of a vanishing jet");
    const auto& tab = MultiIndexTable::get();
    Jet r(order_, T(T(1) / c_[0]));
    T inv0 = r.c_[0];
    for (int k = 1; k < size(); ++k) {
      T acc(0);
      for (auto [a, b] : tab.splittings(k)) {
        if (b == k) continue;
        acc += c_[a] * r.c_[b];
      }
      r.c_[k] = T(-acc * inv0);
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    shrink_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    shrink_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.c_) x = T(-x);
    return a;
  }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const auto& tab = MultiIndexTable::get();
    Jet out(std::min(a.order_, b.order_), T(0));
    for (int k = 0; k < out.size(); ++k) {
      T acc(0);
      for (auto [i, j] : tab.splittings(k)) acc += a.c_[i] * b.c_[j];
      out.c_[k] = std::move(acc);
    }
    return out;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

 private:
  void shrink_to(int order) {
    if (order < order_) {
      order_ = order;
      c_.resize(MultiIndexTable::count(order));
    }
  }

  int order_;
  std::vector<T> c_;
};

}  // namespace hetsol
