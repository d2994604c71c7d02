#pragma once

// Pointwise tensor algebra in dimension three.
//
// Conventions (fixed once, used everywhere):
//   * Components are taken in a basis {e1, e2, e3} (coordinate or frame) whose
//     Gram matrix is the Metric3 passed to each operation.
//   * R(v1, v2, v3, v4) := g(R_{v1,v2} v3, v4), R_{X,Y} = [nabla_X, nabla_Y] - nabla_[X,Y].
//   * Ric(v1, v2) = sum_i R(e_i, v1, v2, e_i) over a g-orthonormal frame, i.e.
//     Ric_jk = g^{il} R_ijkl in a general basis; s = tr_g Ric.
//   * Kulkarni-Nomizu: (A o B)(1,2,3,4) = A13 B24 + A24 B13 - A14 B23 - A23 B14.
//   * 2-forms are stored by their values on the bivectors
//     {e2^e3, e3^e1, e1^e2}; (x ^ y)(a, b) = x(a) y(b) - x(b) y(a).
// With these choices the round sphere has R(e1,e2,e2,e1) = +1, Ric = 2g.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <utility>

#include "hetsol/scalar.hpp"

namespace hetsol {

template <class T>
using Vec3 = std::array<T, 3>;

template <class T>
Vec3<T> zero_vec() {
  return {T(0), T(0), T(0)};
}

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return T(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
}

template <class T>
struct Mat3 {
  std::array<std::array<T, 3>, 3> a{};

  static Mat3 zero() {
    Mat3 m;
    for (auto& r : m.a) r.fill(T(0));
    return m;
  }
  static Mat3 identity() {
    Mat3 m = zero();
    for (int i = 0; i < 3; ++i) m.a[i][i] = T(1);
    return m;
  }
  T& operator()(int i, int j) { return a[i][j]; }
  const T& operator()(int i, int j) const { return a[i][j]; }

  friend Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 z = zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) z.a[i][j] += x.a[i][k] * y.a[k][j];
    return z;
  }
  Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.a[i][j] = a[j][i];
    return t;
  }
  Vec3<T> apply(const Vec3<T>& v) const {
    Vec3<T> out = zero_vec<T>();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i] += a[i][j] * v[j];
    return out;
  }
  T det() const {
    return T(a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
             a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]));
  }
  Mat3 inverse() const {
    T d = det();
    if (sign_of(d) == 0) throw Error(ErrorKind::SingularMetric, "singular 3x3 matrix");
    Mat3 inv;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        inv.a[i][j] = T((a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d);
      }
    return inv;
  }
};

inline constexpr int sym_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i == 0 ? j : (i == 1 ? 2 + j : 5);
}

// Symmetric bilinear form; only the upper triangle is stored.
template <class T>
class Sym2 {
 public:
  Sym2() { c_.fill(T(0)); }
  explicit Sym2(const std::array<T, 6>& upper) : c_(upper) {}

  static Sym2 identity() {
    Sym2 s;
    s(0, 0) = T(1);
    s(1, 1) = T(1);
    s(2, 2) = T(1);
    return s;
  }
  static Sym2 diag(const T& a, const T& b, const T& c) {
    Sym2 s;
    s(0, 0) = a;
    s(1, 1) = b;
    s(2, 2) = c;
    return s;
  }
  static Sym2 from_matrix(const Mat3<T>& m) {
    Sym2 s;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) s(i, j) = m(i, j);
    return s;
  }
  static Sym2 outer(const Vec3<T>& u, const Vec3<T>& v) {
    Sym2 s;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) s(i, j) = T((u[i] * v[j] + u[j] * v[i]) / T(2));
    return s;
  }

  T& operator()(int i, int j) { return c_[sym_index(i, j)]; }
  const T& operator()(int i, int j) const { return c_[sym_index(i, j)]; }
  const std::array<T, 6>& upper() const { return c_; }

  Mat3<T> matrix() const {
    Mat3<T> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
  Vec3<T> apply(const Vec3<T>& v) const { return matrix().apply(v); }

  Sym2& operator+=(const Sym2& o) {
    for (int i = 0; i < 6; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Sym2& operator-=(const Sym2& o) {
    for (int i = 0; i < 6; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Sym2& operator*=(const T& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
  friend Sym2 operator*(const T& s, Sym2 a) { return a *= s; }
  friend Sym2 operator*(Sym2 a, const T& s) { return a *= s; }
  friend bool operator==(const Sym2& a, const Sym2& b) { return a.c_ == b.c_; }

 private:
  std::array<T, 6> c_;
};

// Positive-definite metric with cached inverse and determinant.
template <class T>
class Metric3 {
 public:
  explicit Metric3(const Sym2<T>& g) : g_(g) {
    const Mat3<T> m = g.matrix();
    T m1 = m(0, 0);
    T m2 = T(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    det_ = m.det();
    if (sign_of(m1) <= 0 || sign_of(m2) <= 0 || sign_of(det_) <= 0)
      throw Error(ErrorKind::SingularMetric, "metric is not positive definite");
    inv_ = Sym2<T>::from_matrix(m.inverse());
  }

  const Sym2<T>& g() const { return g_; }
  const Sym2<T>& inv() const { return inv_; }
  const T& det() const { return det_; }

  Vec3<T> lower(const Vec3<T>& v) const { return g_.apply(v); }
  Vec3<T> raise(const Vec3<T>& w) const { return inv_.apply(w); }

  T trace(const Sym2<T>& a) const {
    T t(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t += inv_(i, j) * a(i, j);
    return t;
  }
  T inner(const Sym2<T>& a, const Sym2<T>& b) const {
    // g^{ik} g^{jl} a_ij b_kl
    Mat3<T> ia = (inv_.matrix() * a.matrix());
    Mat3<T> ib = (inv_.matrix() * b.matrix());
    T t(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t += ia(i, j) * ib(j, i);
    return t;
  }
  T norm2_covector(const Vec3<T>& w) const { return dot(w, raise(w)); }
  // (a o b)(v1, v2) = g*(a(v1), b(v2)) = a_ik g^{kl} b_lj, symmetrized.
  Sym2<T> compose(const Sym2<T>& a, const Sym2<T>& b) const {
    Mat3<T> m = a.matrix() * inv_.matrix() * b.matrix();
    Sym2<T> out;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) out(i, j) = T((m(i, j) + m(j, i)) / T(2));
    return out;
  }

 private:
  Sym2<T> g_;
  Sym2<T> inv_;
  T det_;
};

// Bivector slot a <-> ordered index pair (i, j): 0 <-> (1,2), 1 <-> (2,0), 2 <-> (0,1).
inline constexpr std::array<std::array<int, 2>, 3> kPairs{{{1, 2}, {2, 0}, {0, 1}}};

// Returns (slot, sign) with e_i ^ e_j = sign * E_slot, or slot -1 when i == j.
inline constexpr std::pair<int, int> pair_slot(int i, int j) {
  if (i == j) return {-1, 0};
  for (int a = 0; a < 3; ++a) {
    if (kPairs[a][0] == i && kPairs[a][1] == j) return {a, 1};
    if (kPairs[a][0] == j && kPairs[a][1] == i) return {a, -1};
  }
  return {-1, 0};
}

template <class T>
using TwoForm = std::array<T, 3>;

template <class T>
TwoForm<T> wedge(const Vec3<T>& x, const Vec3<T>& y) {
  TwoForm<T> w;
  for (int a = 0; a < 3; ++a) {
    auto [i, j] = kPairs[a];
    w[a] = T(x[i] * y[j] - x[j] * y[i]);
  }
  return w;
}

// Algebraic curvature tensor stored as a symmetric operator on 2-forms:
// op(a, b) = R(E_a, E_b) with E_a the basis bivectors above.
template <class T>
class Curv3 {
 public:
  Curv3() = default;
  explicit Curv3(const Sym2<T>& op) : op_(op) {}

  const Sym2<T>& op() const { return op_; }
  Sym2<T>& op() { return op_; }

  T operator()(int i, int j, int k, int l) const {
    auto [a, sa] = pair_slot(i, j);
    auto [b, sb] = pair_slot(k, l);
    if (a < 0 || b < 0) return T(0);
    T v = op_(a, b);
    return sa * sb > 0 ? v : T(-v);
  }

  // The 2-form R_{v1,v2}, i.e. (a, b) -> R(v1, v2, a, b).
  TwoForm<T> act(const Vec3<T>& v1, const Vec3<T>& v2) const {
    TwoForm<T> biv = wedge(v1, v2);
    TwoForm<T> out{T(0), T(0), T(0)};
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a) out[b] += biv[a] * op_(a, b);
    return out;
  }

  friend Curv3 operator+(const Curv3& x, const Curv3& y) { return Curv3(x.op_ + y.op_); }
  friend Curv3 operator-(const Curv3& x, const Curv3& y) { return Curv3(x.op_ - y.op_); }
  friend Curv3 operator*(const T& s, const Curv3& x) { return Curv3(s * x.op_); }
  friend bool operator==(const Curv3& x, const Curv3& y) { return x.op_ == y.op_; }

 private:
  Sym2<T> op_;
};

// 27 components t[i][j][k].
template <class T>
struct Trilinear {
  std::array<T, 27> c;
  Trilinear() { c.fill(T(0)); }
  T& operator()(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  const T& operator()(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }
};

// ---------------------------------------------------------------------------

template <class T>
Curv3<T> kn_product(const Sym2<T>& A, const Sym2<T>& B) {
  Sym2<T> op;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      auto [v1, v2] = kPairs[a];
      auto [v3, v4] = kPairs[b];
      op(a, b) = T(A(v1, v3) * B(v2, v4) + A(v2, v4) * B(v1, v3) - A(v1, v4) * B(v2, v3) -
                   A(v2, v3) * B(v1, v4));
    }
  return Curv3<T>(op);
}

// -g o Ric + (s/4) g o g; valid for any symmetric `ric`.
template <class T>
Curv3<T> riemann_from_ricci(const Metric3<T>& g, const Sym2<T>& ric, const T& s) {
  Curv3<T> a = kn_product(g.g(), ric);
  Curv3<T> b = kn_product(g.g(), g.g());
  return T(s / T(4)) * b - a;
}

template <class T>
struct RicciScalar {
  Sym2<T> ric;
  T s;
};

template <class T>
RicciScalar<T> ricci_contract(const Curv3<T>& R, const Metric3<T>& g) {
  Sym2<T> ric;
  for (int j = 0; j < 3; ++j)
    for (int k = j; k < 3; ++k) {
      T acc(0);
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l)
          if (sign_of(g.inv()(i, l)) != 0) acc += g.inv()(i, l) * R(i, j, k, l);
      ric(j, k) = acc;
    }
  return {ric, g.trace(ric)};
}

// (s/2) v1^v2 + v2^Ric(v1) + Ric(v2)^v1, vectors lowered with g.
template <class T>
TwoForm<T> two_form_action(const Metric3<T>& g, const Sym2<T>& ric, const T& s,
                           const Vec3<T>& v1, const Vec3<T>& v2) {
  Vec3<T> f1 = g.lower(v1), f2 = g.lower(v2);
  Vec3<T> r1 = ric.apply(v1), r2 = ric.apply(v2);
  TwoForm<T> a = wedge(f1, f2), b = wedge(f2, r1), c = wedge(r2, f1);
  TwoForm<T> out;
  for (int i = 0; i < 3; ++i) out[i] = T(s / T(2) * a[i] + b[i] + c[i]);
  return out;
}

// R o R = -Ric o Ric + s Ric + (|Ric|^2 - s^2/2) g.
template <class T>
Sym2<T> curv_square(const Metric3<T>& g, const Sym2<T>& ric, const T& s) {
  Sym2<T> out = s * ric - g.compose(ric, ric);
  out += T(g.inner(ric, ric) - s * s / T(2)) * g.g();
  return out;
}

// |R|^2 = |Ric|^2 - s^2/4.
template <class T>
T curv_norm(const Metric3<T>& g, const Sym2<T>& ric, const T& s) {
  return T(g.inner(ric, ric) - s * s / T(4));
}

template <class T>
struct HarmonicReduction {
  Sym2<T> ricci;  // (s/2)(g - u (x) u)
  T ricci_norm2;  // |Ric|^2, equal to s^2/2 on this locus
};

// On the locus where Ric(dphi) = 0 and dphi ^ ((s/2) v - Ric(v)) = 0 for all v,
// reconstructs Ric = (s/2)(g - u (x) u), u = dphi / |dphi|. `dphi` is a covector.
template <class T>
HarmonicReduction<T> harmonic_ricci_reduction(const Metric3<T>& g, const Sym2<T>& ric,
                                              const Vec3<T>& dphi, const T& s,
                                              double tol = kFloatTolerance) {
  double scale = std::abs(to_double(s));
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(to_double(dphi[i])));
  T n2 = g.norm2_covector(dphi);
  if (near_zero(n2, scale, tol))
    throw Error(ErrorKind::PreconditionViolated, "dphi vanishes at this point");
  // Ric(dphi) as a covector: Ric_ij g^{jk} dphi_k.
  Vec3<T> ric_dphi = ric.apply(g.raise(dphi));
  for (int i = 0; i < 3; ++i)
    if (!near_zero(ric_dphi[i], scale * scale, tol))
      throw Error(ErrorKind::PreconditionViolated, "Ric(dphi) != 0");
  for (int m = 0; m < 3; ++m) {
    Vec3<T> w;
    for (int i = 0; i < 3; ++i) w[i] = T(s / T(2) * g.g()(m, i) - ric(m, i));
    TwoForm<T> f = wedge(dphi, w);
    for (int a = 0; a < 3; ++a)
      if (!near_zero(f[a], scale * scale, tol))
        throw Error(ErrorKind::PreconditionViolated,
                    "dphi ^ ((s/2) v - Ric(v)) != 0: Ricci eigenvalues orthogonal to dphi differ from s/2");
  }
  Sym2<T> uu = Sym2<T>::outer(dphi, dphi);
  uu *= T(T(1) / n2);
  Sym2<T> recon = T(s / T(2)) * (g.g() - uu);
  for (int i = 0; i < 6; ++i)
    if (!near_zero(T(recon.upper()[i] - ric.upper()[i]), scale, tol))
      throw Error(ErrorKind::PreconditionViolated, "Ricci tensor differs from (s/2)(g - u (x) u)");
  return {recon, g.inner(recon, recon)};
}

// Float-mode eigen-decomposition of Ric with respect to g.
struct EigenReport {
  std::array<double, 3> eigenvalues;               // ascending
  std::array<std::array<double, 3>, 3> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]
};

EigenReport eigen_report(const Sym2<double>& g, const Sym2<double>& ric);

template <class T>
Sym2<double> to_double(const Sym2<T>& a) {
  Sym2<double> out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out(i, j) = to_double(a(i, j));
  return out;
}

template <class T>
double max_abs(const Sym2<T>& a) {
  double m = 0;
  for (const auto& x : a.upper()) m = std::max(m, std::abs(to_double(x)));
  return m;
}

template <class T>
double max_abs(const Trilinear<T>& a) {
  double m = 0;
  for (const auto& x : a.c) m = std::max(m, std::abs(to_double(x)));
  return m;
}

template <class T, std::size_t N>
double max_abs(const std::array<T, N>& a) {
  double m = 0;
  for (const auto& x : a) m = std::max(m, std::abs(to_double(x)));
  return m;
}

}  // namespace hetsol
