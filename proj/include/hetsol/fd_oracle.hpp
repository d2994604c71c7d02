#pragma once

// Finite-difference reference for the chart geometry. Only point values of
// the metric and dilaton components are used; every derivative is a central
// difference and the curvature is assembled with plain index loops.
//
// The curvature derivatives are nested differences of the curvature at the
// six neighbouring points, so the stencil reaches p + step * (e_a + e_b + e_c).

#include <array>
#include <cmath>
#include <optional>

#include "hetsol/chart.hpp"
#include "hetsol/geometry.hpp"

namespace hetsol::fd {

using hetsol::ChartGeometry;
using hetsol::Point;
using hetsol::Sym2;

template <class T>
using Arr3 = std::array<T, 3>;
template <class T>
using Arr33 = std::array<Arr3<T>, 3>;
template <class T>
using Arr333 = std::array<Arr33<T>, 3>;
template <class T>
using Arr3333 = std::array<Arr333<T>, 3>;

template <class T>
struct FdLocal {
  Arr33<T> g, ginv;
  Arr333<T> gamma;  // gamma[k][i][j] = Gamma^k_ij
  Arr3333<T> R;     // R_ijkl
  Arr33<T> ric;
  T s;
};

template <class T>
class FdOracle {
 public:
  FdOracle(const ChartGeometry& chart, T step) : chart_(chart), h_(std::move(step)) {}

  hetsol::PointGeometry<T> evaluate(const Point<T>& p) const {
    FdLocal<T> c = local(p);
    std::array<FdLocal<T>, 3> plus, minus;
    for (int a = 0; a < 3; ++a) {
      plus[a] = local(shift(p, a, 1));
      minus[a] = local(shift(p, a, -1));
    }
    const T two_h = T(T(2) * h_);

    // nabla_a R_ijkl
    Arr3333<T> dR[3];
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              T v = T((plus[a].R[i][j][k][l] - minus[a].R[i][j][k][l]) / two_h);
              for (int m = 0; m < 3; ++m) {
                v -= c.gamma[m][a][i] * c.R[m][j][k][l];
                v -= c.gamma[m][a][j] * c.R[i][m][k][l];
                v -= c.gamma[m][a][k] * c.R[i][j][m][l];
                v -= c.gamma[m][a][l] * c.R[i][j][k][m];
              }
              dR[a][i][j][k][l] = v;
            }

    hetsol::DerivativePacket<T> der;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 3; ++z) {
          T acc(0);
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) acc += c.ginv[a][b] * dR[a][b][x][y][z];
          der.div_R(x, y, z) = T(-acc);
        }
    // nabla_a Ric_jk = g^{il} nabla_a R_ijkl
    auto nabla_ric = [&](int a, int j, int k) {
      T acc(0);
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) acc += c.ginv[i][l] * dR[a][i][j][k][l];
      return acc;
    };
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) der.nabla_ric(a, j, k) = nabla_ric(a, j, k);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 3; ++z) der.d_ric(x, y, z) = T(der.nabla_ric(x, y, z) - der.nabla_ric(y, x, z));
    for (int a = 0; a < 3; ++a) der.ds[a] = T((plus[a].s - minus[a].s) / two_h);

    // Dilaton: first and second partials of phi.
    Arr3<T> d1;
    Arr33<T> d2;
    std::optional<T> e2phi;
    dilaton_partials(p, d1, d2, e2phi);
    for (int i = 0; i < 3; ++i) der.dphi[i] = d1[i];
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        T v = d2[i][j];
        for (int m = 0; m < 3; ++m) v -= c.gamma[m][i][j] * d1[m];
        der.hess_phi(i, j) = v;
      }
    T tr(0), n2(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tr += c.ginv[i][j] * der.hess_phi(i, j);
        n2 += c.ginv[i][j] * d1[i] * d1[j];
      }
    der.delta_dphi = T(-tr);
    der.dphi_norm2 = n2;
    der.e2phi = e2phi;

    return {packet(c), der};
  }

  FdLocal<T> local(const Point<T>& q) const {
    Arr33<T> g = metric(q);
    Arr3<Arr33<T>> dg;         // dg[a][i][j]
    Arr33<Arr33<T>> ddg;       // ddg[a][b][i][j]
    partials(q, [&](const Point<T>& x) { return metric(x); }, g, dg, ddg);

    FdLocal<T> out;
    out.g = g;
    out.ginv = inverse(g);
    const auto& gi = out.ginv;
    const T half = T(T(1) / T(2));

    Arr333<T> first;  // Gamma_{l,ij}
    Arr3<Arr333<T>> dfirst;
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          first[l][i][j] = T(half * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]));
          for (int a = 0; a < 3; ++a)
            dfirst[a][l][i][j] = T(half * (ddg[a][i][j][l] + ddg[a][j][i][l] - ddg[a][l][i][j]));
        }
    Arr3<Arr333<T>> dgamma;  // d_a Gamma^k_ij
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          T v(0);
          for (int l = 0; l < 3; ++l) v += gi[k][l] * first[l][i][j];
          out.gamma[k][i][j] = v;
          for (int a = 0; a < 3; ++a) {
            T w(0);
            for (int l = 0; l < 3; ++l) {
              T dginv(0);
              for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) dginv -= gi[k][m] * dg[a][m][n] * gi[n][l];
              w += dginv * first[l][i][j] + gi[k][l] * dfirst[a][l][i][j];
            }
            dgamma[a][k][i][j] = w;
          }
        }

    // R(d_i, d_j) d_k = R^m_ijk d_m, lowered into the last slot.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          Arr3<T> up;
          for (int m = 0; m < 3; ++m) {
            T v = T(dgamma[i][m][j][k] - dgamma[j][m][i][k]);
            for (int q2 = 0; q2 < 3; ++q2)
              v += out.gamma[m][i][q2] * out.gamma[q2][j][k] - out.gamma[m][j][q2] * out.gamma[q2][i][k];
            up[m] = v;
          }
          for (int l = 0; l < 3; ++l) {
            T v(0);
            for (int m = 0; m < 3; ++m) v += g[l][m] * up[m];
            out.R[i][j][k][l] = v;
          }
        }
    out.s = T(0);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        T v(0);
        for (int i = 0; i < 3; ++i)
          for (int l = 0; l < 3; ++l) v += gi[i][l] * out.R[i][j][k][l];
        out.ric[j][k] = v;
      }
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out.s += gi[j][k] * out.ric[j][k];
    return out;
  }

  const T& step() const { return h_; }

 private:
  Point<T> shift(Point<T> q, int axis, int dir) const {
    q[axis] = dir > 0 ? T(q[axis] + h_) : T(q[axis] - h_);
    return q;
  }

  void check(const Point<T>& q) const {
    try {
      chart_.check_domain(q);
    } catch (const hetsol::Error&) {
      throw hetsol::Error(hetsol::ErrorKind::StencilOutOfDomain, "difference stencil leaves the chart");
    }
  }

  Arr33<T> metric(const Point<T>& q) const {
    check(q);
    Arr33<T> g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = chart_.metric()[hetsol::sym_index(i, j)].evaluate(q);
    return g;
  }

  // Central first and second partials of a value-valued function around q.
  template <class F, class V>
  void partials(const Point<T>& q, F f, const V& center, Arr3<V>& d1, Arr33<V>& d2) const {
    const T two_h = T(T(2) * h_), h2 = T(h_ * h_), four_h2 = T(T(4) * h_ * h_);
    for (int a = 0; a < 3; ++a) {
      V fp = f(shift(q, a, 1)), fm = f(shift(q, a, -1));
      d1[a] = combine(fp, fm, [&](const T& x, const T& y) { return T((x - y) / two_h); });
      V num = combine(fp, fm, [](const T& x, const T& y) { return T(x + y); });
      d2[a][a] = combine(num, center, [&](const T& x, const T& y) { return T((x - T(2) * y) / h2); });
      for (int b = a + 1; b < 3; ++b) {
        V pp = f(shift(shift(q, a, 1), b, 1)), pm = f(shift(shift(q, a, 1), b, -1));
        V mp = f(shift(shift(q, a, -1), b, 1)), mm = f(shift(shift(q, a, -1), b, -1));
        V s1 = combine(pp, mm, [](const T& x, const T& y) { return T(x + y); });
        V s2 = combine(pm, mp, [](const T& x, const T& y) { return T(x + y); });
        d2[a][b] = combine(s1, s2, [&](const T& x, const T& y) { return T((x - y) / four_h2); });
        d2[b][a] = d2[a][b];
      }
    }
  }

  template <class Op>
  static T combine(const T& x, const T& y, Op op) {
    return op(x, y);
  }
  template <class Op>
  static Arr33<T> combine(const Arr33<T>& x, const Arr33<T>& y, Op op) {
    Arr33<T> out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = op(x[i][j], y[i][j]);
    return out;
  }

  void dilaton_partials(const Point<T>& p, Arr3<T>& d1, Arr33<T>& d2, std::optional<T>& e2phi) const {
    const auto& dil = chart_.dilaton();
    auto f = [&](const Point<T>& x) {
      check(x);
      return dil.field.evaluate(x);
    };
    T v = f(p);
    partials(p, f, v, d1, d2);
    if (dil.form == hetsol::DilatonField::Form::Phi) {
      if constexpr (std::is_same_v<T, double>)
        e2phi = std::exp(2 * v);
      else if (hetsol::sign_of(v) == 0)
        e2phi = T(1);
      return;
    }
    // phi = log(W) / 2: d phi = dW / 2W, dd phi = ddW / 2W - dW dW / 2W^2.
    e2phi = v;
    Arr3<T> dw = d1;
    for (int i = 0; i < 3; ++i) d1[i] = T(dw[i] / (T(2) * v));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d2[i][j] = T(d2[i][j] / (T(2) * v) - dw[i] * dw[j] / (T(2) * v * v));
  }

  static Arr33<T> inverse(const Arr33<T>& g) {
    hetsol::Mat3<T> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = g[i][j];
    hetsol::Mat3<T> inv = m.inverse();
    Arr33<T> out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = inv(i, j);
    return out;
  }

  static hetsol::GeometryPacket<T> packet(const FdLocal<T>& c) {
    Sym2<T> g, ric, op;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        g(i, j) = c.g[i][j];
        ric(i, j) = c.ric[i][j];
      }
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b)
        op(a, b) = c.R[hetsol::kPairs[a][0]][hetsol::kPairs[a][1]][hetsol::kPairs[b][0]][hetsol::kPairs[b][1]];
    std::array<T, 27> gamma;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gamma[hetsol::gamma_index(k, i, j)] = c.gamma[k][i][j];
    return {hetsol::Metric3<T>(g), gamma, hetsol::Curv3<T>(op), ric, c.s};
  }

  const ChartGeometry& chart_;
  T h_;
};

template <class T>
hetsol::PointGeometry<T> fd_oracle(const ChartGeometry& chart, const Point<T>& p, const T& step) {
  return FdOracle<T>(chart, step).evaluate(p);
}

// Largest component defect between two evaluations, each block measured
// relative to max(1, size of the reference block).
template <class T>
double packet_defect(const hetsol::PointGeometry<T>& x, const hetsol::PointGeometry<T>& ref,
                     bool with_derivatives = true) {
  double worst = 0;
  auto block = [&](auto get) {
    auto a = get(x);
    auto b = get(ref);
    double scale = std::max(1.0, hetsol::max_abs(b));
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      d = std::max(d, std::abs(hetsol::to_double(T(a[i] - b[i]))));
    worst = std::max(worst, d / scale);
  };
  block([](const auto& q) { return q.geo.christoffel; });
  block([](const auto& q) { return q.geo.curv.op().upper(); });
  block([](const auto& q) { return q.geo.ric.upper(); });
  block([](const auto& q) { return std::array<T, 1>{q.geo.s}; });
  if (with_derivatives) {
    block([](const auto& q) { return q.der.dphi; });
    block([](const auto& q) { return q.der.hess_phi.upper(); });
    block([](const auto& q) { return q.der.div_R.c; });
    block([](const auto& q) { return q.der.nabla_ric.c; });
    block([](const auto& q) { return q.der.d_ric.c; });
    block([](const auto& q) { return q.der.ds; });
  }
  return worst;
}

}  // namespace hetsol::fd
