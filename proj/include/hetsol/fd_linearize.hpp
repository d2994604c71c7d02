#pragma once

// References for the linearized operators.
//
// variation_dual: the nonlinear pipeline run on dual numbers, with the metric
// jets lifted to g + eps h; reading off the eps parts gives the exact
// directional derivative.
// variation_fd: central differences in t of the same pipeline on g +- t h.
// fd_einstein_operator: nabla* nabla h and R0(h) assembled by nested central
// differences of point values, with index sums over the full Riemann tensor.

#include "hetsol/geometry.hpp"
#include "hetsol/linearize.hpp"
#include "hetsol/fd_oracle.hpp"

namespace hetsol::fd {

using hetsol::Dual;
using hetsol::Jet;
using hetsol::SymField;
using hetsol::Vec3;

template <class T>
struct Variation {
  Sym2<T> ric;
  T s;
  Sym2<T> curv_square;
  T curv_norm;
};

template <class T>
struct PipelineValues {
  Sym2<T> ric;
  T s;
  Sym2<T> curv_square;
  T curv_norm;
};

template <class T>
PipelineValues<T> pipeline(const std::array<Jet<T>, 6>& g) {
  auto geo = hetsol::packet_from_jets(hetsol::curvature_jets(g));
  return {geo.ric, geo.s, hetsol::curv_square(geo.metric, geo.ric, geo.s),
          hetsol::curv_norm(geo.metric, geo.ric, geo.s)};
}

template <class T>
Variation<T> variation_dual(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  using D = Dual<T>;
  auto gj = chart.metric_jets(p, 2);
  auto hj = hetsol::sym_jets(h, p, 2);
  std::array<Jet<D>, 6> lifted;
  for (int m = 0; m < 6; ++m) {
    Jet<D> j(2, D(0));
    for (int k = 0; k < j.size(); ++k) j.coeff(k) = D(gj[m].coeff(k), hj[m].coeff(k));
    lifted[m] = j;
  }
  PipelineValues<D> v = pipeline(lifted);
  Variation<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      out.ric(i, j) = v.ric(i, j).d;
      out.curv_square(i, j) = v.curv_square(i, j).d;
    }
  out.s = v.s.d;
  out.curv_norm = v.curv_norm.d;
  return out;
}

template <class T>
Variation<T> variation_fd(const ChartGeometry& chart, const SymField& h, const Point<T>& p, const T& t) {
  auto gj = chart.metric_jets(p, 2);
  auto hj = hetsol::sym_jets(h, p, 2);
  std::array<Jet<T>, 6> gp, gm;
  for (int m = 0; m < 6; ++m) {
    gp[m] = gj[m] + t * hj[m];
    gm[m] = gj[m] - t * hj[m];
  }
  PipelineValues<T> a = pipeline(gp), b = pipeline(gm);
  const T inv = T(T(1) / (T(2) * t));
  return {inv * (a.ric - b.ric), T(inv * (a.s - b.s)), inv * (a.curv_square - b.curv_square),
          T(inv * (a.curv_norm - b.curv_norm))};
}

template <class T>
struct EinsteinOperatorFd {
  Sym2<T> rough_laplacian;
  Sym2<T> r0;
  Vec3<T> div_h;
};

template <class T>
EinsteinOperatorFd<T> fd_einstein_operator(const ChartGeometry& chart, const SymField& h, const Point<T>& p,
                                           const T& step) {
  FdOracle<T> fd(chart, step);
  auto shift = [&](Point<T> q, int axis, int dir) {
    q[axis] = dir > 0 ? T(q[axis] + step) : T(q[axis] - step);
    return q;
  };
  auto hval = [&](const Point<T>& q) {
    Arr33<T> out;
    auto s = hetsol::sym_values(h, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = s(i, j);
    return out;
  };
  const T two = T(T(2) * step);
  // nabla_b h_ij at q.
  auto nabla_h = [&](const Point<T>& q, const FdLocal<T>& loc) {
    Arr333<T> out;
    Arr33<T> c = hval(q);
    for (int b = 0; b < 3; ++b) {
      Arr33<T> hp = hval(shift(q, b, 1)), hm = hval(shift(q, b, -1));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          T v = T((hp[i][j] - hm[i][j]) / two);
          for (int m = 0; m < 3; ++m) v -= loc.gamma[m][b][i] * c[m][j] + loc.gamma[m][b][j] * c[i][m];
          out[b][i][j] = v;
        }
    }
    return out;
  };

  FdLocal<T> c = fd.local(p);
  Arr333<T> nh = nabla_h(p, c);
  Arr3<Arr333<T>> nh_plus, nh_minus;
  for (int a = 0; a < 3; ++a) {
    Point<T> qp = shift(p, a, 1), qm = shift(p, a, -1);
    nh_plus[a] = nabla_h(qp, fd.local(qp));
    nh_minus[a] = nabla_h(qm, fd.local(qm));
  }

  EinsteinOperatorFd<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T acc(0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          T v = T((nh_plus[a][b][i][j] - nh_minus[a][b][i][j]) / two);
          for (int m = 0; m < 3; ++m) {
            v -= c.gamma[m][a][b] * nh[m][i][j];
            v -= c.gamma[m][a][i] * nh[b][m][j];
            v -= c.gamma[m][a][j] * nh[b][i][m];
          }
          acc += c.ginv[a][b] * v;
        }
      out.rough_laplacian(i, j) = T(-acc);
    }

  Arr33<T> hv = hval(p);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T acc(0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) acc += c.R[a][i][j][b] * c.ginv[a][x] * c.ginv[b][y] * hv[x][y];
      out.r0(i, j) = acc;
    }
  for (int j = 0; j < 3; ++j) {
    T acc(0);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) acc += c.ginv[k][i] * nh[k][i][j];
    out.div_h[j] = T(-acc);
  }
  return out;
}

}  // namespace hetsol::fd
