#pragma once

// Levi-Civita geometry of a chart at a point, assembled exactly from Taylor
// jets of the metric components.

#include <array>
#include <optional>

#include "hetsol/algebra3.hpp"
#include "hetsol/chart.hpp"
#include "hetsol/jet.hpp"

namespace hetsol {

inline constexpr int gamma_index(int k, int i, int j) { return 9 * k + 3 * i + j; }

template <class T>
struct GeometryPacket {
  Metric3<T> metric;
  std::array<T, 27> christoffel;  // Gamma^k_ij at gamma_index(k, i, j)
  Curv3<T> curv;
  Sym2<T> ric;
  T s;
};

template <class T>
struct DerivativePacket {
  Vec3<T> dphi;          // covector
  Sym2<T> hess_phi;      // nabla d phi
  T delta_dphi;          // delta^g d phi = -tr_g nabla d phi
  T dphi_norm2;          // |d phi|^2
  Trilinear<T> div_R;    // d*_nabla R (v1, v2, v3) = -sum_j (nabla_{e_j} R)(e_j, v1, v2, v3)
  Trilinear<T> nabla_ric;  // (nabla_a Ric)(j, k) at (a, j, k)
  Trilinear<T> d_ric;    // d_nabla Ric (X, Y, Z) = (nabla_X Ric)(Y, Z) - (nabla_Y Ric)(X, Z)
  Vec3<T> ds;
  std::optional<T> e2phi;
};

template <class T>
struct PointGeometry {
  GeometryPacket<T> geo;
  DerivativePacket<T> der;
};

// Jets of the curvature quantities of a metric given by jets of order n:
// inverse metric (n), Christoffels (n - 1), curvature operator, Ricci and s (n - 2).
template <class T>
struct CurvatureJets {
  std::array<Jet<T>, 6> g;
  std::array<Jet<T>, 6> ginv;
  std::array<Jet<T>, 27> gamma;
  std::array<Jet<T>, 6> curv;  // upper triangle of R(E_a, E_b)
  std::array<Jet<T>, 6> ric;
  Jet<T> s;

  const Jet<T>& ginv_at(int i, int j) const { return ginv[sym_index(i, j)]; }
  const Jet<T>& g_at(int i, int j) const { return g[sym_index(i, j)]; }

  // R_ijkl as a jet, expanded from the 2-form storage.
  Jet<T> riemann(int i, int j, int k, int l) const {
    auto [a, sa] = pair_slot(i, j);
    auto [b, sb] = pair_slot(k, l);
    if (a < 0 || b < 0) return Jet<T>(s.order(), T(0));
    const Jet<T>& v = curv[sym_index(a, b)];
    return sa * sb > 0 ? v : -v;
  }
};

template <class T>
std::array<Jet<T>, 6> inverse_jets(const std::array<Jet<T>, 6>& g) {
  auto at = [&](int i, int j) -> const Jet<T>& { return g[sym_index(i, j)]; };
  std::array<Jet<T>, 6> cof;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      cof[sym_index(i, j)] = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
    }
  Jet<T> det = at(0, 0) * cof[sym_index(0, 0)] + at(0, 1) * cof[sym_index(0, 1)] +
               at(0, 2) * cof[sym_index(0, 2)];
  if (sign_of(det.value()) == 0) throw Error(ErrorKind::SingularMetric, "metric determinant vanishes");
  Jet<T> inv_det = det.reciprocal();
  for (auto& c : cof) c = c * inv_det;
  return cof;
}

template <class T>
CurvatureJets<T> curvature_jets(const std::array<Jet<T>, 6>& g) {
  const int n = g[0].order();
  if (n < 2) throw Error(ErrorKind::PreconditionViolated, "curvature needs metric jets of order >= 2");
  CurvatureJets<T> cj;
  cj.g = g;
  cj.ginv = inverse_jets(g);

  std::array<std::array<Jet<T>, 6>, 3> dg;  // dg[a][sym(i,j)] = partial_a g_ij
  for (int a = 0; a < 3; ++a)
    for (int m = 0; m < 6; ++m) dg[a][m] = g[m].derivative(a);
  auto d = [&](int a, int i, int j) -> const Jet<T>& { return dg[a][sym_index(i, j)]; };

  // Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2, then raise l.
  std::array<Jet<T>, 27> first;
  const T half = T(T(1) / T(2));
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        first[gamma_index(l, i, j)] = (d(i, j, l) + d(j, i, l) - d(l, i, j)) * half;
        first[gamma_index(l, j, i)] = first[gamma_index(l, i, j)];
      }
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Jet<T> acc(n - 1, T(0));
        for (int l = 0; l < 3; ++l) acc += cj.ginv_at(k, l) * first[gamma_index(l, i, j)];
        cj.gamma[gamma_index(k, i, j)] = acc;
        cj.gamma[gamma_index(k, j, i)] = acc;
      }

  // R^m_ijk = d_i G^m_jk - d_j G^m_ik + G^m_in G^n_jk - G^m_jn G^n_ik;  R_ijkl = g_lm R^m_ijk.
  auto G = [&](int k, int i, int j) -> const Jet<T>& { return cj.gamma[gamma_index(k, i, j)]; };
  auto upper_R = [&](int m, int i, int j, int k) {
    Jet<T> r = G(m, j, k).derivative(i) - G(m, i, k).derivative(j);
    for (int q = 0; q < 3; ++q) r += G(m, i, q) * G(q, j, k) - G(m, j, q) * G(q, i, k);
    return r;
  };
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      auto [i, j] = kPairs[a];
      auto [k, l] = kPairs[b];
      Jet<T> acc(n - 2, T(0));
      for (int m = 0; m < 3; ++m) acc += cj.g_at(l, m).truncated(n - 2) * upper_R(m, i, j, k);
      cj.curv[sym_index(a, b)] = acc;
    }

  for (int j = 0; j < 3; ++j)
    for (int k = j; k < 3; ++k) {
      Jet<T> acc(n - 2, T(0));
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) {
          if (i == j || k == l) continue;
          acc += cj.ginv_at(i, l) * cj.riemann(i, j, k, l);
        }
      cj.ric[sym_index(j, k)] = acc;
    }
  Jet<T> s(n - 2, T(0));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) s += cj.ginv_at(j, k) * cj.ric[sym_index(j, k)];
  cj.s = s;
  return cj;
}

template <class T>
GeometryPacket<T> packet_from_jets(const CurvatureJets<T>& cj) {
  std::array<T, 6> g, ric, op;
  for (int m = 0; m < 6; ++m) {
    g[m] = cj.g[m].value();
    ric[m] = cj.ric[m].value();
    op[m] = cj.curv[m].value();
  }
  std::array<T, 27> gamma;
  for (int m = 0; m < 27; ++m) gamma[m] = cj.gamma[m].value();
  return {Metric3<T>(Sym2<T>(g)), gamma, Curv3<T>(Sym2<T>(op)), Sym2<T>(ric), cj.s.value()};
}

// Full (0,4) components with one derivative: nabla_a R_ijkl at [a][i][j][k][l].
template <class T>
using RiemannGradient = std::array<std::array<std::array<std::array<std::array<T, 3>, 3>, 3>, 3>, 3>;

template <class T>
RiemannGradient<T> riemann_gradient(const CurvatureJets<T>& cj, const GeometryPacket<T>& geo) {
  auto G = [&](int k, int i, int j) -> const T& { return geo.christoffel[gamma_index(k, i, j)]; };
  auto R = [&](int i, int j, int k, int l) { return geo.curv(i, j, k, l); };
  RiemannGradient<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          Jet<T> rj = cj.riemann(i, j, k, l);
          for (int a = 0; a < 3; ++a) {
            T v = rj.order() >= 1 ? rj.derivative(a).value() : T(0);
            for (int m = 0; m < 3; ++m) {
              v -= G(m, a, i) * R(m, j, k, l);
              v -= G(m, a, j) * R(i, m, k, l);
              v -= G(m, a, k) * R(i, j, m, l);
              v -= G(m, a, l) * R(i, j, k, m);
            }
            out[a][i][j][k][l] = v;
          }
        }
  return out;
}

template <class T>
PointGeometry<T> point_geometry_from_jets(const CurvatureJets<T>& cj, const DilatonJets<T>& dil) {
  if (cj.s.order() < 1) throw Error(ErrorKind::PreconditionViolated, "derivative packet needs metric jets of order >= 3");
  PointGeometry<T> pg{packet_from_jets(cj), {}};
  const auto& geo = pg.geo;
  auto& der = pg.der;
  const Sym2<T>& ginv = geo.metric.inv();
  auto G = [&](int k, int i, int j) -> const T& { return geo.christoffel[gamma_index(k, i, j)]; };

  // Dilaton.
  for (int i = 0; i < 3; ++i) der.dphi[i] = dil.dphi[i].value();
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T v = dil.dphi[j].derivative(i).value();
      for (int m = 0; m < 3; ++m) v -= G(m, i, j) * der.dphi[m];
      der.hess_phi(i, j) = v;
    }
  der.delta_dphi = T(-geo.metric.trace(der.hess_phi));
  der.dphi_norm2 = geo.metric.norm2_covector(der.dphi);
  der.e2phi = dil.e2phi;

  // Divergence of the curvature from nabla R.
  RiemannGradient<T> dR = riemann_gradient(cj, geo);
  for (int v1 = 0; v1 < 3; ++v1)
    for (int v2 = 0; v2 < 3; ++v2)
      for (int v3 = 0; v3 < 3; ++v3) {
        T acc(0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) acc += ginv(a, b) * dR[a][b][v1][v2][v3];
        der.div_R(v1, v2, v3) = T(-acc);
      }

  // nabla Ric from the Ricci jets.
  Trilinear<T>& dric = der.nabla_ric;
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        T v = cj.ric[sym_index(j, k)].derivative(a).value();
        for (int m = 0; m < 3; ++m) {
          v -= G(m, a, j) * geo.ric(m, k);
          v -= G(m, a, k) * geo.ric(j, m);
        }
        dric(a, j, k) = v;
      }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int z = 0; z < 3; ++z) der.d_ric(x, y, z) = T(dric(x, y, z) - dric(y, x, z));
  for (int a = 0; a < 3; ++a) der.ds[a] = cj.s.derivative(a).value();
  return pg;
}

template <class T>
GeometryPacket<T> geometry_packet(const ChartGeometry& chart, const Point<T>& p) {
  return packet_from_jets(curvature_jets(chart.metric_jets(p, 2)));
}

template <class T>
PointGeometry<T> point_geometry(const ChartGeometry& chart, const Point<T>& p) {
  CurvatureJets<T> cj = curvature_jets(chart.metric_jets(p, 3));
  return point_geometry_from_jets(cj, chart.dilaton_jets(p, 2));
}

template <class T>
DerivativePacket<T> derivative_packet(const ChartGeometry& chart, const Point<T>& p) {
  return point_geometry(chart, p).der;
}

// d*_nabla R (v1, v2, v3) - d_nabla Ric (v2, v3, v1); vanishes identically.
template <class T>
Trilinear<T> bianchi_residual(const DerivativePacket<T>& der) {
  Trilinear<T> out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) out(a, b, c) = T(der.div_R(a, b, c) - der.d_ric(b, c, a));
  return out;
}

template <class T>
Trilinear<T> bianchi_residual(const ChartGeometry& chart, const Point<T>& p) {
  return bianchi_residual(derivative_packet(chart, p));
}

}  // namespace hetsol
