#pragma once

// First-order variations of the curvature along a symmetric 2-tensor h, the
// gauge operator pair of the diffeomorphism action, the coefficient chain that
// rules out essential deformations of the hyperbolic soliton, and the
// infinitesimal Einstein operator.
//
// Conventions: nabla* h_j = -g^{ki} nabla_k h_ij, nabla^S w = sym(nabla w),
// delta w = -g^{ij} nabla_i w_j, nabla* nabla h = -g^{ab} nabla_a nabla_b h,
// R0(h)_ij = R_aijb h^ab, Delta_L h = nabla* nabla h + h o Ric + Ric o h - 2 R0(h).

#include <string>
#include <vector>

#include "hetsol/geometry.hpp"
#include "hetsol/soliton.hpp"

namespace hetsol {

// Everything the linearized operators need at one point.
template <class T>
struct LinearizationPacket {
  GeometryPacket<T> geo;
  Sym2<T> h{};
  T tr_h{};
  Vec3<T> d_tr_h{};
  Sym2<T> hess_tr_h{};       // nabla d tr h
  T laplace_tr_h{};          // delta d tr h
  Vec3<T> div_h{};           // nabla* h
  Mat3<T> grad_div_h{};      // (i, j) -> nabla_i (nabla* h)_j
  Sym2<T> sym_grad_div_h{};  // nabla^S nabla* h
  T delta_div_h{};           // delta nabla* h
  Sym2<T> rough_laplacian{};
  Sym2<T> r0{};
  Sym2<T> lichnerowicz{};
  Sym2<T> lin_ricci{};
  T lin_scalar{};
};

template <class T>
Sym2<T> r0_action(const Metric3<T>& g, const Curv3<T>& R, const Sym2<T>& h) {
  Sym2<T> up = Sym2<T>::from_matrix(g.inv().matrix() * h.matrix() * g.inv().matrix());
  Sym2<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T acc(0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) acc += R(a, i, j, b) * up(a, b);
      out(i, j) = acc;
    }
  return out;
}

// Metric jets of order >= 2 in cj, h jets of order >= 2.
template <class T>
LinearizationPacket<T> linearization_from_jets(const CurvatureJets<T>& cj, const std::array<Jet<T>, 6>& h) {
  LinearizationPacket<T> L{packet_from_jets(cj)};
  const auto& geo = L.geo;
  const Metric3<T>& g = geo.metric;
  const Sym2<T>& gi = g.inv();
  auto G = [&](int k, int i, int j) -> const Jet<T>& { return cj.gamma[gamma_index(k, i, j)]; };
  auto Gv = [&](int k, int i, int j) -> const T& { return geo.christoffel[gamma_index(k, i, j)]; };
  auto H = [&](int i, int j) -> const Jet<T>& { return h[sym_index(i, j)]; };
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) L.h(i, j) = H(i, j).value();

  // nabla_a h_ij as jets of order 1.
  std::array<std::array<Jet<T>, 6>, 3> nh;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Jet<T> v = H(i, j).derivative(a);
        for (int m = 0; m < 3; ++m) v -= G(m, a, i) * H(m, j) + G(m, a, j) * H(i, m);
        nh[a][sym_index(i, j)] = v;
      }
  auto NH = [&](int a, int i, int j) -> const Jet<T>& { return nh[a][sym_index(i, j)]; };

  // nabla_b nabla_a h_ij at p, traced into the rough Laplacian.
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T acc(0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          if (sign_of(gi(a, b)) == 0) continue;
          T v = NH(a, i, j).derivative(b).value();
          for (int m = 0; m < 3; ++m) {
            v -= Gv(m, b, a) * NH(m, i, j).value();
            v -= Gv(m, b, i) * NH(a, m, j).value();
            v -= Gv(m, b, j) * NH(a, i, m).value();
          }
          acc += gi(a, b) * v;
        }
      L.rough_laplacian(i, j) = T(-acc);
    }

  // nabla* h as jets, then its covariant derivative.
  std::array<Jet<T>, 3> w;
  for (int j = 0; j < 3; ++j) {
    Jet<T> acc(1, T(0));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) acc += cj.ginv_at(k, i) * NH(k, i, j);
    w[j] = -acc;
    L.div_h[j] = w[j].value();
  }
  T delta(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T v = w[j].derivative(i).value();
      for (int m = 0; m < 3; ++m) v -= Gv(m, i, j) * L.div_h[m];
      L.grad_div_h(i, j) = v;
      delta -= gi(i, j) * v;
    }
  L.delta_div_h = delta;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) L.sym_grad_div_h(i, j) = T((L.grad_div_h(i, j) + L.grad_div_h(j, i)) / T(2));

  // tr h as a jet of order 2 and its Hessian.
  Jet<T> tau(2, T(0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tau += cj.ginv_at(i, j) * H(i, j);
  L.tr_h = tau.value();
  std::array<Jet<T>, 3> dtau;
  for (int a = 0; a < 3; ++a) {
    dtau[a] = tau.derivative(a);
    L.d_tr_h[a] = dtau[a].value();
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T v = dtau[j].derivative(i).value();
      for (int m = 0; m < 3; ++m) v -= Gv(m, i, j) * L.d_tr_h[m];
      L.hess_tr_h(i, j) = v;
    }
  L.laplace_tr_h = T(-g.trace(L.hess_tr_h));

  L.r0 = r0_action(g, geo.curv, L.h);
  L.lichnerowicz = L.rough_laplacian + T(2) * g.compose(L.h, geo.ric) - T(2) * L.r0;

  const T half = T(T(1) / T(2));
  L.lin_ricci = half * L.lichnerowicz - L.sym_grad_div_h - half * L.hess_tr_h;
  L.lin_scalar = T(L.laplace_tr_h + L.delta_div_h - g.inner(L.h, geo.ric));
  return L;
}

template <class T>
LinearizationPacket<T> linearization(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  return linearization_from_jets(curvature_jets(chart.metric_jets(p, 2)), sym_jets(h, p, 2));
}

template <class T>
Sym2<T> lin_ricci(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  return linearization(chart, h, p).lin_ricci;
}

template <class T>
T lin_scalar(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  return linearization(chart, h, p).lin_scalar;
}

// Constants of the hyperbolic soliton background: kappa s = -24, kappa e^{2 phi} = 48,
// Ric = lambda g with lambda = s / 3.
struct BackgroundConstants {
  Rational kappa, s, e2phi, lambda;
  std::string tag;

  static BackgroundConstants hyperbolic(const SolitonParams& params);
  bool satisfies_hyperbolic() const;
};

template <class T>
void require_einstein(const GeometryPacket<T>& geo) {
  Sym2<T> defect = geo.ric - T(geo.s / T(3)) * geo.metric.g();
  for (const auto& x : defect.upper())
    if (!near_zero(x, max_abs(geo.ric), 1e-10))
      throw Error(ErrorKind::NotEinstein, "background Ricci tensor is not a multiple of the metric");
}

template <class T>
struct CurvatureLinearization {
  Sym2<T> curv_square;  // variation of R o R
  T curv_norm;          // variation of |R|^2
};

template <class T>
CurvatureLinearization<T> lin_curv_einstein(const LinearizationPacket<T>& L) {
  require_einstein(L.geo);
  const T& s = L.geo.s;
  return {T(s / T(3)) * L.lin_ricci - T(s * s / T(18)) * L.h, T(s / T(6) * L.lin_scalar)};
}

template <class T>
CurvatureLinearization<T> lin_curv_einstein(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  return lin_curv_einstein(linearization(chart, h, p));
}

template <class T>
CurvatureLinearization<T> lin_curv_einstein(const BackgroundConstants& bg, const ChartGeometry& chart,
                                            const SymField& h, const Point<T>& p) {
  LinearizationPacket<T> L = linearization(chart, h, p);
  if (!near_zero(T(L.geo.s - cast<T>(bg.s)), to_double(L.geo.s), 1e-10))
    throw Error(ErrorKind::NotEinstein, "chart scalar curvature differs from the background constant");
  return lin_curv_einstein(L);
}

// --- Gauge operators ---------------------------------------------------------

template <class T>
struct GaugeImage {
  Sym2<T> lie_g;  // L_v g
  T dphi_v;       // d phi (v)
};

template <class T>
GaugeImage<T> gauge_image(const ChartGeometry& chart, const VecField& v, const Point<T>& p) {
  auto g = chart.metric_jets(p, 1);
  auto dil = chart.dilaton_jets(p, 1);
  std::array<Jet<T>, 3> vj;
  for (int k = 0; k < 3; ++k) vj[k] = v[k].jet(p, 1);
  auto gv = [&](int i, int j) { return g[sym_index(i, j)].value(); };
  GaugeImage<T> out{{}, T(0)};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T acc(0);
      for (int k = 0; k < 3; ++k) {
        acc += vj[k].value() * g[sym_index(i, j)].derivative(k).value();
        acc += gv(k, j) * vj[k].derivative(i).value();
        acc += gv(i, k) * vj[k].derivative(j).value();
      }
      out.lie_g(i, j) = acc;
    }
  for (int k = 0; k < 3; ++k) out.dphi_v += dil.dphi[k].value() * vj[k].value();
  return out;
}

// 2 nabla* h + xi d phi, a covector.
template <class T>
Vec3<T> gauge_adjoint(const ChartGeometry& chart, const SymField& h, const FieldExpr& xi, const Point<T>& p) {
  LinearizationPacket<T> L = linearization(chart, h, p);
  auto dil = chart.dilaton_jets(p, 1);
  T x = xi.evaluate(p);
  Vec3<T> out;
  for (int j = 0; j < 3; ++j) out[j] = T(T(2) * L.div_h[j] + x * dil.dphi[j].value());
  return out;
}

// Exact L2 pairing on the 2 pi torus for a constant metric and trigonometric
// v, h, xi, phi. Both sides are trigonometric polynomials; their means are
// taken with the equispaced node rule, which is exact below the node count.
using TrigSym = std::array<TrigPolynomial, 6>;
using TrigVec = std::array<TrigPolynomial, 3>;

struct TorusGaugeData {
  Sym2<Rational> g;
  TrigVec v;
  TrigSym h;
  TrigPolynomial xi;
  TrigPolynomial phi;

  int max_degree() const;
};

struct TorusPairing {
  Rational image_side;    // mean of <(L_v g, d phi(v)), (h, xi)>
  Rational adjoint_side;  // mean of (2 nabla* h + xi d phi)(v)
  Rational defect;
  Rational exact_image_side;    // constant Fourier terms, the true means
  Rational exact_adjoint_side;
  int nodes;
  bool quadrature_exact;  // nodes > 2 * max_degree
};

TrigSym lie_derivative_trig(const TrigSym& g, const TrigVec& v);
TorusPairing torus_gauge_pairing(const TorusGaugeData& data, int nodes);

// Same pairing by nodal quadrature in float for a general torus chart,
// weighted by the Riemannian volume density.
struct NodalPairing {
  double image_side, adjoint_side, defect;
  int nodes;
};
NodalPairing torus_gauge_pairing_nodal(const ChartGeometry& chart, const VecField& v, const SymField& h,
                                       const FieldExpr& xi, int nodes);

// --- Essential deformations ---------------------------------------------------

struct ChainCoefficient {
  std::string name;
  Rational value;
  Rational closed_form;
  bool ok() const { return value == closed_form; }
};

struct EssentialChain {
  BackgroundConstants bg;
  Rational exterior;    // 1 + kappa s / 2, multiplies d[d s(h)]
  Rational dxi;         // (1 + kappa s / 2)(2/3) s - 5 e^{2 phi}, multiplies d xi
  Rational ds_per_xi;   // d s(h) / xi from the dilaton equation
  Rational kappa_ds_per_xi;
  Rational xi_final;    // coefficient of xi in the linearized trace equation
  Rational lemma_ric;   // 1 + kappa s / 3, multiplies d Ric(h)
  Rational lemma_h;     // -(e^{2 phi} / 2 + kappa s^2 / 18), multiplies h
  Rational ricci_rate;  // d Ric(h) = ricci_rate h
  std::vector<ChainCoefficient> steps;

  bool consistent() const;
};

EssentialChain essential_chain(const SolitonParams& params);

// --- Infinitesimal Einstein operator --------------------------------------------

template <class T>
struct EinsteinDeformation {
  Sym2<T> residual;          // nabla* nabla h - 2 R0(h)
  Sym2<T> reduction_defect;  // lin_ricci(h) - (1/2)(nabla* nabla h + (2/3) s h - 2 R0(h))
};

// tr h to second order and nabla* h to first order at p.
template <class T>
std::vector<T> tt_constraints(const LinearizationPacket<T>& L) {
  std::vector<T> c{L.tr_h};
  for (int a = 0; a < 3; ++a) c.push_back(L.d_tr_h[a]);
  for (const T& x : L.hess_tr_h.upper()) c.push_back(x);
  for (int a = 0; a < 3; ++a) c.push_back(L.div_h[a]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c.push_back(L.grad_div_h(i, j));
  return c;
}

// lin_ricci differentiates nabla* h once and tr h twice, so both must vanish
// to that order at p for the reduction to hold.
template <class T>
EinsteinDeformation<T> einstein_def_residual(const LinearizationPacket<T>& L) {
  require_einstein(L.geo);
  double scale = std::max(1.0, max_abs(L.h));
  for (const T& c : tt_constraints(L))
    if (!near_zero(c, scale, 1e-9))
      throw Error(ErrorKind::NotTT, "deformation is not transverse-traceless to the needed order at the point");
  const T& s = L.geo.s;
  EinsteinDeformation<T> out;
  out.residual = L.rough_laplacian - T(2) * L.r0;
  Sym2<T> reduced = L.rough_laplacian + T(T(2) * s / T(3)) * L.h - T(2) * L.r0;
  out.reduction_defect = L.lin_ricci - T(T(1) / T(2)) * reduced;
  return out;
}

template <class T>
EinsteinDeformation<T> einstein_def_residual(const ChartGeometry& chart, const SymField& h, const Point<T>& p) {
  return einstein_def_residual(linearization(chart, h, p));
}

// Polynomial h' agreeing with h up to a correction of degree <= 2 in (x - p)
// such that tr h' vanishes to second order and nabla* h' to first order at p.
SymField project_tt_at(const ChartGeometry& chart, const SymField& h, const Point<Rational>& p);

}  // namespace hetsol
