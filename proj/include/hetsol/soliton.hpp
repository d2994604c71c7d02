#pragma once

// Residuals of the torsionless soliton system in its two equivalent forms,
// the off-shell identities relating them, the constant-dilaton
// classification, and the harmonic-curvature reduction test.

#include <optional>
#include <string>
#include <vector>

#include "hetsol/algebra3.hpp"
#include "hetsol/geometry.hpp"

namespace hetsol {

struct SolitonParams {
  Rational kappa;

  explicit SolitonParams(Rational k) : kappa(std::move(k)) {
    if (sgn(kappa) == 0) throw Error(ErrorKind::InvalidKappa, "kappa must be nonzero");
  }
};

template <class T>
struct SolitonResidual {
  Sym2<T> E;
  Trilinear<T> YM;  // antisymmetric in the last two slots
  T D;
  // Squared norms in the induced metrics; the 2-form slots carry a factor 1/2.
  T E_norm2, YM_norm2, D_norm2;
};

template <class T>
T sym_norm2(const Metric3<T>& g, const Sym2<T>& a) {
  return g.inner(a, a);
}

template <class T>
T trilinear_norm2(const Metric3<T>& g, const Trilinear<T>& t) {
  const Sym2<T>& gi = g.inv();
  T acc(0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int x = 0; x < 3; ++x)
          for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z) acc += gi(a, x) * gi(b, y) * gi(c, z) * t(a, b, c) * t(x, y, z);
  return T(acc / T(2));
}

namespace detail {

template <class T>
T require_e2phi(const DerivativePacket<T>& der) {
  if (!der.e2phi)
    throw Error(ErrorKind::InexactEvaluation,
                "e^{2 phi} is not rational here; give the dilaton as a weight or use float mode");
  return *der.e2phi;
}

// R(dphi^#, v1, v2, v3) for R in Curv3 storage.
template <class T>
Trilinear<T> contract_first(const Curv3<T>& R, const Vec3<T>& vec) {
  Trilinear<T> out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        T acc(0);
        for (int m = 0; m < 3; ++m) acc += vec[m] * R(m, a, b, c);
        out(a, b, c) = acc;
      }
  return out;
}

template <class T>
SolitonResidual<T> finish(const Metric3<T>& g, Sym2<T> E, Trilinear<T> YM, T D) {
  SolitonResidual<T> r{std::move(E), std::move(YM), std::move(D), T(0), T(0), T(0)};
  r.E_norm2 = sym_norm2(g, r.E);
  r.YM_norm2 = trilinear_norm2(g, r.YM);
  r.D_norm2 = T(r.D * r.D);
  return r;
}

}  // namespace detail

// E = Ric + nabla d phi - (1/2) e^{2 phi} g + kappa R o R
// YM = d*R + R(d phi)
// D = delta d phi + |d phi|^2 - e^{2 phi} + kappa |R|^2
template <class T>
SolitonResidual<T> residuals(const PointGeometry<T>& pg, const SolitonParams& params) {
  const auto& geo = pg.geo;
  const auto& der = pg.der;
  const Metric3<T>& g = geo.metric;
  const T kappa = cast<T>(params.kappa);
  const T w = detail::require_e2phi(der);

  Sym2<T> E = geo.ric + der.hess_phi;
  E -= T(w / T(2)) * g.g();
  E += kappa * curv_square(g, geo.ric, geo.s);

  Trilinear<T> YM = detail::contract_first(geo.curv, g.raise(der.dphi));
  for (int m = 0; m < 27; ++m) YM.c[m] += der.div_R.c[m];

  T D = T(der.delta_dphi + der.dphi_norm2 - w + kappa * curv_norm(g, geo.ric, geo.s));
  return detail::finish(g, std::move(E), std::move(YM), std::move(D));
}

// E2 = -kappa Ric o Ric + (1 + kappa s) Ric + (1/3)(-s - (3 kappa / 4) s^2 - |d phi|^2 + e^{2 phi}) g + nabla d phi
// YM2 = d*(-g o Ric + (s/4) g o g) + (-g o Ric + (s/4) g o g)(d phi), built from nabla Ric and ds
// D2 = s - 3 delta d phi - 2 |d phi|^2 + (1/2) e^{2 phi}
template <class T>
SolitonResidual<T> residuals_v2(const PointGeometry<T>& pg, const SolitonParams& params) {
  const auto& geo = pg.geo;
  const auto& der = pg.der;
  const Metric3<T>& g = geo.metric;
  const T kappa = cast<T>(params.kappa);
  const T w = detail::require_e2phi(der);
  const T& s = geo.s;

  Sym2<T> E = T(-kappa) * g.compose(geo.ric, geo.ric);
  E += T(T(1) + kappa * s) * geo.ric;
  E += T((-s - T(3) * kappa * s * s / T(4) - der.dphi_norm2 + w) / T(3)) * g.g();
  E += der.hess_phi;

  // Divergence of the Ricci-built curvature: nabla g = 0 leaves only nabla Ric and ds.
  Curv3<T> gg = kn_product(g.g(), g.g());
  std::array<Curv3<T>, 3> dR;
  for (int a = 0; a < 3; ++a) {
    Sym2<T> nr;
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k) nr(j, k) = der.nabla_ric(a, j, k);
    dR[a] = T(der.ds[a] / T(4)) * gg - kn_product(g.g(), nr);
  }
  Trilinear<T> YM = detail::contract_first(riemann_from_ricci(g, geo.ric, s), g.raise(der.dphi));
  for (int v1 = 0; v1 < 3; ++v1)
    for (int v2 = 0; v2 < 3; ++v2)
      for (int v3 = 0; v3 < 3; ++v3) {
        T acc(0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) acc += g.inv()(a, b) * dR[a](b, v1, v2, v3);
        YM(v1, v2, v3) -= acc;
      }

  T D = T(s - T(3) * der.delta_dphi - T(2) * der.dphi_norm2 + w / T(2));
  return detail::finish(g, std::move(E), std::move(YM), std::move(D));
}

template <class T>
SolitonResidual<T> residuals(const ChartGeometry& chart, const Point<T>& p, const SolitonParams& params) {
  return residuals(point_geometry(chart, p), params);
}

template <class T>
SolitonResidual<T> residuals_v2(const ChartGeometry& chart, const Point<T>& p, const SolitonParams& params) {
  return residuals_v2(point_geometry(chart, p), params);
}

// g^{ab} YM(a, b, .) - (Ric(d phi) - (1/2) ds); vanishes for every (g, phi).
template <class T>
Vec3<T> ym_trace_identity(const PointGeometry<T>& pg) {
  const auto& g = pg.geo.metric;
  Trilinear<T> YM = detail::contract_first(pg.geo.curv, g.raise(pg.der.dphi));
  for (int m = 0; m < 27; ++m) YM.c[m] += pg.der.div_R.c[m];
  Vec3<T> ric_dphi = pg.geo.ric.apply(g.raise(pg.der.dphi));
  Vec3<T> out;
  for (int c = 0; c < 3; ++c) {
    T tr(0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) tr += g.inv()(a, b) * YM(a, b, c);
    out[c] = T(tr - (ric_dphi[c] - pg.der.ds[c] / T(2)));
  }
  return out;
}

template <class T>
Vec3<T> ym_trace_identity(const ChartGeometry& chart, const Point<T>& p) {
  return ym_trace_identity(point_geometry(chart, p));
}

// s + |d phi|^2 - (5/2) e^{2 phi} + 3 kappa |R|^2 - (tr_g E + D); vanishes for every (g, phi).
template <class T>
T scalar_identity(const PointGeometry<T>& pg, const SolitonParams& params) {
  SolitonResidual<T> r = residuals(pg, params);
  const auto& geo = pg.geo;
  const T kappa = cast<T>(params.kappa);
  const T w = *pg.der.e2phi;
  T lhs = T(geo.s + pg.der.dphi_norm2 - T(5) * w / T(2) + T(3) * kappa * curv_norm(geo.metric, geo.ric, geo.s));
  return T(lhs - (geo.metric.trace(r.E) + r.D));
}

template <class T>
T scalar_identity(const ChartGeometry& chart, const Point<T>& p, const SolitonParams& params) {
  return scalar_identity(point_geometry(chart, p), params);
}

// --- Constant dilaton ------------------------------------------------------

// kappa l^2 - (1 + kappa s) l + (kappa/4) s^2 + s: every Ricci eigenvalue of a
// constant-dilaton soliton is a root.
inline Rational eigenvalue_quadratic(const Rational& kappa, const Rational& s, const Rational& lambda) {
  return kappa * lambda * lambda - (1 + kappa * s) * lambda + (kappa / 4 * s * s + s);
}

struct ClassificationReport {
  enum class Branch { Hyperbolic, ProductExcluded };
  Branch branch = Branch::Hyperbolic;
  Rational kappa;
  Rational s;
  Rational e2phi;
  Rational ricci_factor;
  Rational hyperbolic_residue;  // quadratic at the hyperbolic eigenvalue
  Rational product_s;
  Rational product_mu;
  Rational product_zero_residue;  // quadratic at the eigenvalue 0 of the product branch
  Rational product_defect;        // quadratic at mu: nonzero, so the branch is empty
  bool nonpositive_dilaton = false;  // kappa < 0 forces e^{2 phi} < 0
};

ClassificationReport classify_constant_dilaton(const SolitonParams& params);

// --- Harmonic curvature ----------------------------------------------------

template <class T>
struct HarmonicSample {
  Metric3<T> g;
  Sym2<T> ric;
  T s;
  Vec3<T> dphi;  // covector
  T e2phi;
  Trilinear<T> div_R;  // zero for synthetic algebraic data
};

struct HarmonicStep {
  std::string name;
  std::size_t sample;
  double defect;
  bool pass;
};

struct HarmonicReport {
  std::size_t samples = 0;
  std::size_t samples_in_U = 0;  // points with d phi != 0
  std::string regime;
  std::vector<HarmonicStep> steps;
  std::optional<HarmonicStep> first_violation;
  std::optional<double> f_value;
  double f_expected = 0;
  bool pass() const { return !first_violation; }
};

template <class T>
HarmonicSample<T> harmonic_sample(const ChartGeometry& chart, const Point<T>& p) {
  PointGeometry<T> pg = point_geometry(chart, p);
  return {pg.geo.metric, pg.geo.ric, pg.geo.s, pg.der.dphi, detail::require_e2phi(pg.der), pg.der.div_R};
}

// Runs the algebraic chain of the harmonic-curvature argument at each sample
// where d phi != 0: Ric(d phi) = 0, eigenvalue s/2 orthogonal to d phi, the
// reconstruction Ric = (s/2)(g - u (x) u), |Ric|^2 = s^2/2, and
// f = |d phi|^2 - (5/2) e^{2 phi} = -s - (3 kappa/4) s^2 constant across samples.
template <class T>
HarmonicReport harmonic_dilaton_test(const std::vector<HarmonicSample<T>>& samples, const SolitonParams& params,
                                     double tol = 1e-9) {
  HarmonicReport rep;
  rep.samples = samples.size();
  const T kappa = cast<T>(params.kappa);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (const auto& x : samples[i].div_R.c)
      if (!near_zero(x, 1.0, tol))
        throw Error(ErrorKind::NotHarmonic, "d*R != 0 at sample " + std::to_string(i));

  auto record = [&](const std::string& name, std::size_t i, const T& defect, double scale) {
    bool ok = near_zero(defect, scale, tol);
    HarmonicStep st{name, i, std::abs(to_double(defect)), ok};
    rep.steps.push_back(st);
    if (!ok && !rep.first_violation) rep.first_violation = st;
    return ok;
  };

  std::optional<T> f_first;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& sm = samples[i];
    const Metric3<T>& g = sm.g;
    double scale = std::max({std::abs(to_double(sm.s)), max_abs(sm.dphi), max_abs(sm.ric)});
    T n2 = g.norm2_covector(sm.dphi);
    if (near_zero(n2, scale * scale, tol)) continue;
    ++rep.samples_in_U;

    // Ric(d phi) = 0: the trace identity with constant s.
    Vec3<T> rd = sm.ric.apply(g.raise(sm.dphi));
    T worst(0);
    for (int a = 0; a < 3; ++a)
      if (std::abs(to_double(rd[a])) > std::abs(to_double(worst))) worst = rd[a];
    if (!record("ricci_kills_dphi", i, worst, scale * scale)) break;

    // d phi ^ ((s/2) v - Ric(v)) = 0 for every v.
    worst = T(0);
    for (int m = 0; m < 3; ++m) {
      Vec3<T> w;
      for (int a = 0; a < 3; ++a) w[a] = T(sm.s / T(2) * g.g()(m, a) - sm.ric(m, a));
      for (const auto& x : wedge(sm.dphi, w))
        if (std::abs(to_double(x)) > std::abs(to_double(worst))) worst = x;
    }
    if (!record("orthogonal_eigenvalue_half_s", i, worst, scale * scale)) break;

    HarmonicReduction<T> red;
    try {
      red = harmonic_ricci_reduction(g, sm.ric, sm.dphi, sm.s, tol);
      record("ricci_reconstruction", i, T(0), scale);
    } catch (const Error&) {
      record("ricci_reconstruction", i, T(1), 0.0);
      break;
    }
    if (!record("ricci_norm_half_s_squared", i, T(red.ricci_norm2 - sm.s * sm.s / T(2)), scale * scale)) break;

    T f = T(n2 - T(5) * sm.e2phi / T(2));
    T expected = T(-sm.s - T(3) * kappa * sm.s * sm.s / T(4));
    double fscale = std::max({1.0, std::abs(to_double(f)), std::abs(to_double(expected))});
    if (!record("f_equals_curvature_constant", i, T(f - expected), fscale)) break;
    if (!f_first) {
      f_first = f;
      rep.f_value = to_double(f);
      rep.f_expected = to_double(expected);
    } else if (!record("f_constant_across_samples", i, T(f - *f_first), fscale)) {
      break;
    }
  }
  if (rep.samples_in_U == 0)
    rep.regime = "U empty, vacuously hyperbolic regime";
  else if (rep.pass())
    rep.regime = "d phi != 0 on sampled points; algebraic chain consistent";
  else
    rep.regime = "chain violated at step " + rep.first_violation->name;
  return rep;
}

template <class T>
HarmonicReport harmonic_dilaton_test(const ChartGeometry& chart, const std::vector<Point<T>>& points,
                                     const SolitonParams& params, double tol = 1e-9) {
  std::vector<HarmonicSample<T>> samples;
  for (const auto& p : points) samples.push_back(harmonic_sample(chart, p));
  return harmonic_dilaton_test(samples, params, tol);
}

}  // namespace hetsol
