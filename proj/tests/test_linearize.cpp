#include <doctest.h>

#include <cmath>

#include "hetsol/linearize.hpp"
#include "hetsol/random.hpp"
#include "hetsol/fd_linearize.hpp"

using namespace hetsol;
using Q = Rational;

namespace {

double rel_err(const Sym2<double>& a, const Sym2<double>& ref) {
  return max_abs(a - ref) / std::max(max_abs(ref), 1e-300);
}

double rel_err(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

SymField metric_as_field(const ChartGeometry& c) { return c.metric(); }

TrigPolynomial random_trig(Rng& rng, int degree, int terms = 3) {
  TrigPolynomial t = TrigPolynomial::constant(rng.rational(4, 3));
  for (int n = 0; n < terms; ++n) {
    MultiIndex k{int(rng.integer(0, degree)), int(rng.integer(-degree, degree)), int(rng.integer(-degree, degree))};
    if (k[0] == 0 && (k[1] < 0 || (k[1] == 0 && k[2] <= 0))) continue;
    t.add(k, rng.rational(4, 3), rng.rational(4, 3));
  }
  return t;
}

TorusGaugeData random_torus_data(Rng& rng, int degree) {
  TorusGaugeData d{random_metric(rng), {}, {}, random_trig(rng, degree), random_trig(rng, degree)};
  for (auto& f : d.v) f = random_trig(rng, degree);
  for (auto& f : d.h) f = random_trig(rng, degree);
  return d;
}

ChartGeometry torus_chart(const TrigSym& g, const TrigPolynomial& phi) {
  SymField f;
  for (int m = 0; m < 6; ++m) f[m] = FieldExpr(g[m]);
  return ChartGeometry(f, DilatonField::phi(FieldExpr(phi)), ChartGeometry::Domain::Torus);
}

template <std::size_t N>
std::array<FieldExpr, N> as_fields(const std::array<TrigPolynomial, N>& a) {
  std::array<FieldExpr, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = FieldExpr(a[i]);
  return out;
}

}  // namespace

TEST_CASE("conformal direction on flat space is not a curvature variation") {
  ChartGeometry e = euclidean_chart();
  Point<Q> p{Q(1), ratio(-2, 3), Q(5)};
  auto L = linearization(e, metric_as_field(e), p);
  CHECK(L.lin_ricci == Sym2<Q>());
  CHECK(L.lin_scalar == 0);
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = lin_curv_einstein(e, random_sym_field(rng, 3), p);
    CHECK(c.curv_square == Sym2<Q>());
    CHECK(c.curv_norm == 0);
  }
}

TEST_CASE("linearized ricci and scalar curvature match the dual-number pipeline exactly") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    ChartGeometry c = random_rational_chart(rng);
    SymField h = random_sym_field(rng, 2);
    Point<Q> p = random_point_in_ball(rng, c.radius());
    auto L = linearization(c, h, p);
    auto ref = fd::variation_dual(c, h, p);
    CHECK(L.lin_ricci == ref.ric);
    CHECK(L.lin_scalar == ref.s);
    // d s(h) = -g(h, Ric) + tr d Ric(h)
    const auto& g = L.geo.metric;
    CHECK(L.lin_scalar == g.trace(L.lin_ricci) - g.inner(L.h, L.geo.ric));
  }
}

TEST_CASE("lichnerowicz pieces on the poincare ball") {
  ChartGeometry b = poincare_ball_chart();
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    SymField h = random_sym_field(rng, 2);
    Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
    auto L = linearization(b, h, p);
    const auto& g = L.geo.metric;
    // Constant curvature: R0(h) = -(s/6)(h - tr h g).
    CHECK(L.r0 == Q(-L.geo.s / 6) * (L.h - L.tr_h * g.g()));
    CHECK(L.lichnerowicz == L.rough_laplacian + Q(2 * L.geo.s / 3) * L.h - Q(2) * L.r0);
  }
}

TEST_CASE("curvature square and norm variations on einstein backgrounds") {
  Rng rng(44);
  for (Q kappa : {Q(1), Q(3)}) {
    ChartGeometry b = poincare_ball_chart(Q(kappa / 4));
    BackgroundConstants bg = BackgroundConstants::hyperbolic(SolitonParams(kappa));
    for (int trial = 0; trial < 5; ++trial) {
      SymField h = random_sym_field(rng, 2);
      Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
      auto L = linearization(b, h, p);
      auto lc = lin_curv_einstein(bg, b, h, p);
      auto ref = fd::variation_dual(b, h, p);
      CHECK(lc.curv_square == ref.curv_square);
      CHECK(lc.curv_norm == ref.curv_norm);
      const Q& s = L.geo.s;
      CHECK(lc.curv_norm - s / 6 * L.lin_scalar == 0);
      CHECK(L.geo.metric.trace(lc.curv_square) == s / 3 * L.lin_scalar + s * s / 18 * L.tr_h);
    }
  }
}

TEST_CASE("curvature variations match central differences in double") {
  ChartGeometry b = poincare_ball_chart();
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    SymField h = random_sym_field(rng, 2);
    Point<double> p = cast_point<double>(random_point_in_ball(rng, ratio(1, 2)));
    auto L = linearization(b, h, p);
    auto lc = lin_curv_einstein(L);
    auto f1 = fd::variation_fd(b, h, p, 1e-4);
    auto f2 = fd::variation_fd(b, h, p, 5e-5);
    CHECK(rel_err(L.lin_ricci, f1.ric) <= 1e-6);
    CHECK(rel_err(L.lin_scalar, f1.s) <= 1e-6);
    CHECK(rel_err(lc.curv_square, f1.curv_square) <= 1e-6);
    CHECK(rel_err(lc.curv_norm, f1.curv_norm) <= 1e-6);
  }
}

// The same comparison without roundoff: the pipeline runs in exact arithmetic
// with rational steps, so the defect is pure truncation error.
TEST_CASE("curvature variations converge at second order in exact arithmetic") {
  ChartGeometry b = poincare_ball_chart();
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    SymField h = random_sym_field(rng, 2);
    Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
    auto lc = lin_curv_einstein(b, h, p);
    auto f1 = fd::variation_fd(b, h, p, ratio(1, 10000));
    auto f2 = fd::variation_fd(b, h, p, ratio(1, 20000));
    Sym2<double> exact = to_double(lc.curv_square);
    CHECK(rel_err(exact, to_double(f1.curv_square)) <= 1e-6);
    CHECK(rel_err(to_double(lc.curv_norm), to_double(f1.curv_norm)) <= 1e-6);
    double r = max_abs(to_double(Sym2<Q>(lc.curv_square - f1.curv_square))) /
               max_abs(to_double(Sym2<Q>(lc.curv_square - f2.curv_square)));
    CHECK(r >= 3.5);
    CHECK(r <= 4.5);
    double rn = to_double(Q(lc.curv_norm - f1.curv_norm)) / to_double(Q(lc.curv_norm - f2.curv_norm));
    CHECK(rn >= 3.5);
    CHECK(rn <= 4.5);
  }
}

TEST_CASE("non-einstein backgrounds are rejected") {
  Rng rng(2);
  ChartGeometry c = random_rational_chart(rng);
  SymField h = random_sym_field(rng, 1);
  try {
    lin_curv_einstein(c, h, Point<Q>{Q(0), Q(0), Q(0)});
    FAIL("expected NotEinstein");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotEinstein);
  }
  BackgroundConstants bg = BackgroundConstants::hyperbolic(SolitonParams(Q(1)));
  try {
    lin_curv_einstein(bg, poincare_ball_chart(), h, Point<Q>{Q(0), Q(0), Q(0)});
    FAIL("expected NotEinstein");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotEinstein);
  }
}

TEST_CASE("gauge image of a killing field on the flat torus") {
  ChartGeometry t = flat_torus_chart(Q(2), Q(3), ratio(1, 2));
  TrigPolynomial phi = TrigPolynomial::cosine({1, 0, 0}, Q(1)) + TrigPolynomial::sine({0, 1, 1}, Q(2));
  t = t.with_dilaton(DilatonField::phi(FieldExpr(phi)));
  VecField v{FieldExpr::constant(1), FieldExpr::constant(-2), FieldExpr::constant(3)};
  Point<double> p{0.3, 1.1, -2.0};
  auto im = gauge_image(t, v, p);
  CHECK(max_abs(im.lie_g) == 0);
  double expected = -std::sin(0.3) * 1 + 2 * std::cos(1.1 - 2.0) * (-2 + 3);
  CHECK(im.dphi_v == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("gauge operators are L2 adjoint on the torus") {
  Rng rng(70);
  for (int trial = 0; trial < 10; ++trial) {
    TorusGaugeData d = random_torus_data(rng, 2);
    TorusPairing r = torus_gauge_pairing(d, 5);
    CHECK(r.quadrature_exact);
    CHECK(r.defect == 0);
    CHECK(r.exact_image_side == r.exact_adjoint_side);
  }
  // Too few nodes: the divergence term aliases onto the mean.
  Rng rng2(71);
  bool some_aliasing = false;
  for (int trial = 0; trial < 10; ++trial) {
    TorusGaugeData d = random_torus_data(rng2, 2);
    TorusPairing r = torus_gauge_pairing(d, 2);
    CHECK_FALSE(r.quadrature_exact);
    some_aliasing = some_aliasing || r.defect != 0;
  }
  CHECK(some_aliasing);
}

TEST_CASE("symbolic torus operators agree with the pointwise ones") {
  Rng rng(72);
  TorusGaugeData d = random_torus_data(rng, 2);
  TrigSym g;
  for (int m = 0; m < 6; ++m) g[m] = TrigPolynomial::constant(d.g.upper()[m]);
  ChartGeometry chart = torus_chart(g, d.phi);
  TrigSym lie = lie_derivative_trig(g, d.v);
  for (int trial = 0; trial < 5; ++trial) {
    Point<double> p{rng.uniform(0, 6.3), rng.uniform(0, 6.3), rng.uniform(0, 6.3)};
    auto im = gauge_image(chart, as_fields(d.v), p);
    for (int m = 0; m < 6; ++m) CHECK(im.lie_g.upper()[m] == doctest::Approx(lie[m].evaluate(p)).epsilon(1e-12));
  }
}

TEST_CASE("nodal pairing with a nonconstant torus metric") {
  Rng rng(73);
  TrigSym g;
  Sym2<Q> base = random_metric(rng);
  for (int m = 0; m < 6; ++m) {
    g[m] = TrigPolynomial::constant(base.upper()[m]);
    g[m] = g[m] + ratio(1, 10) * random_trig(rng, 1, 2);
  }
  ChartGeometry chart = torus_chart(g, random_trig(rng, 1));
  TrigVec v;
  TrigSym h;
  for (auto& f : v) f = random_trig(rng, 1);
  for (auto& f : h) f = random_trig(rng, 1);
  NodalPairing r = torus_gauge_pairing_nodal(chart, as_fields(v), as_fields(h), FieldExpr(random_trig(rng, 1)), 16);
  CHECK(r.defect <= 1e-9 * std::max(1.0, std::abs(r.image_side)));
}

TEST_CASE("gauge adjoint of a lie derivative matches finite differences") {
  Rng rng(74);
  TrigSym g;
  Sym2<Q> base = random_metric(rng);
  for (int m = 0; m < 6; ++m) g[m] = TrigPolynomial::constant(base.upper()[m]) + ratio(1, 10) * random_trig(rng, 1, 2);
  ChartGeometry chart = torus_chart(g, random_trig(rng, 1));
  TrigVec v;
  for (auto& f : v) f = random_trig(rng, 2);
  SymField h = as_fields(lie_derivative_trig(g, v));
  for (int trial = 0; trial < 3; ++trial) {
    Point<double> p{rng.uniform(0, 6.3), rng.uniform(0, 6.3), rng.uniform(0, 6.3)};
    Vec3<double> adj = gauge_adjoint(chart, h, FieldExpr::constant(0), p);
    auto fd = fd::fd_einstein_operator(chart, h, p, 1e-4);
    double scale = std::max({1.0, std::abs(adj[0]), std::abs(adj[1]), std::abs(adj[2])});
    for (int j = 0; j < 3; ++j) CHECK(std::abs(adj[j] - 2 * fd.div_h[j]) <= 1e-6 * scale);
  }
}

TEST_CASE("essential deformation coefficient chain") {
  auto c1 = essential_chain(SolitonParams(Q(1)));
  CHECK(c1.consistent());
  CHECK(c1.exterior == -11);
  CHECK(c1.dxi == -64);
  CHECK(c1.ds_per_xi == -24);
  CHECK(c1.kappa_ds_per_xi == -24);
  CHECK(c1.xi_final == 24);
  CHECK(c1.lemma_ric == -7);
  CHECK(c1.lemma_h == -56);
  CHECK(c1.ricci_rate == -8);

  auto c2 = essential_chain(SolitonParams(Q(2)));
  CHECK(c2.consistent());
  std::vector<Q> got{c2.exterior, c2.dxi, c2.ds_per_xi, c2.xi_final, c2.lemma_ric, c2.lemma_h};
  std::vector<Q> want{-11, -32, -12, 12, -7, -28};
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);

  Rng rng(90);
  for (int trial = 0; trial < 50; ++trial) {
    Q k = rng.positive_rational(30, 11);
    auto c = essential_chain(SolitonParams(k));
    CHECK(c.consistent());
    CHECK(k * c.dxi == -64);
    CHECK(c.kappa_ds_per_xi == -24);
    CHECK(k * c.ds_per_xi == -24);
    CHECK(k * c.xi_final == 24);
    CHECK(c.lemma_ric == -7);
    CHECK(k * c.lemma_h == -56);
  }
}

TEST_CASE("infinitesimal einstein operator") {
  ChartGeometry b = poincare_ball_chart();
  Rng rng(15);
  SUBCASE("zero deformation") {
    SymField zero;
    for (auto& f : zero) f = FieldExpr::constant(0);
    auto r = einstein_def_residual(b, zero, Point<Q>{ratio(1, 5), Q(0), Q(0)});
    CHECK(r.residual == Sym2<Q>());
    CHECK(r.reduction_defect == Sym2<Q>());
  }
  SUBCASE("transverse-traceless deformations at a point") {
    for (int trial = 0; trial < 5; ++trial) {
      Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
      SymField h = project_tt_at(b, random_sym_field(rng, 2), p);
      auto L = linearization(b, h, p);
      for (const Q& c : tt_constraints(L)) CHECK(c == 0);
      auto r = einstein_def_residual(L);
      CHECK(r.reduction_defect == Sym2<Q>());
      CHECK(r.residual == L.rough_laplacian + Q(L.geo.s / 3) * L.h);

      auto fd = fd::fd_einstein_operator(b, h, p, ratio(1, 10000));
      Sym2<Q> fd_res = fd.rough_laplacian - Q(2) * fd.r0;
      CHECK(rel_err(to_double(r.residual), to_double(fd_res)) <= 1e-6);
      CHECK(rel_err(to_double(L.r0), to_double(fd.r0)) <= 1e-6);
    }
  }
  SUBCASE("generic deformations are rejected") {
    Point<Q> p{Q(0), ratio(1, 3), Q(0)};
    try {
      einstein_def_residual(b, random_sym_field(rng, 2), p);
      FAIL("expected NotTT");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotTT);
    }
  }
}
