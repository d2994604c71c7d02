#include <doctest.h>

#include "hetsol/random.hpp"
#include "hetsol/soliton.hpp"

using namespace hetsol;
using Q = Rational;

namespace {

// Constant curvature -4/kappa with constant weight 48/kappa.
ChartGeometry hyperbolic_soliton_chart(const Q& kappa) {
  return poincare_ball_chart(Q(kappa / 4))
      .with_dilaton(DilatonField::exp2phi(FieldExpr::constant(Q(48 / kappa))));
}

bool is_zero(const Trilinear<Q>& t) {
  for (const auto& x : t.c)
    if (x != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("hyperbolic background solves both formulations") {
  for (Q kappa : {Q(1), Q(2), ratio(1, 3), ratio(7, 5)}) {
    ChartGeometry c = hyperbolic_soliton_chart(kappa);
    SolitonParams params(kappa);
    Rng rng(1);
    for (int k = 0; k < 3; ++k) {
      Point<Q> p = random_point_in_ball(rng, Q(1));
      auto pg = point_geometry(c, p);
      CHECK(pg.geo.s == -24 / kappa);
      for (const auto& r : {residuals(pg, params), residuals_v2(pg, params)}) {
        CHECK(r.E_norm2 == 0);
        CHECK(r.YM_norm2 == 0);
        CHECK(r.D_norm2 == 0);
      }
      auto rf = residuals(c, cast_point<double>(p), params);
      CHECK(std::sqrt(rf.E_norm2) < 1e-10);
      CHECK(std::sqrt(rf.YM_norm2) < 1e-10);
      CHECK(std::abs(rf.D) < 1e-10);
    }
  }
}

TEST_CASE("flat data is never a soliton") {
  Q c(5, 2);
  ChartGeometry e = euclidean_chart().with_dilaton(DilatonField::exp2phi(FieldExpr::constant(c)));
  auto r = residuals(e, Point<Q>{Q(1), Q(2), Q(3)}, SolitonParams(Q(1)));
  CHECK(r.E_norm2 == Q(3) * c * c / 4);
  CHECK(r.D == -c);
  CHECK(r.YM_norm2 == 0);
}

TEST_CASE("poincare ball with the soliton weight has the predicted einstein defect") {
  ChartGeometry c = poincare_ball_chart().with_dilaton(DilatonField::exp2phi(FieldExpr::constant(48)));
  auto pg = point_geometry(c, Point<Q>{ratio(1, 3), ratio(-1, 4), Q(0)});
  auto r = residuals(pg, SolitonParams(Q(1)));
  CHECK(r.E == Q(-24) * pg.geo.metric.g());
  // D = -48 + |R|^2 with |R|^2 = s^2/12 = 3.
  CHECK(r.D == -45);
}

TEST_CASE("the two formulations are related off-shell") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    ChartGeometry c = random_rational_chart(rng);
    SolitonParams params(rng.positive_rational() * (rng.integer(0, 1) ? 1 : -1));
    Point<Q> p = random_point_in_ball(rng, c.radius());
    auto pg = point_geometry(c, p);
    auto r1 = residuals(pg, params);
    auto r2 = residuals_v2(pg, params);
    const auto& g = pg.geo.metric;
    Q trE = g.trace(r1.E);
    CHECK(r2.D == trE - 2 * r1.D);
    CHECK(r2.E == r1.E - Q((trE + r1.D) / 3) * g.g());
    CHECK(r2.YM.c == r1.YM.c);
    CHECK(ym_trace_identity(pg) == Vec3<Q>{0, 0, 0});
    CHECK(scalar_identity(pg, params) == 0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int d = 0; d < 3; ++d) CHECK(r1.YM(a, b, d) == -r1.YM(a, d, b));

    auto pf = point_geometry(c, cast_point<double>(p));
    auto f1 = residuals(pf, params);
    auto f2 = residuals_v2(pf, params);
    CHECK(std::abs(f2.D - (pf.geo.metric.trace(f1.E) - 2 * f1.D)) < 1e-9);
    CHECK(max_abs(ym_trace_identity(pf)) < 1e-9);
    CHECK(std::abs(scalar_identity(pf, params)) < 1e-9);
  }
}

TEST_CASE("trace identity with a polynomial dilaton on the ball") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    ChartGeometry c = poincare_ball_chart().with_dilaton(DilatonField::phi(FieldExpr(random_polynomial(rng, 3))));
    auto pg = point_geometry(c, random_point_in_ball(rng, Q(1)));
    CHECK(ym_trace_identity(pg) == Vec3<Q>{0, 0, 0});
    CHECK(is_zero(pg.der.div_R));
  }
  ChartGeometry flat = hyperbolic_soliton_chart(Q(1));
  CHECK(ym_trace_identity(flat, Point<Q>{Q(0), ratio(1, 2), Q(0)}) == Vec3<Q>{0, 0, 0});
}

TEST_CASE("scalar identity on flat data") {
  Q c(3);
  ChartGeometry e = euclidean_chart().with_dilaton(DilatonField::exp2phi(FieldExpr::constant(c)));
  Point<Q> p{Q(0), Q(0), Q(0)};
  auto r = residuals(e, p, SolitonParams(Q(1)));
  CHECK(r.E(0, 0) + r.E(1, 1) + r.E(2, 2) + r.D == Q(-5) * c / 2);
  CHECK(scalar_identity(e, p, SolitonParams(Q(1))) == 0);
}

TEST_CASE("constant dilaton classification") {
  auto r = classify_constant_dilaton(SolitonParams(Q(1)));
  CHECK(r.s == -24);
  CHECK(r.e2phi == 48);
  CHECK(r.ricci_factor == -8);
  CHECK(r.hyperbolic_residue == 0);
  CHECK(r.product_zero_residue == 0);
  CHECK(r.product_defect == -2);
  CHECK(eigenvalue_quadratic(Q(1), Q(-24), Q(-8)) == 0);
  CHECK_FALSE(r.nonpositive_dilaton);

  auto r2 = classify_constant_dilaton(SolitonParams(Q(2)));
  CHECK(r2.s == -12);
  CHECK(r2.e2phi == 24);
  CHECK(r2.product_defect == -1);

  Rng rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    Q k = rng.positive_rational(20, 9);
    auto rk = classify_constant_dilaton(SolitonParams(k));
    CHECK(k * rk.s == -24);
    CHECK(k * rk.e2phi == 48);
    CHECK(k * rk.ricci_factor == -8);
    CHECK(rk.hyperbolic_residue == 0);
    CHECK(k * rk.product_defect == -2);
  }

  CHECK(classify_constant_dilaton(SolitonParams(Q(-1))).nonpositive_dilaton);
  try {
    SolitonParams bad(Q(0));
    FAIL("expected InvalidKappa");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidKappa);
  }
}

TEST_CASE("harmonic dilaton test") {
  SolitonParams params(Q(1));
  SUBCASE("hyperbolic background has empty U") {
    ChartGeometry c = hyperbolic_soliton_chart(Q(1));
    std::vector<Point<Q>> pts{{Q(0), Q(0), Q(0)}, {ratio(1, 3), Q(0), ratio(1, 5)}};
    HarmonicReport r = harmonic_dilaton_test(c, pts, params);
    CHECK(r.pass());
    CHECK(r.samples_in_U == 0);
    CHECK(r.regime == "U empty, vacuously hyperbolic regime");
  }
  SUBCASE("synthetic canonical data passes") {
    Q s(-1);
    std::vector<HarmonicSample<Q>> samples;
    for (int t = 1; t <= 3; ++t) {
      Q tt(t);
      // W chosen so that f = |d phi|^2 - (5/2) W equals -s - (3/4) s^2.
      Q w = Q(2) * (tt * tt + s + Q(3) * s * s / 4) / 5;
      samples.push_back({Metric3<Q>(Sym2<Q>::identity()), Sym2<Q>::diag(0, s / 2, s / 2), s, Vec3<Q>{tt, 0, 0}, w, {}});
    }
    HarmonicReport r = harmonic_dilaton_test(samples, params);
    CHECK(r.pass());
    CHECK(r.samples_in_U == 3);
    CHECK(r.f_value.has_value());
    CHECK(*r.f_value == doctest::Approx(r.f_expected));
  }
  SUBCASE("synthetic data with Ric(d phi) != 0 is flagged") {
    std::vector<HarmonicSample<Q>> samples{
        {Metric3<Q>(Sym2<Q>::identity()), Sym2<Q>::diag(1, 2, 2), Q(5), Vec3<Q>{1, 0, 0}, Q(1), {}}};
    HarmonicReport r = harmonic_dilaton_test(samples, params);
    CHECK_FALSE(r.pass());
    REQUIRE(r.first_violation.has_value());
    CHECK(r.first_violation->name == "ricci_kills_dphi");
  }
  SUBCASE("non-harmonic chart is rejected") {
    Rng rng(3);
    ChartGeometry c = random_rational_chart(rng);
    std::vector<Point<Q>> pts{{Q(0), Q(0), Q(0)}};
    try {
      harmonic_dilaton_test(c, pts, params);
      FAIL("expected NotHarmonic");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotHarmonic);
    }
  }
}
