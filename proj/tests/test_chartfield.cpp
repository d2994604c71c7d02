#include <doctest.h>

#include "hetsol/geometry.hpp"
#include "hetsol/random.hpp"
#include "hetsol/fd_oracle.hpp"

using namespace hetsol;
using Q = Rational;

namespace {

Point<Q> origin() { return {Q(0), Q(0), Q(0)}; }

Polynomial monomial(int i, int j, int k, const Q& c) { return Polynomial({{{i, j, k}, c}}); }

bool is_zero(const Trilinear<Q>& t) {
  for (const auto& x : t.c)
    if (x != 0) return false;
  return true;
}

ChartGeometry perturbed_euclidean(Rng& rng) {
  SymField g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Polynomial p = ratio(1, 10) * random_polynomial(rng, 2, 1, 4);
      if (i == j) p = p + Polynomial::constant(1);
      g[sym_index(i, j)] = FieldExpr(p);
    }
  ChartGeometry c(g, DilatonField::phi(FieldExpr(random_polynomial(rng, 3, 2, 3))), ChartGeometry::Domain::Ball,
                  ratio(1, 8));
  return c;
}

}  // namespace

TEST_CASE("euclidean chart is flat") {
  ChartGeometry e = euclidean_chart();
  Point<Q> p{Q(3), ratio(-1, 2), Q(7)};
  auto pg = point_geometry(e, p);
  for (const auto& x : pg.geo.christoffel) CHECK(x == 0);
  CHECK(pg.geo.curv == Curv3<Q>());
  CHECK(pg.geo.s == 0);
  CHECK(is_zero(bianchi_residual(e, p)));

  auto fd = fd::fd_oracle<double>(e, cast_point<double>(p), 1e-4);
  CHECK(fd::packet_defect(fd, fd::fd_oracle<double>(e, cast_point<double>(p), 1e-3)) < 1e-12);
  CHECK(std::abs(fd.geo.s) < 1e-12);
  CHECK(max_abs(fd.geo.curv.op()) < 1e-12);
}

TEST_CASE("poincare ball at the origin") {
  ChartGeometry b = poincare_ball_chart();
  auto geo = geometry_packet(b, origin());
  CHECK(geo.s == -6);
  CHECK(geo.ric == Q(-2) * geo.metric.g());
  auto rs = ricci_contract(geo.curv, geo.metric);
  CHECK(rs.ric == geo.ric);
  CHECK(rs.s == geo.s);

  auto fd = fd::fd_oracle<double>(b, {0.0, 0.0, 0.0}, 1e-4);
  CHECK(std::abs(fd.geo.s + 6) < 1e-6);
}

TEST_CASE("poincare ball is einstein with divergence-free curvature at random points") {
  ChartGeometry b = poincare_ball_chart();
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    Point<Q> p = random_point_in_ball(rng, Q(1));
    auto pg = point_geometry(b, p);
    CHECK(pg.geo.s == -6);
    CHECK(pg.geo.ric == Q(-2) * pg.geo.metric.g());
    CHECK(is_zero(pg.der.div_R));
    CHECK(is_zero(bianchi_residual(pg.der)));
  }
}

TEST_CASE("dilaton derivatives") {
  SUBCASE("constant dilaton") {
    ChartGeometry c = poincare_ball_chart().with_dilaton(DilatonField::phi(FieldExpr::constant(ratio(3, 2))));
    auto der = derivative_packet(c, Point<Q>{ratio(1, 3), Q(0), ratio(-1, 5)});
    CHECK(der.hess_phi == Sym2<Q>());
    CHECK(der.delta_dphi == 0);
    CHECK(der.dphi_norm2 == 0);
    CHECK_FALSE(der.e2phi.has_value());
  }
  SUBCASE("flat hessian of x1^2") {
    ChartGeometry c = euclidean_chart().with_dilaton(DilatonField::phi(FieldExpr(monomial(2, 0, 0, 1))));
    auto der = derivative_packet(c, Point<Q>{Q(2), Q(1), Q(-1)});
    CHECK(der.hess_phi == Sym2<Q>::diag(2, 0, 0));
    CHECK(der.delta_dphi == -2);
    CHECK(der.dphi_norm2 == 16);
  }
  SUBCASE("weight form") {
    // W = 1 + x1 gives phi = log(1 + x1) / 2.
    Polynomial w = Polynomial::constant(1) + monomial(1, 0, 0, 1);
    ChartGeometry c = euclidean_chart().with_dilaton(DilatonField::exp2phi(FieldExpr(w)));
    auto der = derivative_packet(c, Point<Q>{Q(1), Q(0), Q(0)});
    CHECK(der.dphi[0] == ratio(1, 4));
    CHECK(der.hess_phi(0, 0) == ratio(-1, 8));
    CHECK(*der.e2phi == 2);
  }
}

TEST_CASE("exact packet agrees with finite differences on perturbed euclidean charts") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    ChartGeometry c = perturbed_euclidean(rng);
    Point<Q> p = random_point_in_ball(rng, ratio(1, 8));
    auto exact = point_geometry(c, p);
    auto fd_float = fd::fd_oracle<double>(c, cast_point<double>(p), 1e-4);
    PointGeometry<double> closed{
        {Metric3<double>(to_double(exact.geo.metric.g())), {}, Curv3<double>(to_double(exact.geo.curv.op())),
         to_double(exact.geo.ric), to_double(exact.geo.s)},
        {}};
    for (int m = 0; m < 27; ++m) closed.geo.christoffel[m] = to_double(exact.geo.christoffel[m]);
    CHECK(fd::packet_defect(fd_float, closed, false) < 1e-6);

    auto fd_exact = fd::fd_oracle<Q>(c, p, ratio(1, 10000));
    CHECK(fd::packet_defect(fd_exact, exact) < 1e-6);
  }
}

TEST_CASE("poincare ball with polynomial dilaton agrees with finite differences") {
  Rng rng(5);
  ChartGeometry b = poincare_ball_chart();
  for (int trial = 0; trial < 3; ++trial) {
    ChartGeometry c = b.with_dilaton(DilatonField::phi(FieldExpr(random_polynomial(rng, 3))));
    Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
    auto exact = point_geometry(c, p);
    CHECK(is_zero(exact.der.div_R));
    CHECK(exact.der.delta_dphi == -exact.geo.metric.trace(exact.der.hess_phi));
    auto fd = fd::fd_oracle<Q>(c, p, ratio(1, 10000));
    CHECK(fd::packet_defect(fd, exact) < 1e-6);
  }
}

TEST_CASE("contracted bianchi identity on random rational charts") {
  Rng rng(2);
  for (int chart = 0; chart < 20; ++chart) {
    ChartGeometry c = random_rational_chart(rng);
    for (int k = 0; k < 5; ++k) {
      Point<Q> p = random_point_in_ball(rng, c.radius());
      auto pg = point_geometry(c, p);
      REQUIRE(is_zero(bianchi_residual(pg.der)));
      REQUIRE(pg.der.delta_dphi + pg.geo.metric.trace(pg.der.hess_phi) == 0);
      auto rs = ricci_contract(pg.geo.curv, pg.geo.metric);
      REQUIRE(rs.ric == pg.geo.ric);
      REQUIRE(rs.s == pg.geo.s);
      // Antisymmetry patterns.
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int d = 0; d < 3; ++d) {
            REQUIRE(pg.der.div_R(a, b, d) == -pg.der.div_R(a, d, b));
            REQUIRE(pg.der.d_ric(a, b, d) == -pg.der.d_ric(b, a, d));
          }

      auto fl = point_geometry(c, cast_point<double>(p));
      CHECK(max_abs(bianchi_residual(fl.der)) < 1e-9);
    }
  }
}

TEST_CASE("finite differences converge at second order") {
  Rng rng(8);
  for (int chart = 0; chart < 20; ++chart) {
    ChartGeometry c = random_rational_chart(rng);
    Point<Q> p = random_point_in_ball(rng, c.radius());
    auto exact = point_geometry(c, p);
    double e1 = fd::packet_defect(fd::fd_oracle<Q>(c, p, ratio(1, 100)), exact);
    double e2 = fd::packet_defect(fd::fd_oracle<Q>(c, p, ratio(1, 200)), exact);
    double ratio_ = e1 / e2;
    CHECK(ratio_ >= 3.5);
    CHECK(ratio_ <= 4.5);
  }
}

TEST_CASE("chart errors") {
  ChartGeometry b = poincare_ball_chart();
  try {
    fd::fd_oracle<Q>(b, Point<Q>{ratio(9, 10), Q(0), Q(0)}, ratio(1, 10));
    FAIL("expected a stencil error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StencilOutOfDomain);
  }
  try {
    geometry_packet(b, Point<Q>{Q(1), Q(0), Q(0)});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideDomain);
  }
  SymField g;
  for (int i = 0; i < 6; ++i) g[i] = FieldExpr::constant(0);
  g[sym_index(0, 0)] = FieldExpr(RationalFunction(Polynomial::constant(1), monomial(1, 0, 0, 1)));
  g[sym_index(1, 1)] = g[sym_index(2, 2)] = FieldExpr::constant(1);
  ChartGeometry pole(g, DilatonField{}, ChartGeometry::Domain::Ball, Q(5));
  try {
    geometry_packet(pole, origin());
    FAIL("expected a pole");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PoleAtPoint);
  }
  g[sym_index(0, 0)] = monomial(1, 0, 0, 1);
  ChartGeometry degenerate(g, DilatonField{}, ChartGeometry::Domain::Ball, Q(5));
  try {
    geometry_packet(degenerate, Point<Q>{Q(-1), Q(0), Q(0)});
    FAIL("expected a singular metric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMetric);
  }
}

TEST_CASE("chart json round trip") {
  Rng rng(4);
  ChartGeometry c = random_rational_chart(rng);
  ChartGeometry back = ChartGeometry::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  Point<Q> p{ratio(1, 7), ratio(-1, 9), ratio(1, 5)};
  CHECK(geometry_packet(back, p).ric == geometry_packet(c, p).ric);

  auto j = nlohmann::json::parse(R"({"domain":"ball","radius":"1/2",
    "metric":{"11":{"class":"polynomial","coefficients":{"0,0,0":"2","2,0,0":"1/3"}},"12":0,"13":0,"22":1,"23":0,"33":1},
    "dilaton":{"phi":{"class":"polynomial","coefficients":{"1,0,0":1}}}})");
  ChartGeometry parsed = ChartGeometry::from_json(j);
  CHECK(parsed.radius() == ratio(1, 2));
  CHECK(parsed.metric_values(origin())(0, 0) == 2);

  auto bad = nlohmann::json::parse(R"({"metric":{"11":1}})");
  try {
    ChartGeometry::from_json(bad);
    FAIL("expected malformed config");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedConfig);
    CHECK(std::string(e.what()).find("chart.metric") != std::string::npos);
  }
}
