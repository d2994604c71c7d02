#include "hetsol/random.hpp"

namespace hetsol {

Sym2<Rational> random_sym2(Rng& rng, long max_num) {
  Sym2<Rational> s;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) s(i, j) = rng.rational(max_num);
  return s;
}

Sym2<Rational> random_metric(Rng& rng) {
  Sym2<Rational> s;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) s(i, j) = ratio(rng.integer(-4, 4), 4);
  for (int i = 0; i < 3; ++i) s(i, i) = Rational(rng.integer(3, 6)) + ratio(rng.integer(0, 3), 4);
  return s;
}

Vec3<Rational> random_vec3(Rng& rng, long max_num) {
  return {rng.rational(max_num), rng.rational(max_num), rng.rational(max_num)};
}

Mat3<Rational> random_rational_rotation(Rng& rng) {
  Mat3<Rational> A = Mat3<Rational>::zero();
  Rational a = rng.rational(4, 3), b = rng.rational(4, 3), c = rng.rational(4, 3);
  A(0, 1) = a;
  A(1, 0) = -a;
  A(0, 2) = b;
  A(2, 0) = -b;
  A(1, 2) = c;
  A(2, 1) = -c;
  Mat3<Rational> I = Mat3<Rational>::identity();
  Mat3<Rational> minus = Mat3<Rational>::zero(), plus = Mat3<Rational>::zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      minus(i, j) = I(i, j) - A(i, j);
      plus(i, j) = I(i, j) + A(i, j);
    }
  return minus * plus.inverse();
}

Point<Rational> random_point_in_ball(Rng& rng, const Rational& radius) {
  // Coordinates with |x_i| < radius / 2 lie inside the ball.
  Point<Rational> p;
  for (int i = 0; i < 3; ++i) {
    Rational q = ratio(rng.integer(-99, 99), 200);
    p[i] = q * radius;
  }
  return p;
}

Polynomial random_polynomial(Rng& rng, int max_degree, long max_num, long max_den) {
  std::map<MultiIndex, Rational> terms;
  for (int deg = 0; deg <= max_degree; ++deg)
    for (int i = deg; i >= 0; --i)
      for (int j = deg - i; j >= 0; --j) {
        if (rng.integer(0, 2) == 0) continue;
        terms[{i, j, deg - i - j}] = rng.rational(max_num, max_den);
      }
  return Polynomial(std::move(terms));
}

namespace {

Polynomial small_perturbation(Rng& rng, int terms) {
  std::map<MultiIndex, Rational> t;
  for (int n = 0; n < terms; ++n) {
    int deg = static_cast<int>(rng.integer(0, 2));
    int i = static_cast<int>(rng.integer(0, deg));
    int j = static_cast<int>(rng.integer(0, deg - i));
    t[{i, j, deg - i - j}] += ratio(rng.integer(-2, 2), 40);
  }
  return Polynomial(std::move(t));
}

Polynomial one_plus_r2() {
  std::map<MultiIndex, Rational> t{{{0, 0, 0}, 1}, {{2, 0, 0}, 1}, {{0, 2, 0}, 1}, {{0, 0, 2}, 1}};
  return Polynomial(std::move(t));
}

}  // namespace

ChartGeometry random_rational_chart(Rng& rng) {
  Sym2<Rational> m = random_metric(rng);
  Polynomial den = one_plus_r2();
  SymField g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Polynomial num = Polynomial::constant(m(i, j)) + small_perturbation(rng, 3);
      g[sym_index(i, j)] = FieldExpr(RationalFunction(num, den));
    }
  Polynomial w = Polynomial::constant(Rational(rng.integer(2, 5))) + small_perturbation(rng, 4);
  ChartGeometry chart(g, DilatonField::exp2phi(FieldExpr(w)), ChartGeometry::Domain::Ball, Rational(1, 2));
  chart.set_name("random-rational");
  return chart;
}

SymField random_sym_field(Rng& rng, int max_degree) {
  SymField f;
  for (int m = 0; m < 6; ++m) f[m] = FieldExpr(random_polynomial(rng, max_degree, 3, 4));
  return f;
}

}  // namespace hetsol
