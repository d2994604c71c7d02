#include <doctest.h>

#include "hetsol/algebra3.hpp"
#include "hetsol/random.hpp"
#include "hetsol/index_sums.hpp"

using namespace hetsol;
using Q = Rational;

namespace {

Metric3<Q> identity_metric() { return Metric3<Q>(Sym2<Q>::identity()); }

bool tensors_equal(const index_sum::Tensor4<Q>& a, const index_sum::Tensor4<Q>& b) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          if (a[i][j][k][l] != b[i][j][k][l]) return false;
  return true;
}

}  // namespace

TEST_CASE("kn product of the identity with itself") {
  Sym2<Q> I = Sym2<Q>::identity();
  Curv3<Q> R = kn_product(I, I);
  CHECK(R(0, 1, 0, 1) == 2);
  CHECK(R(0, 1, 1, 0) == -2);
  CHECK(kn_product(I, Sym2<Q>()) == Curv3<Q>());
}

TEST_CASE("kn product matches the four-term formula on all index tuples") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Sym2<Q> A = random_sym2(rng), B = random_sym2(rng);
    Curv3<Q> R = kn_product(A, B);
    CHECK(R == kn_product(B, A));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            Q v = R(i, j, k, l);
            REQUIRE(v == index_sum::kn_four_term(A, B, i, j, k, l));
            REQUIRE(v == -R(j, i, k, l));
            REQUIRE(v == -R(i, j, l, k));
            REQUIRE(v == R(k, l, i, j));
            // First Bianchi identity.
            REQUIRE(Q(v + R(j, k, i, l) + R(k, i, j, l)) == 0);
          }
  }
}

TEST_CASE("ricci contraction of a ricci-built tensor recovers diag(1,2,3)") {
  Metric3<Q> g = identity_metric();
  Sym2<Q> ric = Sym2<Q>::diag(1, 2, 3);
  Curv3<Q> R = riemann_from_ricci(g, ric, Q(6));
  auto [r, s] = ricci_contract(R, g);
  CHECK(r == ric);
  CHECK(s == 6);
  CHECK(index_sum::ricci(index_sum::expand(R), g.inv()) == ric);
  CHECK(riemann_from_ricci(g, Sym2<Q>(), Q(0)) == Curv3<Q>());
  auto zero = ricci_contract(Curv3<Q>(), g);
  CHECK(zero.ric == Sym2<Q>());
  CHECK(zero.s == 0);
}

TEST_CASE("einstein curvature is -(s/12) g o g") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Metric3<Q> g(random_metric(rng));
    Q lambda = rng.rational();
    Q s = 3 * lambda;
    Curv3<Q> R = riemann_from_ricci(g, Sym2<Q>(lambda * g.g()), s);
    CHECK(R == Q(-s / 12) * kn_product(g.g(), g.g()));
    auto back = ricci_contract(R, g);
    CHECK(back.ric == Q(s / 3) * g.g());
    CHECK(back.s == s);
    CHECK(curv_square(g, Sym2<Q>(lambda * g.g()), s) == Q(s * s / 18) * g.g());
    CHECK(curv_norm(g, Sym2<Q>(lambda * g.g()), s) == s * s / 12);
  }
}

TEST_CASE("two-form action") {
  Metric3<Q> g = identity_metric();
  Q lambda(5, 3);
  Sym2<Q> ric = lambda * Sym2<Q>::identity();
  Vec3<Q> e1{1, 0, 0}, e2{0, 1, 0};
  auto w = two_form_action(g, ric, Q(3 * lambda), e1, e2);
  CHECK(w[0] == 0);
  CHECK(w[1] == 0);
  CHECK(w[2] == -lambda / 2);
  auto z = two_form_action(g, ric, Q(3 * lambda), e1, e1);
  CHECK(z == TwoForm<Q>{0, 0, 0});
}

TEST_CASE("curv_square and curv_norm on flat and einstein inputs") {
  Metric3<Q> g = identity_metric();
  CHECK(curv_square(g, Sym2<Q>(), Q(0)) == Sym2<Q>());
  CHECK(curv_norm(g, Sym2<Q>(), Q(0)) == 0);
  Q lambda(-2);
  CHECK(curv_square(g, Sym2<Q>(lambda * g.g()), Q(3 * lambda)) == Q(lambda * lambda / 2) * g.g());
  CHECK(curv_norm(g, Sym2<Q>(lambda * g.g()), Q(3 * lambda)) == Q(3 * lambda * lambda / 4));
}

TEST_CASE("curvature dictionary against brute-force contractions") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Metric3<Q> g(random_metric(rng));
    Sym2<Q> ric = random_sym2(rng);
    Q s = g.trace(ric);
    Curv3<Q> R = riemann_from_ricci(g, ric, s);
    auto full = index_sum::expand(R);
    REQUIRE(tensors_equal(full, index_sum::riemann_from_ricci(g.g(), ric, s)));

    auto back = ricci_contract(R, g);
    REQUIRE(back.ric == ric);
    REQUIRE(back.s == s);
    REQUIRE(index_sum::ricci(full, g.inv()) == ric);

    Sym2<Q> sq = curv_square(g, ric, s);
    REQUIRE(sq == index_sum::curv_square(full, g.inv()));
    Q nrm = curv_norm(g, ric, s);
    REQUIRE(nrm == index_sum::curv_norm(full, g.inv()));
    REQUIRE(nrm == g.trace(sq) / 2);

    Vec3<Q> v1 = random_vec3(rng), v2 = random_vec3(rng);
    REQUIRE(two_form_action(g, ric, s, v1, v2) == index_sum::operator_action(full, v1, v2));
    REQUIRE(R.act(v1, v2) == index_sum::operator_action(full, v1, v2));
  }
}

TEST_CASE("metric caches a consistent inverse") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Metric3<Q> g(random_metric(rng));
    Mat3<Q> prod = g.g().matrix() * g.inv().matrix();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(prod(i, j) == (i == j ? 1 : 0));
    CHECK(g.det() == g.g().matrix().det());
  }
  CHECK_THROWS_AS(Metric3<Q>(Sym2<Q>::diag(1, -1, 1)), Error);
  CHECK_THROWS_AS(Metric3<Q>(Sym2<Q>::diag(1, 1, 0)), Error);
}

TEST_CASE("harmonic ricci reduction") {
  Metric3<Q> g = identity_metric();
  Q s(-6);
  Sym2<Q> ric = Sym2<Q>::diag(0, s / 2, s / 2);
  Vec3<Q> dphi{3, 0, 0};
  auto red = harmonic_ricci_reduction(g, ric, dphi, s);
  CHECK(red.ricci == ric);
  CHECK(red.ricci_norm2 == s * s / 2);

  SUBCASE("rotated frame") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      Mat3<Q> Qm = random_rational_rotation(rng);
      Mat3<Q> check = Qm * Qm.transposed();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(check(i, j) == (i == j ? 1 : 0));
      Sym2<Q> rot = index_sum::conjugate(Qm, ric);
      Vec3<Q> rd = Qm.apply(dphi);
      auto r = harmonic_ricci_reduction(g, rot, rd, s);
      CHECK(r.ricci == rot);
      CHECK(r.ricci_norm2 == s * s / 2);
    }
  }
  SUBCASE("unequal orthogonal eigenvalues") {
    try {
      harmonic_ricci_reduction(g, Sym2<Q>::diag(0, 1, 2), Vec3<Q>{1, 0, 0}, Q(3));
      FAIL("expected a precondition violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PreconditionViolated);
    }
  }
  SUBCASE("dphi in the kernel fails") {
    CHECK_THROWS_AS(harmonic_ricci_reduction(g, Sym2<Q>::diag(1, 0, 0), Vec3<Q>{1, 0, 0}, Q(1)), Error);
    CHECK_THROWS_AS(harmonic_ricci_reduction(g, ric, Vec3<Q>{0, 0, 0}, s), Error);
  }
}

TEST_CASE("eigen report sorts and normalizes") {
  Sym2<double> g = Sym2<double>::diag(1, 4, 1);
  Sym2<double> ric = Sym2<double>::diag(3, -8, 1);
  EigenReport r = eigen_report(g, ric);
  CHECK(r.eigenvalues[0] == doctest::Approx(-2));
  CHECK(r.eigenvalues[1] == doctest::Approx(1));
  CHECK(r.eigenvalues[2] == doctest::Approx(3));
  CHECK(r.eigenvectors[0][1] == doctest::Approx(0.5));

  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Sym2<double> gg = to_double(random_metric(rng));
    Sym2<double> rr = to_double(random_sym2(rng));
    EigenReport e = eigen_report(gg, rr);
    CHECK(e.eigenvalues[0] <= e.eigenvalues[1]);
    CHECK(e.eigenvalues[1] <= e.eigenvalues[2]);
    for (int k = 0; k < 3; ++k) {
      Vec3<double> v{e.eigenvectors[k][0], e.eigenvectors[k][1], e.eigenvectors[k][2]};
      Vec3<double> lhs = rr.apply(v), rhs = gg.apply(v);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(lhs[i] - e.eigenvalues[k] * rhs[i]) < 1e-10);
      for (int m = 0; m < 3; ++m) {
        Vec3<double> w{e.eigenvectors[m][0], e.eigenvectors[m][1], e.eigenvectors[m][2]};
        CHECK(std::abs(dot(v, gg.apply(w)) - (k == m ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}
