#include <doctest.h>

#include <chrono>

#include "hetsol/homgeo.hpp"
#include "hetsol/random.hpp"
#include "oracle/lie_oracle.hpp"

using namespace hetsol;
using Q = Rational;

namespace {

const std::vector<FamilySpec>& catalogue() {
  static const std::vector<FamilySpec> cat = load_catalogue(HETSOL_DEFAULT_CATALOGUE);
  return cat;
}

LieFamily<Q> empty_family(const Vec3<Q>& d) {
  LieFamily<Q> f;
  f.c.fill(Q(0));
  f.d = d;
  return f;
}

void set_bracket(LieFamily<Q>& f, int i, int j, int k, const Q& v) {
  f.c[bracket_index(i, j, k)] = v;
  f.c[bracket_index(j, i, k)] = -v;
}

// R^2 semidirect R with ad e1 acting on span(e2, e3) by an arbitrary matrix:
// the Jacobi identity holds for every matrix, and the algebra is unimodular only when it is traceless.
LieFamily<Q> random_solvable(Rng& rng) {
  LieFamily<Q> f = empty_family({rng.positive_rational(), rng.positive_rational(), rng.positive_rational()});
  set_bracket(f, 0, 1, 1, rng.rational());
  set_bracket(f, 0, 1, 2, rng.rational());
  set_bracket(f, 0, 2, 1, rng.rational());
  set_bracket(f, 0, 2, 2, rng.rational());
  return f;
}

LieFamily<Q> random_su2(Rng& rng) {
  LieFamily<Q> f = empty_family({rng.positive_rational(), rng.positive_rational(), rng.positive_rational()});
  set_bracket(f, 1, 2, 0, rng.positive_rational());
  set_bracket(f, 2, 0, 1, rng.positive_rational());
  set_bracket(f, 0, 1, 2, rng.positive_rational());
  return f;
}

LieFamily<Q> random_heisenberg(Rng& rng) {
  LieFamily<Q> f = empty_family({rng.positive_rational(), rng.positive_rational(), rng.positive_rational()});
  set_bracket(f, 0, 1, 2, rng.positive_rational());
  return f;
}

LieFamily<Q> hyperbolic(const Q& a) { return find_family(catalogue(), "hyperbolic-solvable").instantiate<Q>({a}); }

}  // namespace

TEST_CASE("catalogue loads the four named families and round-trips through JSON") {
  const auto& cat = catalogue();
  REQUIRE(cat.size() == 4);
  for (const char* name : {"abelian", "heisenberg", "hyperbolic-solvable", "su2-milnor"}) {
    const FamilySpec& f = find_family(cat, name);
    FamilySpec back = FamilySpec::from_json(f.to_json(), "roundtrip");
    CHECK(back.to_json() == f.to_json());
    std::vector<double> start;
    for (const auto& p : f.params) start.push_back(p.start);
    CHECK_NOTHROW(validate(f.instantiate(start)));
  }
  CHECK_THROWS_AS(find_family(cat, "nilpotent-5"), Error);
}

TEST_CASE("malformed catalogue entries name the offending path") {
  nlohmann::json bad = find_family(catalogue(), "heisenberg").to_json();
  bad["brackets"][0]["k"] = 4;
  try {
    FamilySpec::from_json(bad, "families[1]");
    FAIL("accepted an out-of-range index");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedConfig);
    CHECK(std::string(e.what()).find("families[1].brackets[0]") != std::string::npos);
  }
  nlohmann::json unknown = find_family(catalogue(), "heisenberg").to_json();
  unknown["brackets"][0]["coeff"] = "q";
  CHECK_THROWS_AS(FamilySpec::from_json(unknown, "x"), Error);
  CHECK_THROWS_AS(catalogue_from_json(nlohmann::json::object()), Error);
  CHECK_THROWS_AS(load_catalogue("/nonexistent/families.json"), Error);
}

TEST_CASE("abelian algebra is flat for every metric") {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    LieFamily<Q> f = empty_family({rng.positive_rational(), rng.positive_rational(), rng.positive_rational()});
    PointGeometry<Q> pg = lie_geometry(f);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK(pg.geo.curv.op()(a, b) == 0);
    CHECK(pg.geo.s == 0);
  }
}

TEST_CASE("hyperbolic solvable family has constant curvature -a^2") {
  for (Q a : {Q(1), Q(2), ratio(3, 7), ratio(5, 2)}) {
    PointGeometry<Q> pg = lie_geometry(hyperbolic(a));
    const Sym2<Q>& g = pg.geo.metric.g();
    Q K = -a * a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            CHECK(pg.geo.curv(i, j, k, l) == K * (g(j, k) * g(i, l) - g(i, k) * g(j, l)));
    CHECK(pg.geo.s == -6 * a * a);
  }
}

TEST_CASE("connection from the Koszul formula matches a hand computation") {
  // [e1,e2] = a e2, [e1,e3] = a e3, orthonormal: nabla_{e2} e2 = a e1, nabla_{e2} e1 = -a e2,
  // nabla_{e3} e3 = a e1, nabla_{e3} e1 = -a e3, nabla_{e1} = 0.
  Q a = ratio(3, 2);
  auto G = lie_connection(hyperbolic(a));
  std::array<Q, 27> hand;
  hand.fill(Q(0));
  hand[gamma_index(0, 1, 1)] = a;
  hand[gamma_index(1, 1, 0)] = -a;
  hand[gamma_index(0, 2, 2)] = a;
  hand[gamma_index(2, 2, 0)] = -a;
  for (int n = 0; n < 27; ++n) CHECK(G[n] == hand[n]);
}

TEST_CASE("Heisenberg Ricci eigenvalues are (-c^2/2, -c^2/2, c^2/2)") {
  for (Q c : {Q(1), Q(3), ratio(2, 5)}) {
    PointGeometry<Q> pg = lie_geometry(find_family(catalogue(), "heisenberg").instantiate<Q>({c}));
    Q h = c * c / 2;
    CHECK(pg.geo.ric(0, 0) == -h);
    CHECK(pg.geo.ric(1, 1) == -h);
    CHECK(pg.geo.ric(2, 2) == h);
    CHECK(pg.geo.ric(0, 1) == 0);
    CHECK(pg.geo.ric(0, 2) == 0);
    CHECK(pg.geo.ric(1, 2) == 0);
    CHECK(pg.geo.s == -h);
  }
}

TEST_CASE("Ricci tensor agrees with the structure-constant formula") {
  Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    LieFamily<Q> f = t % 3 == 0 ? random_solvable(rng) : t % 3 == 1 ? random_su2(rng) : random_heisenberg(rng);
    PointGeometry<Q> pg = lie_geometry(f);
    lie_oracle::Arr27 c;
    lie_oracle::V3 d;
    for (int n = 0; n < 27; ++n) c[n] = f.c[n].get_d();
    for (int i = 0; i < 3; ++i) d[i] = f.d[i].get_d();
    auto on = lie_oracle::ricci_orthonormal(lie_oracle::orthonormal_constants(c, d));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double expect = on[i][j] * std::sqrt(d[i] * d[j]);
        CHECK(pg.geo.ric(i, j).get_d() == doctest::Approx(expect).epsilon(1e-12).scale(1));
      }
  }
}

TEST_CASE("contracted Bianchi identity holds exactly in the frame") {
  Rng rng(5);
  int nonzero = 0;
  for (int t = 0; t < 30; ++t) {
    LieFamily<Q> f = t % 3 == 0 ? random_solvable(rng) : t % 3 == 1 ? random_su2(rng) : random_heisenberg(rng);
    PointGeometry<Q> pg = lie_geometry(f);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          CHECK(pg.der.div_R(a, b, c) == pg.der.d_ric(b, c, a));
          if (pg.der.div_R(a, b, c) != 0) ++nonzero;
        }
  }
  CHECK(nonzero > 0);  // the identity is exercised on non-harmonic data
}

TEST_CASE("scaling the metric by c^2 scales s by 1/c^2 and |R|^2 by 1/c^4") {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    LieFamily<Q> f = t % 2 ? random_solvable(rng) : random_su2(rng);
    Q c = rng.positive_rational();
    LieFamily<Q> scaled = f;
    for (auto& x : scaled.d) x *= c * c;
    auto a = lie_geometry(f).geo;
    auto b = lie_geometry(scaled).geo;
    CHECK(b.s == a.s / (c * c));
    CHECK(curv_norm(b.metric, b.ric, b.s) == curv_norm(a.metric, a.ric, a.s) / (c * c * c * c));
  }
}

TEST_CASE("construction errors") {
  LieFamily<Q> f = empty_family({Q(1), Q(1), Q(1)});
  f.c[bracket_index(0, 1, 2)] = 1;  // not antisymmetric
  CHECK_THROWS_WITH_AS(lie_geometry(f), doctest::Contains("JacobiViolated"), Error);

  // [e1,e2] = e2, [e2,e3] = e1: the Jacobi sum on (e1, e2, e3) is -e2.
  LieFamily<Q> g = empty_family({Q(1), Q(1), Q(1)});
  set_bracket(g, 0, 1, 1, Q(1));
  set_bracket(g, 1, 2, 0, Q(1));
  try {
    lie_geometry(g);
    FAIL("Jacobi failure not detected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::JacobiViolated);
  }

  LieFamily<Q> h = empty_family({Q(1), Q(0), Q(1)});
  try {
    lie_geometry(h);
    FAIL("degenerate metric accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMetric);
  }
}

TEST_CASE("hyperbolic background at a = 2 solves the system") {
  SolitonParams params(Q(1));
  PointGeometry<Q> pg = lie_geometry(hyperbolic(Q(2)), std::optional<Q>(Q(48)));
  SolitonResidual<Q> r = residuals(pg, params);
  CHECK(r.E_norm2 == 0);
  CHECK(r.YM_norm2 == 0);
  CHECK(r.D_norm2 == 0);
  CHECK(soliton_objective(hyperbolic(Q(2)), params, Q(48)) == 0);

  LieFamily<double> fd = find_family(catalogue(), "hyperbolic-solvable").instantiate<double>({2.0});
  SolitonResidual<double> rd = residuals(lie_geometry(fd, std::optional<double>(48.0)), params);
  CHECK(rd.E_norm2 < 1e-10);
  CHECK(rd.YM_norm2 < 1e-10);
  CHECK(rd.D_norm2 < 1e-10);

  // Residual vector squares sum to the objective.
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    LieFamily<double> f = find_family(catalogue(), "su2-milnor")
                              .instantiate<double>({rng.uniform(0.5, 3), rng.uniform(0.5, 3), rng.uniform(0.5, 3)});
    double w = rng.uniform(1, 100);
    double acc = 0;
    for (double x : soliton_residual_vector(f, params, w)) acc += x * x;
    CHECK(acc == doctest::Approx(soliton_objective(f, params, w)).epsilon(1e-12));
  }
}

TEST_CASE("abelian objective is 3 (t/2)^2 + t^2") {
  Rng rng(29);
  for (Q kappa : {Q(1), ratio(1, 3), Q(5)}) {
    SolitonParams params(kappa);
    for (int k = 0; k < 10; ++k) {
      Q t = rng.positive_rational(99, 7);
      LieFamily<Q> f = empty_family({rng.positive_rational(), rng.positive_rational(), rng.positive_rational()});
      Q obj = soliton_objective(f, params, t);
      CHECK(obj == 3 * (t / 2) * (t / 2) + t * t);
      CHECK(obj > 0);
    }
  }
}

TEST_CASE("Levenberg-Marquardt recovers the hyperbolic soliton") {
  const FamilySpec& fam = find_family(catalogue(), "hyperbolic-solvable");
  SolitonParams params(Q(1));
  SearchConfig cfg;
  cfg.initial = {1.5};
  cfg.initial_e2phi = 30;
  auto t0 = std::chrono::steady_clock::now();
  SearchResult r = lm_solve(fam, params, cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(r.converged);
  CHECK(!r.failure);
  CHECK(std::abs(r.params[0] - 2) < 1e-6);
  CHECK(std::abs(r.e2phi - 48) < 1e-4);
  CHECK(r.objective < 1e-10);
  CHECK(r.iterations < 200);
  CHECK(secs < 5);
  CHECK(r.einstein);
  CHECK(r.matches_classification);
  CHECK(r.s == doctest::Approx(-24).epsilon(1e-6));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] < r.history[i - 1]);

  // Same seed, same run.
  SearchResult again = lm_solve(fam, params, cfg);
  CHECK(again.params == r.params);
  CHECK(again.history == r.history);
}

TEST_CASE("search for other kappa lands on the scaled solution") {
  const FamilySpec& fam = find_family(catalogue(), "hyperbolic-solvable");
  for (Q kappa : {Q(2), ratio(1, 2)}) {
    SolitonParams params(kappa);
    SearchConfig cfg;
    // a^2 = 4 / kappa, e^{2 phi} = 48 / kappa
    cfg.initial = {0.8 * std::sqrt(4 / kappa.get_d())};
    cfg.initial_e2phi = 0.7 * 48 / kappa.get_d();
    SearchResult r = lm_solve(fam, params, cfg);
    CHECK(r.converged);
    CHECK(r.params[0] == doctest::Approx(std::sqrt(4 / kappa.get_d())).epsilon(1e-6));
    CHECK(r.e2phi == doctest::Approx(48 / kappa.get_d()).epsilon(1e-6));
    CHECK(r.matches_classification);
  }
}

TEST_CASE("start at the exact solution takes no iterations") {
  SearchConfig cfg;
  cfg.initial = {2.0};
  cfg.initial_e2phi = 48;
  SearchResult r = lm_solve(find_family(catalogue(), "hyperbolic-solvable"), SolitonParams(Q(1)), cfg);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.params[0] == 2.0);
  CHECK(r.e2phi == doctest::Approx(48).epsilon(1e-15));
}

TEST_CASE("Heisenberg search does not converge and keeps a positive best objective") {
  SearchResult r = lm_solve(find_family(catalogue(), "heisenberg"), SolitonParams(Q(1)), SearchConfig{});
  CHECK(!r.converged);
  REQUIRE(r.failure);
  CHECK(*r.failure == ErrorKind::MaxIterations);
  CHECK(r.objective > 0);
  CHECK(!r.einstein);
}

TEST_CASE("abelian search ignores the blind scale direction and reports its best iterate") {
  // The residual does not depend on d, so one Jacobian column vanishes identically.
  const FamilySpec& fam = find_family(catalogue(), "abelian");
  SolitonParams params(Q(1));
  SearchResult r = lm_solve(fam, params, SearchConfig{});
  CHECK(!r.converged);
  REQUIRE(r.failure);
  CHECK(*r.failure == ErrorKind::MaxIterations);
  CHECK(r.restarts == 0);
  CHECK(r.params[0] == fam.params[0].start);
  double start_obj = 0;
  for (double v : soliton_residual_vector(fam.instantiate(std::vector<double>{fam.params[0].start}), params, fam.weight.start))
    start_obj += v * v;
  CHECK(r.objective < start_obj);
  CHECK(r.objective > 0);
  CHECK(r.e2phi == doctest::Approx(fam.weight.lower));
}

TEST_CASE("search configuration is validated") {
  SearchConfig cfg;
  cfg.tolerance = 0;
  CHECK_THROWS_AS(cfg.check(), Error);
  CHECK_THROWS_AS(lm_solve(find_family(catalogue(), "heisenberg"), SolitonParams(Q(1)), cfg), Error);
  SearchConfig wrong;
  wrong.initial = {1.0, 2.0};
  CHECK_THROWS_AS(lm_solve(find_family(catalogue(), "heisenberg"), SolitonParams(Q(1)), wrong), Error);
}

TEST_CASE("grid scans stay positive on Heisenberg and abelian families") {
  SolitonParams params(Q(1));
  for (const char* name : {"heisenberg", "abelian"}) {
    GridScan g = grid_scan(find_family(catalogue(), name), params, 20, 20);
    CHECK(g.samples.size() == 400);
    CHECK(g.min_objective > 0);
    for (const auto& s : g.samples) CHECK(s[2] > 0);
  }
  GridScan h = grid_scan(find_family(catalogue(), "hyperbolic-solvable"), params, 20, 20);
  CHECK(h.min_objective < find_family(catalogue(), "hyperbolic-solvable").weight.upper);
}
