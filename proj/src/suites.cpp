#include "hetsol/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "hetsol/fd_linearize.hpp"
#include "hetsol/index_sums.hpp"
#include "hetsol/linearize.hpp"
#include "hetsol/random.hpp"
#include "hetsol/soliton.hpp"

namespace hetsol {

namespace {

using Q = Rational;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Largest entry of a difference, and whether any entry is an exact rational.
struct Flat {
  double max = 0;
  bool nonzero = false;
  bool exact = false;

  void add(const Rational& q) {
    exact = true;
    if (q != 0) {
      nonzero = true;
      max = std::max(max, std::abs(q.get_d()));
    }
  }
  void add(double x) {
    if (std::isnan(x)) {
      nonzero = true;
      max = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    if (x != 0) nonzero = true;
    if (!std::isnan(max)) max = std::max(max, std::abs(x));
  }
  template <class T>
  void add(const Sym2<T>& s) {
    for (const auto& e : s.upper()) add(e);
  }
  template <class T>
  void add(const Trilinear<T>& t) {
    for (const auto& e : t.c) add(e);
  }
  template <class T>
  void add(const Curv3<T>& c) {
    add(c.op());
  }
  template <class T, std::size_t N>
  void add(const std::array<T, N>& a) {
    for (const auto& e : a) add(e);
  }
  template <class T>
  void add(const std::vector<T>& a) {
    for (const auto& e : a) add(e);
  }
};

struct Sample {
  std::string name, anchor;
  double defect = 0, tolerance = 0;
  bool is_verdict = false;
  bool pass = true;
  std::string detail;
};

// Per-trial record of checks, merged into the report in trial order.
class TrialLog {
 public:
  explicit TrialLog(double tol) : tol_(tol) {}

  // Records `diff`, which should vanish: exactly for rational entries, and
  // relative to max(1, scale) within the float tolerance otherwise.
  template <class X>
  void zero(const std::string& name, const std::string& anchor, const X& diff, double scale = 1,
            const std::string& where = "") {
    Flat f;
    f.add(diff);
    if (f.exact) {
      double d = f.nonzero ? std::max(f.max, std::numeric_limits<double>::denorm_min()) : 0.0;
      push(name, anchor, d, 0, where);
    } else {
      push(name, anchor, f.max / std::max(1.0, scale), tol_, where);
    }
  }
  void bound(const std::string& name, const std::string& anchor, double defect, double tolerance,
             const std::string& where = "") {
    push(name, anchor, defect, tolerance, where);
  }
  void verdict(const std::string& name, const std::string& anchor, bool pass, const std::string& detail) {
    Sample s{name, anchor, 0, 0, true, pass, detail};
    samples_.push_back(std::move(s));
  }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  void push(const std::string& name, const std::string& anchor, double defect, double tolerance,
            const std::string& where) {
    std::string detail;
    if (!(defect <= tolerance)) detail = "defect " + format_double(defect) + (where.empty() ? "" : " at " + where);
    samples_.push_back({name, anchor, defect, tolerance, false, true, detail});
  }

  double tol_;
  std::vector<Sample> samples_;
};

void merge(Report& rep, const std::vector<TrialLog>& logs) {
  for (const auto& log : logs)
    for (const auto& s : log.samples()) {
      if (s.is_verdict)
        rep.verdict(s.name, s.anchor, s.pass, s.detail);
      else
        rep.check(s.name, s.anchor, s.defect, s.tolerance, s.detail);
    }
}

// Runs body(trial, log) for every trial on a small thread pool. Any exception
// becomes a failing "<stage>.errors" verdict for that trial.
template <class Body>
std::vector<TrialLog> run_trials(const std::string& stage, int n, double tol, Body body) {
  std::vector<TrialLog> logs(static_cast<std::size_t>(n), TrialLog(tol));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < n; t = next++) {
      try {
        body(t, logs[static_cast<std::size_t>(t)]);
      } catch (const std::exception& e) {
        logs[static_cast<std::size_t>(t)].verdict(stage + ".errors", "every trial evaluates without error", false,
                                                  "trial " + std::to_string(t) + ": " + e.what());
      }
    }
  };
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  int threads = static_cast<int>(std::min<unsigned>(hw, 8));
  threads = std::min(threads, n);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& log : logs)
    if (log.samples().empty()) log.verdict(stage + ".errors", "every trial evaluates without error", true, "");
  return logs;
}

template <class T>
Sym2<T> lift(const Sym2<Q>& a) {
  Sym2<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out(i, j) = cast<T>(a(i, j));
  return out;
}

template <class T>
Vec3<T> lift(const Vec3<Q>& a) {
  return {cast<T>(a[0]), cast<T>(a[1]), cast<T>(a[2])};
}

template <class T>
Point<T> lift_point(const Point<Q>& p) {
  if constexpr (std::is_same_v<T, Q>)
    return p;
  else
    return cast_point<T>(p);
}

template <class T>
using Tensor4 = index_sum::Tensor4<T>;

template <class T>
std::vector<T> tensor_diff(const Tensor4<T>& a, const Tensor4<T>& b) {
  std::vector<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out.push_back(T(a[i][j][k][l] - b[i][j][k][l]));
  return out;
}

template <class T, std::size_t N>
std::array<T, N> array_diff(const std::array<T, N>& a, const std::array<T, N>& b) {
  std::array<T, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = T(a[i] - b[i]);
  return out;
}

// --- verify: curvature dictionary ------------------------------------------------

template <class T>
void curvature_trial(Rng& rng, TrialLog& log) {
  Metric3<T> g(lift<T>(random_metric(rng)));
  Sym2<T> ric = lift<T>(random_sym2(rng));
  T s = g.trace(ric);
  double scale = std::max(1.0, max_abs(ric));
  double scale2 = scale * scale;

  Curv3<T> R = riemann_from_ricci(g, ric, s);
  Tensor4<T> full = index_sum::expand(R);
  log.zero("curvature.kulkarni_nomizu_expansion",
           "R = -g o Ric + (s/4) g o g agrees with the four-term Kulkarni-Nomizu expansion on all index tuples",
           tensor_diff(full, index_sum::riemann_from_ricci(g.g(), ric, s)), scale);

  RicciScalar<T> back = ricci_contract(R, g);
  log.zero("curvature.round_trip", "contracting R built from (Ric, s) returns (Ric, s)", back.ric - ric, scale);
  log.zero("curvature.round_trip", "contracting R built from (Ric, s) returns (Ric, s)", T(back.s - s), scale);
  log.zero("curvature.ricci_contraction", "Ric_jk = g^il R_ijkl by explicit index summation",
           index_sum::ricci(full, g.inv()) - ric, scale);

  Sym2<T> sq = curv_square(g, ric, s);
  log.zero("curvature.square", "R o R = -Ric o Ric + s Ric + (|Ric|^2 - s^2/2) g against (1/2) sum R_iabc R_j^abc",
           sq - index_sum::curv_square(full, g.inv()), scale2);
  T nrm = curv_norm(g, ric, s);
  log.zero("curvature.norm", "|R|^2 = |Ric|^2 - s^2/4 against (1/4) sum R_ijkl^2", T(nrm - index_sum::curv_norm(full, g.inv())),
           scale2);
  log.zero("curvature.norm", "|R|^2 = |Ric|^2 - s^2/4 against (1/4) sum R_ijkl^2", T(nrm - g.trace(sq) / T(2)), scale2);

  Vec3<T> v1 = lift<T>(random_vec3(rng)), v2 = lift<T>(random_vec3(rng));
  auto ref = index_sum::operator_action(full, v1, v2);
  double vscale = scale * std::max(1.0, max_abs(v1)) * std::max(1.0, max_abs(v2));
  log.zero("curvature.operator_action", "R_{v1 v2} = (s/2) v1^v2 + v2^Ric(v1) + Ric(v2)^v1 against index summation",
           array_diff(two_form_action(g, ric, s, v1, v2), ref), vscale);
  log.zero("curvature.operator_action", "R_{v1 v2} = (s/2) v1^v2 + v2^Ric(v1) + Ric(v2)^v1 against index summation",
           array_diff(R.act(v1, v2), ref), vscale);
}

// --- verify: chart identities and both residual formulations ----------------------

template <class T>
void chart_trial(Rng& rng, TrialLog& log, int points) {
  ChartGeometry c = random_rational_chart(rng);
  Q kappa = rng.positive_rational() * (rng.integer(0, 1) ? 1 : -1);
  SolitonParams params(kappa);
  for (int k = 0; k < points; ++k) {
    Point<Q> pq = random_point_in_ball(rng, c.radius());
    Point<T> p = lift_point<T>(pq);
    std::string where = "point " + std::to_string(k);
    PointGeometry<T> pg = point_geometry(c, p);
    const auto& g = pg.geo.metric;
    double scale = std::max({1.0, max_abs(pg.geo.ric), max_abs(pg.der.nabla_ric)});

    log.zero("chart.contracted_bianchi", "d*R(v1,v2,v3) = d_nabla Ric(v2,v3,v1)", bianchi_residual(pg.der), scale, where);
    log.zero("chart.delta_dphi_trace", "delta d phi = -tr_g nabla d phi",
             T(pg.der.delta_dphi + g.trace(pg.der.hess_phi)), std::max(1.0, max_abs(pg.der.hess_phi)), where);
    RicciScalar<T> rs = ricci_contract(pg.geo.curv, g);
    log.zero("chart.packet_contraction", "contracting the packet curvature reproduces its (Ric, s)", rs.ric - pg.geo.ric,
             scale, where);

    SolitonResidual<T> r1 = residuals(pg, params);
    SolitonResidual<T> r2 = residuals_v2(pg, params);
    T trE = g.trace(r1.E);
    double rscale = std::max({1.0, max_abs(r1.E), std::abs(to_double(r1.D))});
    log.zero("soliton.d2_relation", "D2 = tr_g E - 2 D", T(r2.D - (trE - T(2) * r1.D)), rscale, where);
    log.zero("soliton.e2_relation", "E2 = E - (1/3)(tr_g E + D) g", r2.E - (r1.E - T((trE + r1.D) / T(3)) * g.g()),
             rscale, where);
    Trilinear<T> dym;
    for (int i = 0; i < 27; ++i) dym.c[i] = T(r2.YM.c[i] - r1.YM.c[i]);
    log.zero("soliton.ym2_equals_ym", "YM2 (from nabla Ric and ds) = YM (from d*R and d phi)", dym,
             std::max(1.0, max_abs(r1.YM)), where);
    log.zero("soliton.ym_trace_identity", "trace identity of the Yang-Mills residual", ym_trace_identity(pg), scale, where);
    log.zero("soliton.scalar_identity", "scalar identity combining E, YM and D", scalar_identity(pg, params), rscale,
             where);
  }
}

// --- verify: linearization invariants ---------------------------------------------

template <class T>
void linearization_trial(Rng& rng, TrialLog& log, bool einstein) {
  ChartGeometry c = einstein ? poincare_ball_chart() : random_rational_chart(rng);
  SymField h = random_sym_field(rng, 2);
  Point<Q> pq = random_point_in_ball(rng, einstein ? Q(ratio(1, 2)) : c.radius());
  Point<T> p = lift_point<T>(pq);
  LinearizationPacket<T> L = linearization(c, h, p);
  auto ref = fd::variation_dual(c, h, p);
  const auto& g = L.geo.metric;
  double scale = std::max({1.0, max_abs(L.lin_ricci), std::abs(to_double(L.lin_scalar))});

  log.zero("linearize.ricci_matches_dual", "linearized Ricci equals the derivative of the nonlinear pipeline",
           L.lin_ricci - ref.ric, scale);
  log.zero("linearize.scalar_matches_dual", "linearized scalar curvature equals the derivative of the nonlinear pipeline",
           T(L.lin_scalar - ref.s), scale);
  log.zero("linearize.scalar_trace_relation", "d s(h) = -g(h, Ric) + tr_g d Ric(h)",
           T(L.lin_scalar - (g.trace(L.lin_ricci) - g.inner(L.h, L.geo.ric))), scale);
  if (!einstein) return;

  T s = L.geo.s;
  Sym2<T> closed = T(-s / T(6)) * (L.h - L.tr_h * g.g());
  log.zero("linearize.r0_constant_curvature", "R0(h) = -(s/6)(h - tr h g) on constant curvature", L.r0 - closed,
           std::max(1.0, max_abs(L.h)));
  CurvatureLinearization<T> lc = lin_curv_einstein(L);
  double s2 = std::max(1.0, std::abs(to_double(s)));
  log.zero("linearize.lemma_norm_consistency", "d|R|^2(h) - (s/6) d s(h) = 0 on Einstein backgrounds",
           T(lc.curv_norm - s / T(6) * L.lin_scalar), scale * s2);
  log.zero("linearize.lemma_trace", "tr_g d(R o R)(h) = (s/3) d s(h) + (s^2/18) tr h on Einstein backgrounds",
           T(g.trace(lc.curv_square) - (s / T(3) * L.lin_scalar + s * s / T(18) * L.tr_h)), scale * s2);
  log.zero("linearize.curv_square_matches_dual", "d(R o R)(h) on Einstein backgrounds equals the pipeline derivative",
           lc.curv_square - ref.curv_square, scale * s2);
  log.zero("linearize.curv_norm_matches_dual", "d|R|^2(h) on Einstein backgrounds equals the pipeline derivative",
           T(lc.curv_norm - ref.curv_norm), scale * s2);
}

// Random semidirect products R^2 x| R and su(2) brackets: Jacobi holds for all of them.
LieFamily<Q> random_lie_family(Rng& rng, bool solvable) {
  LieFamily<Q> f;
  f.c.fill(Q(0));
  f.d = {rng.positive_rational(), rng.positive_rational(), rng.positive_rational()};
  auto set = [&](int i, int j, int k, const Q& v) {
    f.c[bracket_index(i, j, k)] = v;
    f.c[bracket_index(j, i, k)] = -v;
  };
  if (solvable) {
    set(0, 1, 1, rng.rational());
    set(0, 1, 2, rng.rational());
    set(0, 2, 1, rng.rational());
    set(0, 2, 2, rng.rational());
  } else {
    set(1, 2, 0, rng.positive_rational());
    set(2, 0, 1, rng.positive_rational());
    set(0, 1, 2, rng.positive_rational());
  }
  return f;
}

template <class T>
LieFamily<T> hyperbolic_family(const T& a) {
  LieFamily<T> f;
  f.c.fill(T(0));
  f.d = {T(1), T(1), T(1)};
  f.c[bracket_index(0, 1, 1)] = a;
  f.c[bracket_index(1, 0, 1)] = T(-a);
  f.c[bracket_index(0, 2, 2)] = a;
  f.c[bracket_index(2, 0, 2)] = T(-a);
  return f;
}

void classification_checks(Report& rep, std::uint64_t seed) {
  ClassificationReport c1 = classify_constant_dilaton(SolitonParams(Q(1)));
  auto exact = [&](const std::string& name, const std::string& anchor, const Q& diff) {
    rep.check(name, anchor, diff == 0 ? 0.0 : std::max(std::abs(diff.get_d()), std::numeric_limits<double>::denorm_min()),
              0);
  };
  exact("classification.kappa_one_s", "kappa = 1: s = -24", c1.s + 24);
  exact("classification.kappa_one_e2phi", "kappa = 1: e^{2 phi} = 48", c1.e2phi - 48);
  exact("classification.kappa_one_ricci_factor", "kappa = 1: Ric = -8 g", c1.ricci_factor + 8);
  exact("classification.kappa_one_hyperbolic_residue", "kappa = 1: eigenvalue quadratic vanishes at s/3",
        c1.hyperbolic_residue);
  exact("classification.kappa_one_product_defect", "kappa = 1: product branch defect is -2", c1.product_defect + 2);

  Rng rng(trial_seed(seed, 4, 0));
  for (int t = 0; t < 50; ++t) {
    Q k = rng.positive_rational(30, 11);
    ClassificationReport c = classify_constant_dilaton(SolitonParams(k));
    exact("classification.scaling_s", "kappa s = -24 for every kappa > 0", k * c.s + 24);
    exact("classification.scaling_e2phi", "kappa e^{2 phi} = 48 for every kappa > 0", k * c.e2phi - 48);
    exact("classification.scaling_ricci_factor", "kappa Ric-factor = -8 for every kappa > 0", k * c.ricci_factor + 8);
    exact("classification.scaling_hyperbolic_residue", "hyperbolic eigenvalue residue is 0 for every kappa > 0",
          c.hyperbolic_residue);
    exact("classification.scaling_product_defect", "kappa times the product branch defect is -2", k * c.product_defect + 2);
  }
}

void essential_checks(Report& rep, std::uint64_t seed) {
  auto exact = [&](const std::string& name, const std::string& anchor, const Q& diff) {
    rep.check(name, anchor, diff == 0 ? 0.0 : std::max(std::abs(diff.get_d()), std::numeric_limits<double>::denorm_min()),
              0);
  };
  auto tuple = [](const EssentialChain& c) {
    return std::vector<Q>{c.exterior, c.dxi, c.ds_per_xi, c.xi_final, c.lemma_ric, c.lemma_h};
  };
  EssentialChain c1 = essential_chain(SolitonParams(Q(1)));
  std::vector<Q> want1{-11, -64, -24, 24, -7, -56};
  auto got1 = tuple(c1);
  for (std::size_t i = 0; i < want1.size(); ++i)
    exact("essential.kappa_one", "kappa = 1 coefficients (-11, -64, -24, 24, -7, -56)", got1[i] - want1[i]);
  rep.verdict("essential.kappa_one_consistent", "every chain step matches its closed form at kappa = 1", c1.consistent(),
              "a chain step differs from its closed form");
  EssentialChain c2 = essential_chain(SolitonParams(Q(2)));
  std::vector<Q> want2{-11, -32, -12, 12, -7, -28};
  auto got2 = tuple(c2);
  for (std::size_t i = 0; i < want2.size(); ++i)
    exact("essential.kappa_two", "kappa = 2 coefficients (-11, -32, -12, 12, -7, -28)", got2[i] - want2[i]);

  Rng rng(trial_seed(seed, 5, 0));
  for (int t = 0; t < 50; ++t) {
    Q k = rng.positive_rational(30, 11);
    EssentialChain c = essential_chain(SolitonParams(k));
    const std::string anchor = "kappa-scaled coefficients (-11, -64, -24, 24, -7, -56) are independent of kappa";
    exact("essential.kappa_independence", anchor, c.exterior + 11);
    exact("essential.kappa_independence", anchor, k * c.dxi + 64);
    exact("essential.kappa_independence", anchor, c.kappa_ds_per_xi + 24);
    exact("essential.kappa_independence", anchor, k * c.xi_final - 24);
    exact("essential.kappa_independence", anchor, c.lemma_ric + 7);
    exact("essential.kappa_independence", anchor, k * c.lemma_h + 56);
    rep.verdict("essential.chain_consistent", "every chain step matches its closed form", c.consistent(),
                "kappa = " + to_string(k));
  }
}

nlohmann::json chain_json(const EssentialChain& c) {
  nlohmann::json j;
  j["kappa"] = rational_json(c.bg.kappa);
  for (const auto& s : c.steps)
    j["steps"].push_back({{"name", s.name}, {"value", rational_json(s.value)}, {"closed_form", rational_json(s.closed_form)}});
  return j;
}

void homgeo_checks(Report& rep, std::uint64_t seed, double tol) {
  SolitonParams params(Q(1));
  SolitonResidual<Q> r = residuals(lie_geometry(hyperbolic_family(Q(2)), std::optional<Q>(Q(48))), params);
  for (const Q& n : {r.E_norm2, r.YM_norm2, r.D_norm2})
    rep.check("homgeo.hyperbolic_background_exact", "a = 2, kappa = 1, e^{2 phi} = 48: all residual norms vanish exactly",
              n == 0 ? 0.0 : std::max(n.get_d(), std::numeric_limits<double>::denorm_min()), 0);
  SolitonResidual<double> rd = residuals(lie_geometry(hyperbolic_family(2.0), std::optional<double>(48.0)), params);
  for (double n : {rd.E_norm2, rd.YM_norm2, rd.D_norm2})
    rep.check("homgeo.hyperbolic_background_float", "a = 2, kappa = 1, e^{2 phi} = 48: residual norms below 1e-10 in double",
              n, 1e-10);

  auto logs = run_trials("homgeo", 20, tol, [&](int t, TrialLog& log) {
    Rng rng(trial_seed(seed, 6, static_cast<std::uint64_t>(t)));
    LieFamily<Q> f = random_lie_family(rng, t % 2 == 0);
    PointGeometry<Q> pg = lie_geometry(f);
    Trilinear<Q> b;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 3; ++z) b(x, y, z) = pg.der.div_R(x, y, z) - pg.der.d_ric(y, z, x);
    log.zero("homgeo.frame_bianchi", "d*R(v1,v2,v3) = d_nabla Ric(v2,v3,v1) for left-invariant metrics", b);
    Q c = rng.positive_rational();
    LieFamily<Q> scaled = f;
    for (auto& x : scaled.d) x *= c * c;
    auto a = pg.geo;
    auto sc = lie_geometry(scaled).geo;
    log.zero("homgeo.scaling_law", "d -> c^2 d scales s by 1/c^2 and |R|^2 by 1/c^4", Q(sc.s - a.s / (c * c)));
    log.zero("homgeo.scaling_law", "d -> c^2 d scales s by 1/c^2 and |R|^2 by 1/c^4",
             Q(curv_norm(sc.metric, sc.ric, sc.s) - curv_norm(a.metric, a.ric, a.s) / (c * c * c * c)));
  });
  merge(rep, logs);
}

SuiteConfig resolved(SuiteConfig cfg) {
  cfg.mode = mode_with_env_override(cfg.mode);
  cfg.check();
  return cfg;
}

}  // namespace

Report run_verify(const SuiteConfig& in) {
  SuiteConfig cfg = resolved(in);
  Report rep("verify", cfg);
  const bool exact = cfg.mode == Mode::Exact;
  const double tol = cfg.tolerance;

  auto t0 = Clock::now();
  merge(rep, run_trials("curvature", cfg.trials, tol, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 1, static_cast<std::uint64_t>(t)));
          exact ? curvature_trial<Q>(rng, log) : curvature_trial<double>(rng, log);
        }));
  rep.set_timing("curvature", seconds_since(t0));

  t0 = Clock::now();
  const int charts = std::max(20, cfg.trials / 10);
  merge(rep, run_trials("chart", charts, tol, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 2, static_cast<std::uint64_t>(t)));
          exact ? chart_trial<Q>(rng, log, 5) : chart_trial<double>(rng, log, 5);
        }));
  rep.set_timing("chart", seconds_since(t0));

  t0 = Clock::now();
  classification_checks(rep, cfg.seed);
  rep.set_timing("classification", seconds_since(t0));

  t0 = Clock::now();
  merge(rep, run_trials("linearize", 10, tol, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 3, static_cast<std::uint64_t>(t)));
          bool einstein = t % 2 == 0;
          exact ? linearization_trial<Q>(rng, log, einstein) : linearization_trial<double>(rng, log, einstein);
        }));
  essential_checks(rep, cfg.seed);
  rep.set_timing("linearize", seconds_since(t0));

  t0 = Clock::now();
  homgeo_checks(rep, cfg.seed, tol);
  rep.set_timing("homgeo", seconds_since(t0));
  return rep;
}

Report run_classify(const Rational& kappa, const SuiteConfig& in) {
  SuiteConfig cfg = resolved(in);
  Report rep("classify", cfg);
  ClassificationReport c = classify_constant_dilaton(SolitonParams(kappa));
  nlohmann::json j;
  j["kappa"] = rational_json(c.kappa);
  j["branch"] = c.branch == ClassificationReport::Branch::Hyperbolic ? "hyperbolic" : "product_excluded";
  j["s"] = rational_json(c.s);
  j["e2phi"] = rational_json(c.e2phi);
  j["ricci_factor"] = rational_json(c.ricci_factor);
  j["hyperbolic_residue"] = rational_json(c.hyperbolic_residue);
  j["product_s"] = rational_json(c.product_s);
  j["product_mu"] = rational_json(c.product_mu);
  j["product_zero_residue"] = rational_json(c.product_zero_residue);
  j["product_defect"] = rational_json(c.product_defect);
  j["nonpositive_dilaton"] = c.nonpositive_dilaton;
  rep.set_result("classification", j);

  auto exact = [&](const std::string& name, const std::string& anchor, const Q& diff) {
    rep.check(name, anchor, diff == 0 ? 0.0 : std::max(std::abs(diff.get_d()), std::numeric_limits<double>::denorm_min()),
              0);
  };
  exact("classification.kappa_s", "kappa s = -24", kappa * c.s + 24);
  exact("classification.kappa_e2phi", "kappa e^{2 phi} = 48", kappa * c.e2phi - 48);
  exact("classification.ricci_factor", "Ric = (s/3) g", 3 * c.ricci_factor - c.s);
  exact("classification.hyperbolic_residue", "eigenvalue quadratic vanishes at s/3", c.hyperbolic_residue);
  rep.verdict("classification.product_branch_empty", "product branch defect is nonzero, so that branch is empty",
              c.product_defect != 0, "product defect vanished");
  return rep;
}

namespace {

TrigPolynomial random_trig(Rng& rng, int degree, int terms = 3) {
  TrigPolynomial t = TrigPolynomial::constant(rng.rational(4, 3));
  for (int n = 0; n < terms; ++n) {
    MultiIndex k{int(rng.integer(0, degree)), int(rng.integer(-degree, degree)), int(rng.integer(-degree, degree))};
    if (k[0] == 0 && (k[1] < 0 || (k[1] == 0 && k[2] <= 0))) continue;
    t.add(k, rng.rational(4, 3), rng.rational(4, 3));
  }
  return t;
}

double rel_err(const Sym2<double>& a, const Sym2<double>& ref) {
  return max_abs(a - ref) / std::max(max_abs(ref), 1e-300);
}
double rel_err(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace

Report run_linearize(const SuiteConfig& in) {
  SuiteConfig cfg = resolved(in);
  Report rep("linearize", cfg);
  const ChartGeometry ball = poincare_ball_chart();

  // Finite-difference sweep on the Poincare ball (s = -6).
  auto t0 = Clock::now();
  const int sweeps = 10;
  std::vector<std::array<double, 6>> rows(sweeps);
  merge(rep, run_trials("fd", sweeps, cfg.tolerance, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 10, static_cast<std::uint64_t>(t)));
          SymField h = random_sym_field(rng, 2);
          Point<Q> pq = random_point_in_ball(rng, ratio(1, 2));
          Point<double> p = cast_point<double>(pq);
          LinearizationPacket<double> L = linearization(ball, h, p);
          CurvatureLinearization<double> lc = lin_curv_einstein(L);
          auto f1 = fd::variation_fd(ball, h, p, 1e-4);
          double e_sq = rel_err(lc.curv_square, f1.curv_square);
          double e_nrm = rel_err(lc.curv_norm, f1.curv_norm);
          std::string where = "deformation " + std::to_string(t);
          log.bound("fd.curv_square_relative_error", "d(R o R)(h) against central differences at t = 1e-4", e_sq, 1e-6,
                    where);
          log.bound("fd.curv_norm_relative_error", "d|R|^2(h) against central differences at t = 1e-4", e_nrm, 1e-6, where);
          log.bound("fd.lin_ricci_relative_error", "d Ric(h) against central differences at t = 1e-4",
                    rel_err(L.lin_ricci, f1.ric), 1e-6, where);
          log.bound("fd.lin_scalar_relative_error", "d s(h) against central differences at t = 1e-4",
                    rel_err(L.lin_scalar, f1.s), 1e-6, where);

          // Step halving in exact arithmetic isolates the truncation error.
          CurvatureLinearization<Q> lq = lin_curv_einstein(ball, h, pq);
          auto q1 = fd::variation_fd(ball, h, pq, Q(ratio(1, 10000)));
          auto q2 = fd::variation_fd(ball, h, pq, Q(ratio(1, 20000)));
          double r_sq = max_abs(to_double(Sym2<Q>(lq.curv_square - q1.curv_square))) /
                        max_abs(to_double(Sym2<Q>(lq.curv_square - q2.curv_square)));
          double r_nrm = to_double(Q(lq.curv_norm - q1.curv_norm)) / to_double(Q(lq.curv_norm - q2.curv_norm));
          log.bound("fd.step_halving_ratio_square", "halving the step divides the d(R o R) error by 4 (|ratio - 4| <= 0.5)",
                    std::abs(r_sq - 4), 0.5, where);
          log.bound("fd.step_halving_ratio_norm", "halving the step divides the d|R|^2 error by 4 (|ratio - 4| <= 0.5)",
                    std::abs(r_nrm - 4), 0.5, where);
          rows[static_cast<std::size_t>(t)] = {double(t), e_sq, e_nrm, rel_err(L.lin_ricci, f1.ric), r_sq, r_nrm};
        }));
  Table fdt{"fd_sweep", {"deformation", "rel_err_curv_square", "rel_err_curv_norm", "rel_err_lin_ricci",
                         "halving_ratio_square", "halving_ratio_norm"}, {}};
  for (const auto& r : rows) {
    std::vector<std::string> row;
    for (double x : r) row.push_back(format_double(x));
    fdt.rows.push_back(row);
  }
  rep.add_table(fdt);
  rep.set_timing("fd", seconds_since(t0));

  // Torus gauge pairing with exact quadrature.
  t0 = Clock::now();
  merge(rep, run_trials("gauge", 10, cfg.tolerance, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 11, static_cast<std::uint64_t>(t)));
          TorusGaugeData d{random_metric(rng), {}, {}, random_trig(rng, 2), random_trig(rng, 2)};
          for (auto& f : d.v) f = random_trig(rng, 2);
          for (auto& f : d.h) f = random_trig(rng, 2);
          TorusPairing p = torus_gauge_pairing(d, 5);
          log.zero("gauge.l2_pairing_defect",
                   "<(L_v g, d phi(v)), (h, xi)> = <v, 2 nabla* h + xi d phi> by exact quadrature, degree 2, 5 nodes",
                   p.defect);
          log.zero("gauge.exact_integrals", "both sides agree as exact integrals (constant Fourier terms)",
                   Q(p.exact_image_side - p.exact_adjoint_side));
          log.verdict("gauge.quadrature_exact", "node count exceeds twice the Fourier degree", p.quadrature_exact,
                      "trial " + std::to_string(t));
        }));
  rep.set_timing("gauge", seconds_since(t0));

  // Essential-deformation coefficients.
  t0 = Clock::now();
  essential_checks(rep, cfg.seed);
  Table ct{"essential_chain", {"kappa", "step", "value", "closed_form"}, {}};
  for (Q k : {Q(1), Q(2)}) {
    EssentialChain c = essential_chain(SolitonParams(k));
    for (const auto& s : c.steps) ct.rows.push_back({to_string(k), s.name, to_string(s.value), to_string(s.closed_form)});
    rep.set_result("essential_chain_kappa_" + to_string(k), chain_json(c));
  }
  rep.add_table(ct);
  rep.set_timing("essential", seconds_since(t0));

  // Infinitesimal Einstein operator on constant curvature.
  t0 = Clock::now();
  merge(rep, run_trials("einstein", 5, cfg.tolerance, [&](int t, TrialLog& log) {
          Rng rng(trial_seed(cfg.seed, 12, static_cast<std::uint64_t>(t)));
          Point<Q> p = random_point_in_ball(rng, ratio(1, 2));
          SymField generic = random_sym_field(rng, 2);
          LinearizationPacket<Q> G = linearization(ball, generic, p);
          const Q& s = G.geo.s;
          log.zero("einstein.r0_constant_curvature", "R0(h) = -(s/6)(h - tr h g) on constant curvature",
                   G.r0 - Q(-s / 6) * (G.h - G.tr_h * G.geo.metric.g()));

          SymField h = project_tt_at(ball, generic, p);
          LinearizationPacket<Q> L = linearization(ball, h, p);
          log.zero("einstein.tt_constraints", "projected h has tr h = 0 to second order and nabla* h = 0 to first order",
                   tt_constraints(L));
          EinsteinDeformation<Q> r = einstein_def_residual(L);
          log.zero("einstein.reduction", "d Ric(h) = (1/2)(nabla* nabla h + (2/3) s h - 2 R0(h)) for TT h",
                   r.reduction_defect);
          log.zero("einstein.constant_curvature_residual", "nabla* nabla h - 2 R0(h) = nabla* nabla h + (s/3) h for TT h",
                   r.residual - (L.rough_laplacian + Q(s / 3) * L.h));
          auto f = fd::fd_einstein_operator(ball, h, p, Q(ratio(1, 10000)));
          Sym2<Q> fd_res = f.rough_laplacian - Q(2) * f.r0;
          log.bound("einstein.residual_vs_fd", "nabla* nabla h - 2 R0(h) against finite-difference assembly",
                    rel_err(to_double(r.residual), to_double(fd_res)), 1e-6, "deformation " + std::to_string(t));
        }));
  rep.set_timing("einstein", seconds_since(t0));
  return rep;
}

Report run_harmonic(const ChartGeometry& chart, const Rational& kappa, int samples, const SuiteConfig& in) {
  SuiteConfig cfg = resolved(in);
  Report rep("harmonic", cfg);
  if (samples < 1) throw Error(ErrorKind::MalformedConfig, "samples: must be at least 1");
  Rng rng(trial_seed(cfg.seed, 20, 0));
  std::vector<Point<Q>> points;
  Q radius = chart.domain() == ChartGeometry::Domain::Ball ? Q(chart.radius() / 2) : Q(3);
  for (int i = 0; i < samples; ++i) points.push_back(random_point_in_ball(rng, radius));

  auto t0 = Clock::now();
  SolitonParams params(kappa);
  try {
    HarmonicReport h;
    if (cfg.mode == Mode::Exact) {
      h = harmonic_dilaton_test(chart, points, params);
    } else {
      std::vector<Point<double>> pd;
      for (const auto& p : points) pd.push_back(cast_point<double>(p));
      h = harmonic_dilaton_test(chart, pd, params, cfg.tolerance);
    }
    nlohmann::json j;
    j["samples"] = h.samples;
    j["samples_with_nonzero_dphi"] = h.samples_in_U;
    j["regime"] = h.regime;
    if (h.f_value) {
      j["f_value"] = *h.f_value;
      j["f_expected"] = h.f_expected;
    }
    rep.set_result("harmonic", j);
    Table t{"harmonic_steps", {"step", "sample", "defect", "pass"}, {}};
    for (const auto& s : h.steps) {
      t.rows.push_back({s.name, std::to_string(s.sample), format_double(s.defect), s.pass ? "true" : "false"});
      rep.check("harmonic." + s.name, "harmonic-curvature chain step " + s.name, s.pass ? s.defect : std::max(s.defect, 1.0),
                s.pass ? std::max(s.defect, 0.0) : 0.0, "sample " + std::to_string(s.sample));
    }
    rep.add_table(t);
    rep.verdict("harmonic.chain", "d*R = 0 forces Ric = (s/2)(g - u (x) u) and constant f where d phi != 0", h.pass(),
                h.first_violation ? "violated at " + h.first_violation->name : "");
  } catch (const Error& e) {
    rep.verdict("harmonic.chain", "d*R = 0 forces Ric = (s/2)(g - u (x) u) and constant f where d phi != 0", false,
                e.what());
  }
  rep.set_timing("harmonic", seconds_since(t0));
  return rep;
}

Report run_search(const std::vector<FamilySpec>& catalogue, const SearchRequest& req, const SuiteConfig& in) {
  SuiteConfig cfg = resolved(in);
  Report rep("search", cfg);
  SolitonParams params(req.kappa);
  std::vector<const FamilySpec*> fams;
  if (req.family)
    fams.push_back(&find_family(catalogue, *req.family));
  else
    for (const auto& f : catalogue) fams.push_back(&f);

  for (const FamilySpec* fam : fams) {
    SearchConfig sc = req.search;
    sc.seed = cfg.seed;
    auto t0 = Clock::now();
    SearchResult r = lm_solve(*fam, params, sc);
    double secs = seconds_since(t0);
    rep.set_timing("search." + fam->name, secs);

    nlohmann::json j;
    j["converged"] = r.converged;
    j["failure"] = nullptr;
    if (r.failure) j["failure"] = to_string(*r.failure);
    j["iterations"] = r.iterations;
    j["restarts"] = r.restarts;
    for (std::size_t i = 0; i < r.params.size(); ++i) j["params"][fam->params[i].name] = r.params[i];
    j["e2phi"] = r.e2phi;
    j["objective"] = r.objective;
    j["s"] = r.s;
    j["ricci_eigenvalues"] = r.ricci_eigenvalues;
    j["einstein"] = r.einstein;
    j["matches_classification"] = r.matches_classification;

    Table hist{"history_" + fam->name, {"iteration", "objective"}, {}};
    for (std::size_t i = 0; i < r.history.size(); ++i) hist.rows.push_back({std::to_string(i + 1), format_double(r.history[i])});
    rep.add_table(hist);

    const std::string base = "search." + fam->name;
    if (r.converged) {
      // A converged point must be the hyperbolic soliton of the classification.
      rep.verdict(base + ".solution_classified", "a converged solution is Einstein with kappa s = -24, kappa e^{2 phi} = 48",
                  r.matches_classification, "converged to an unclassified point");
      rep.check(base + ".objective", "objective at the converged point is below 1e-10", r.objective, 1e-10);
      rep.check(base + ".iterations", "converges in fewer than 200 iterations", r.iterations, 199);
    } else {
      rep.verdict(base + ".no_spurious_solution", "without convergence the best objective stays positive",
                  r.objective > 0, "objective reached zero without convergence");
      GridScan g = grid_scan(*fam, params, req.grid_nx, req.grid_ny);
      j["grid"] = {{"x", g.x_name}, {"y", g.y_name}, {"nx", g.nx}, {"ny", g.ny}, {"min_objective", g.min_objective},
                   {"best", g.best}};
      rep.verdict(base + ".grid_positive", "objective is positive at every grid point (empirical)", g.min_objective > 0,
                  "grid minimum " + format_double(g.min_objective));
      Table gt{"grid_" + fam->name, {g.x_name, g.y_name, "objective"}, {}};
      for (const auto& s : g.samples) gt.rows.push_back({format_double(s[0]), format_double(s[1]), format_double(s[2])});
      rep.add_table(gt);
    }
    rep.set_result(fam->name, j);
  }
  return rep;
}

}  // namespace hetsol
