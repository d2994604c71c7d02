// Acceptance run: one PASS/FAIL line per criterion, exit 0 only when all pass.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "hetsol/suites.hpp"

using namespace hetsol;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_of(const std::function<void()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every record under `prefix` passes, with at least `min_samples` samples when given.
void require_group(Outcome& o, const Report& rep, const std::string& prefix, int min_samples = 1,
                   bool exact_zero = false) {
  int found = 0;
  for (const auto& [name, r] : rep.records()) {
    if (name.rfind(prefix, 0) != 0) continue;
    ++found;
    if (!r.pass) o.fail(name + ": " + r.detail);
    if (r.samples < min_samples)
      o.fail(name + ": " + std::to_string(r.samples) + " samples, need " + std::to_string(min_samples));
    if (exact_zero && r.defect != 0) o.fail(name + ": defect " + format_double(r.defect) + " is not zero");
  }
  if (found == 0) o.fail("no records under " + prefix);
}

void require_record(Outcome& o, const Report& rep, const std::string& name) {
  auto it = rep.records().find(name);
  if (it == rep.records().end())
    o.fail("missing record " + name);
  else if (!it->second.pass)
    o.fail(name + ": " + it->second.detail);
}

void require_time(Outcome& o, const Report& rep, const std::string& phase, double limit) {
  auto it = rep.timings().find(phase);
  if (it == rep.timings().end()) return o.fail("no timing for " + phase);
  if (it->second >= limit)
    o.fail(phase + " took " + format_double(it->second) + " s, limit " + format_double(limit) + " s");
}

int failures = 0;

void emit(int n, const std::string& title, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title;
  if (!o.pass) {
    std::cout << " (" << o.detail << ")";
    ++failures;
  }
  std::cout << "\n";
}

}  // namespace

int main() {
  try {
    SuiteConfig cfg;
    cfg.catalogue_path = HETSOL_DEFAULT_CATALOGUE;

    Report verify("", cfg);
    double verify_secs = seconds_of([&] { verify = run_verify(cfg); });
    Report linear = run_linearize(cfg);

    {
      Outcome o;
      require_group(o, verify, "curvature.", 200, true);
      require_time(o, verify, "curvature", 10);
      emit(1, "curvature dictionary on 200 exact random instances", o);
    }
    {
      Outcome o;
      require_record(o, verify, "chart.contracted_bianchi");
      require_record(o, verify, "chart.delta_dphi_trace");
      require_group(o, verify, "chart.", 100, true);
      require_time(o, verify, "chart", 20);
      emit(2, "contracted Bianchi and dilaton Laplacian on 20 charts x 5 points", o);
    }
    {
      Outcome o;
      require_record(o, verify, "soliton.d2_relation");
      require_record(o, verify, "soliton.e2_relation");
      require_record(o, verify, "soliton.ym2_equals_ym");
      require_group(o, verify, "soliton.", 1, true);
      emit(3, "the two residual formulations agree exactly", o);
    }
    {
      Outcome o;
      require_group(o, verify, "classification.kappa_one_", 1, true);
      require_group(o, verify, "classification.scaling_", 50, true);
      emit(4, "constant-dilaton constants at kappa = 1 and 50 scaled kappas", o);
    }
    {
      Outcome o;
      require_record(o, verify, "homgeo.hyperbolic_background_exact");
      require_record(o, verify, "homgeo.hyperbolic_background_float");
      auto it = verify.records().find("homgeo.hyperbolic_background_exact");
      if (it != verify.records().end() && it->second.defect != 0) o.fail("exact background residual is not zero");
      emit(5, "hyperbolic background residuals vanish", o);
    }
    {
      Outcome o;
      require_group(o, linear, "fd.", 10);
      require_record(o, linear, "fd.step_halving_ratio_square");
      require_record(o, linear, "fd.step_halving_ratio_norm");
      emit(6, "linearized curvature square and norm against central differences", o);
    }
    {
      Outcome o;
      require_record(o, linear, "gauge.l2_pairing_defect");
      require_group(o, linear, "gauge.", 1, true);
      emit(7, "torus L2 pairing of gauge image and adjoint is exactly zero", o);
    }
    {
      Outcome o;
      require_record(o, linear, "essential.kappa_one");
      require_group(o, linear, "essential.kappa_independence", 50, true);
      require_group(o, linear, "essential.", 1, true);
      emit(8, "essential-deformation coefficient chain", o);
    }
    {
      Outcome o;
      require_record(o, linear, "einstein.r0_constant_curvature");
      require_record(o, verify, "linearize.r0_constant_curvature");
      require_record(o, linear, "einstein.residual_vs_fd");
      require_group(o, linear, "einstein.", 1);
      emit(9, "Einstein-deformation reduction on constant curvature", o);
    }
    {
      Outcome o;
      auto catalogue = load_catalogue(cfg.catalogue_path);
      SolitonParams params(Rational(1));
      SearchConfig sc;
      sc.initial = {1.5};
      sc.initial_e2phi = 30.0;
      SearchResult res;
      double secs = seconds_of([&] { res = lm_solve(find_family(catalogue, "hyperbolic-solvable"), params, sc); });
      std::ostringstream why;
      why << "a = " << format_double(res.params.at(0)) << ", e2phi = " << format_double(res.e2phi)
          << ", objective " << format_double(res.objective) << ", " << res.iterations << " iterations, "
          << format_double(secs) << " s";
      if (!res.converged || std::abs(res.params.at(0) - 2) > 1e-6 || std::abs(res.e2phi - 48) > 1e-4 ||
          !(res.objective < 1e-10) || res.iterations >= 200 || secs >= 5)
        o.fail(why.str());
      for (const char* name : {"heisenberg", "abelian"}) {
        GridScan g = grid_scan(find_family(catalogue, name), params, 20, 20);
        if (!(g.min_objective > 0)) o.fail(std::string(name) + " grid reaches objective 0");
      }
      emit(10, "LM search converges to (2, 48); Heisenberg and abelian grids stay positive", o);
    }
    {
      Outcome o;
      Report again("", cfg);
      double again_secs = seconds_of([&] { again = run_verify(cfg); });
      if (verify.to_json(false).dump() != again.to_json(false).dump()) o.fail("reports differ between runs");
      if (!verify.passed()) o.fail("verify failed at " + verify.first_failure()->name);
      for (double s : {verify_secs, again_secs})
        if (s >= 60) o.fail("verify took " + format_double(s) + " s");
      emit(11, "verify is deterministic for a fixed seed and finishes within 60 s", o);
    }
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
