#pragma once

// Randomized identity suites and experiment runs behind the command line.
// Each returns a Report; trials run concurrently with per-trial seeds, so the
// report does not depend on scheduling.

#include <optional>
#include <string>
#include <vector>

#include "hetsol/chart.hpp"
#include "hetsol/homgeo.hpp"
#include "hetsol/report.hpp"

namespace hetsol {

// Curvature dictionary, differential identities, the two residual formulations,
// the constant-dilaton constants, linearization invariants and the homogeneous
// background, all at cfg.seed with cfg.trials algebraic trials.
Report run_verify(const SuiteConfig& cfg);

Report run_classify(const Rational& kappa, const SuiteConfig& cfg);

// Finite-difference sweeps of the curvature linearization, torus gauge pairing,
// the essential-deformation coefficients and the Einstein-deformation operator.
Report run_linearize(const SuiteConfig& cfg);

// Harmonic-curvature chain at `samples` seeded points of the chart (inside half its radius).
Report run_harmonic(const ChartGeometry& chart, const Rational& kappa, int samples, const SuiteConfig& cfg);

struct SearchRequest {
  std::optional<std::string> family;  // all catalogue families when empty
  Rational kappa = 1;
  SearchConfig search;
  int grid_nx = 20, grid_ny = 20;
};

Report run_search(const std::vector<FamilySpec>& catalogue, const SearchRequest& req, const SuiteConfig& cfg);

}  // namespace hetsol
