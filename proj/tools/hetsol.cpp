// Command-line front end: runs a suite, writes the JSON report and optional CSV
// tables, exits 0 exactly when every check passes (2 on malformed input).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hetsol/suites.hpp"

using namespace hetsol;

namespace {

nlohmann::json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedConfig, what + ": cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    try {
      out.push_back(parse_rational(item).get_d());
    } catch (const Error&) {
      throw Error(ErrorKind::MalformedConfig, what + ": '" + item + "' is not a number");
    }
  return out;
}

void write_outputs(const Report& rep, const std::string& out, const std::string& csv_dir, bool timings) {
  std::string text = rep.to_json(timings).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorKind::MalformedConfig, "--out: cannot write " + out);
    f << text;
  }
  if (!csv_dir.empty()) {
    std::filesystem::create_directories(csv_dir);
    std::ofstream(std::filesystem::path(csv_dir) / (rep.command() + "_records.csv")) << rep.records_csv();
    for (const auto& t : rep.tables())
      std::ofstream(std::filesystem::path(csv_dir) / (rep.command() + "_" + t.name + ".csv")) << Report::table_csv(t);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature identities, residuals, linearization checks and soliton search in dimension three"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 7;
  int trials = 200;
  std::string mode = "exact";
  double tolerance = 1e-9;
  std::string config_path, out, csv_dir;
  bool no_timings = false;
  auto* o_seed = app.add_option("--seed", seed, "PRNG seed");
  auto* o_trials = app.add_option("--trials", trials, "random trials for the algebraic suite");
  auto* o_mode = app.add_option("--mode", mode, "exact or float (HETSOL_MODE overrides)");
  auto* o_tol = app.add_option("--tolerance", tolerance, "relative tolerance for float comparisons");
  app.add_option("--config", config_path, "JSON file with seed, trials, mode, tolerance, chart, catalogue");
  app.add_option("--out", out, "report path (stdout when omitted)");
  app.add_option("--csv-dir", csv_dir, "directory for CSV exports of records and tables");
  app.add_flag("--no-timings", no_timings, "omit the timings block from the report");

  auto* verify = app.add_subcommand("verify", "full identity suite");
  auto* classify = app.add_subcommand("classify", "constant-dilaton classification for one kappa");
  std::string kappa_text = "1";
  classify->add_option("--kappa", kappa_text, "coupling constant (rational)")->required();
  auto* linearize = app.add_subcommand("linearize", "finite-difference sweeps and coefficient chains");
  auto* harmonic = app.add_subcommand("harmonic", "harmonic-curvature chain on a chart");
  std::string chart_path;
  int samples = 8;
  harmonic->add_option("--chart", chart_path, "chart JSON file");
  harmonic->add_option("--kappa", kappa_text, "coupling constant (rational)");
  harmonic->add_option("--samples", samples, "number of seeded sample points");
  auto* search = app.add_subcommand("search", "Levenberg-Marquardt search over the family catalogue");
  std::string family, catalogue_path, start, start_e2phi;
  SearchConfig sc;
  search->add_option("--family", family, "family name (all when omitted)");
  search->add_option("--kappa", kappa_text, "coupling constant (rational)");
  search->add_option("--catalogue", catalogue_path, "family catalogue JSON");
  search->add_option("--start", start, "comma-separated starting parameters");
  search->add_option("--start-e2phi", start_e2phi, "starting e^{2 phi}");
  search->add_option("--max-iterations", sc.max_iterations, "iteration cap");
  search->add_option("--objective-tolerance", sc.tolerance, "convergence threshold on the objective");
  int grid = 20;
  search->add_option("--grid", grid, "grid points per axis for non-converging families");

  CLI11_PARSE(app, argc, argv);

  try {
    SuiteConfig cfg;
    cfg.catalogue_path = HETSOL_DEFAULT_CATALOGUE;
    if (!config_path.empty()) cfg.merge_json(read_json_file(config_path, "--config"), config_path);
    if (o_seed->count()) cfg.seed = seed;
    if (o_trials->count()) cfg.trials = trials;
    if (o_mode->count()) cfg.mode = parse_mode(mode);
    if (o_tol->count()) cfg.tolerance = tolerance;
    cfg.check();

    Report rep("", cfg);
    if (verify->parsed()) {
      rep = run_verify(cfg);
    } else if (classify->parsed()) {
      rep = run_classify(parse_rational(kappa_text), cfg);
    } else if (linearize->parsed()) {
      rep = run_linearize(cfg);
    } else if (harmonic->parsed()) {
      if (!chart_path.empty()) cfg.chart_path = chart_path;
      if (cfg.chart_path.empty()) throw Error(ErrorKind::MalformedConfig, "harmonic: --chart is required");
      ChartGeometry chart = ChartGeometry::from_json(read_json_file(cfg.chart_path, "--chart"));
      rep = run_harmonic(chart, parse_rational(kappa_text), samples, cfg);
    } else if (search->parsed()) {
      if (!catalogue_path.empty()) cfg.catalogue_path = catalogue_path;
      SearchRequest req;
      if (!family.empty()) req.family = family;
      req.kappa = parse_rational(kappa_text);
      req.search = sc;
      if (!start.empty()) req.search.initial = parse_list(start, "--start");
      if (!start_e2phi.empty()) req.search.initial_e2phi = parse_list(start_e2phi, "--start-e2phi").at(0);
      req.grid_nx = req.grid_ny = grid;
      rep = run_search(load_catalogue(cfg.catalogue_path), req, cfg);
    }

    write_outputs(rep, out, csv_dir, !no_timings);
    if (auto f = rep.first_failure()) {
      std::cerr << rep.command() << ": FAIL " << f->name << ": " << f->detail << "\n";
      return 1;
    }
    std::cerr << rep.command() << ": " << rep.records().size() << " checks passed\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
