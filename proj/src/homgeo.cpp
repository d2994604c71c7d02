#include "hetsol/homgeo.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Dense>

namespace hetsol {

std::vector<double> soliton_residual_vector(const LieFamily<double>& f, const SolitonParams& params,
                                            double e2phi) {
  SolitonResidual<double> r = residuals(lie_geometry(f, std::optional<double>(e2phi)), params);
  const auto& d = f.d;
  std::vector<double> out;
  out.reserve(37);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.push_back(r.E(i, j) / std::sqrt(d[i] * d[j]));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) out.push_back(r.YM(a, b, c) / std::sqrt(2 * d[a] * d[b] * d[c]));
  out.push_back(r.D);
  return out;
}

// --- Catalogue ------------------------------------------------------------------

namespace {

bool looks_numeric(const std::string& s) {
  for (char ch : s)
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '/' || ch == '.' ||
          ch == 'e' || ch == 'E' || ch == ' '))
      return false;
  return !s.empty();
}

FamilyCoeff coeff_from_json(const nlohmann::json& j, const std::string& path) {
  FamilyCoeff c;
  if (j.is_number_integer()) {
    c.scale = Rational(j.get<long>());
  } else if (j.is_number()) {
    c.scale = Rational(j.get<double>());
  } else if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (looks_numeric(s))
      c.scale = parse_rational(s);
    else
      c.param = s;
  } else if (j.is_object()) {
    if (!j.contains("param")) throw Error(ErrorKind::MalformedConfig, path + ": missing 'param'");
    c.param = j.at("param").get<std::string>();
    if (j.contains("scale")) c.scale = coeff_from_json(j.at("scale"), path + ".scale").scale;
  } else {
    throw Error(ErrorKind::MalformedConfig, path + ": expected a number, rational string or parameter name");
  }
  return c;
}

nlohmann::json coeff_to_json(const FamilyCoeff& c) {
  if (c.param.empty()) return to_string(c.scale);
  if (c.scale == 1) return c.param;
  return {{"param", c.param}, {"scale", to_string(c.scale)}};
}

double number_at(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw Error(ErrorKind::MalformedConfig, path + ": missing '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_rational(v.get<std::string>()).get_d();
  throw Error(ErrorKind::MalformedConfig, path + "." + key + ": expected a number");
}

ParamSpec param_from_json(const nlohmann::json& j, const std::string& path) {
  ParamSpec p;
  p.name = j.contains("name") ? j.at("name").get<std::string>() : "e2phi";
  p.lower = number_at(j, "lower", path);
  p.upper = number_at(j, "upper", path);
  p.start = number_at(j, "start", path);
  if (!(p.lower < p.upper)) throw Error(ErrorKind::MalformedConfig, path + ": lower must be below upper");
  return p;
}

nlohmann::json param_to_json(const ParamSpec& p) {
  return {{"name", p.name}, {"lower", p.lower}, {"upper", p.upper}, {"start", p.start}};
}

}  // namespace

int FamilySpec::param_index(const std::string& n) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == n) return static_cast<int>(i);
  throw Error(ErrorKind::MalformedConfig, "family " + name + ": unknown parameter '" + n + "'");
}

FamilySpec FamilySpec::from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, path + ": expected an object");
  FamilySpec f;
  if (!j.contains("name")) throw Error(ErrorKind::MalformedConfig, path + ": missing 'name'");
  f.name = j.at("name").get<std::string>();
  if (j.contains("description")) f.description = j.at("description").get<std::string>();
  if (j.contains("parameters")) {
    int k = 0;
    for (const auto& p : j.at("parameters")) {
      std::string pp = path + ".parameters[" + std::to_string(k++) + "]";
      if (!p.contains("name")) throw Error(ErrorKind::MalformedConfig, pp + ": missing 'name'");
      f.params.push_back(param_from_json(p, pp));
    }
  }
  if (j.contains("brackets")) {
    int k = 0;
    for (const auto& b : j.at("brackets")) {
      std::string bp = path + ".brackets[" + std::to_string(k++) + "]";
      FamilyBracket br;
      br.i = static_cast<int>(number_at(b, "i", bp)) - 1;
      br.j = static_cast<int>(number_at(b, "j", bp)) - 1;
      br.k = static_cast<int>(number_at(b, "k", bp)) - 1;
      for (int idx : {br.i, br.j, br.k})
        if (idx < 0 || idx > 2) throw Error(ErrorKind::MalformedConfig, bp + ": indices run over 1..3");
      if (br.i == br.j) throw Error(ErrorKind::MalformedConfig, bp + ": [e_i, e_i] is zero");
      if (!b.contains("coeff")) throw Error(ErrorKind::MalformedConfig, bp + ": missing 'coeff'");
      br.coeff = coeff_from_json(b.at("coeff"), bp + ".coeff");
      f.brackets.push_back(br);
    }
  }
  if (!j.contains("metric") || !j.at("metric").is_array() || j.at("metric").size() != 3)
    throw Error(ErrorKind::MalformedConfig, path + ".metric: expected three diagonal entries");
  for (int i = 0; i < 3; ++i)
    f.metric[i] = coeff_from_json(j.at("metric")[i], path + ".metric[" + std::to_string(i) + "]");
  if (j.contains("e2phi")) f.weight = param_from_json(j.at("e2phi"), path + ".e2phi");
  if (f.weight.lower <= 0) throw Error(ErrorKind::MalformedConfig, path + ".e2phi: lower bound must be positive");

  // Every parameter reference must resolve.
  for (const auto& b : f.brackets)
    if (!b.coeff.param.empty()) f.param_index(b.coeff.param);
  for (const auto& m : f.metric)
    if (!m.param.empty()) f.param_index(m.param);
  return f;
}

nlohmann::json FamilySpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  if (!description.empty()) j["description"] = description;
  j["parameters"] = nlohmann::json::array();
  for (const auto& p : params) j["parameters"].push_back(param_to_json(p));
  j["brackets"] = nlohmann::json::array();
  for (const auto& b : brackets)
    j["brackets"].push_back({{"i", b.i + 1}, {"j", b.j + 1}, {"k", b.k + 1}, {"coeff", coeff_to_json(b.coeff)}});
  j["metric"] = nlohmann::json::array();
  for (const auto& m : metric) j["metric"].push_back(coeff_to_json(m));
  nlohmann::json w = param_to_json(weight);
  w.erase("name");
  j["e2phi"] = w;
  return j;
}

std::vector<FamilySpec> catalogue_from_json(const nlohmann::json& j) {
  if (!j.contains("families") || !j.at("families").is_array())
    throw Error(ErrorKind::MalformedConfig, "catalogue: missing 'families' array");
  std::vector<FamilySpec> out;
  int k = 0;
  for (const auto& f : j.at("families"))
    out.push_back(FamilySpec::from_json(f, "catalogue.families[" + std::to_string(k++) + "]"));
  return out;
}

std::vector<FamilySpec> load_catalogue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedConfig, "cannot open catalogue file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path + ": " + e.what());
  }
  return catalogue_from_json(j);
}

const FamilySpec& find_family(const std::vector<FamilySpec>& cat, const std::string& name) {
  for (const auto& f : cat)
    if (f.name == name) return f;
  throw Error(ErrorKind::MalformedConfig, "no family named '" + name + "' in the catalogue");
}

// --- Levenberg-Marquardt --------------------------------------------------------

void SearchConfig::check() const {
  if (!(tolerance > 0) || !(step_tolerance > 0))
    throw Error(ErrorKind::MalformedConfig, "search: tolerances must be positive");
  if (max_iterations < 0) throw Error(ErrorKind::MalformedConfig, "search: max_iterations must be >= 0");
  if (!(lambda0 > 0) || !(lambda_factor > 1))
    throw Error(ErrorKind::MalformedConfig, "search: damping must be positive with factor > 1");
}

namespace {

struct Problem {
  const FamilySpec& fam;
  const SolitonParams& params;
  int n;  // parameters plus log e^{2 phi}

  LieFamily<double> family(const Eigen::VectorXd& x) const {
    std::vector<double> v(x.data(), x.data() + n - 1);
    return fam.instantiate(v);
  }
  // Empty on a degenerate point (nonpositive metric entry).
  std::optional<Eigen::VectorXd> residual(const Eigen::VectorXd& x) const {
    try {
      std::vector<double> r = soliton_residual_vector(family(x), params, std::exp(x[n - 1]));
      return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateMetric || e.kind() == ErrorKind::SingularMetric) return std::nullopt;
      throw;
    }
  }
  Eigen::VectorXd clamp(Eigen::VectorXd x) const {
    for (int i = 0; i < n - 1; ++i) x[i] = std::clamp(x[i], fam.params[i].lower, fam.params[i].upper);
    x[n - 1] = std::clamp(x[n - 1], std::log(fam.weight.lower), std::log(fam.weight.upper));
    return x;
  }
  std::optional<Eigen::MatrixXd> jacobian(const Eigen::VectorXd& x, Eigen::Index rows) const {
    Eigen::MatrixXd J(rows, n);
    for (int k = 0; k < n; ++k) {
      double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Eigen::VectorXd xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      auto rp = residual(xp), rm = residual(xm);
      if (!rp || !rm) return std::nullopt;
      J.col(k) = (*rp - *rm) / (2 * h);
    }
    return J;
  }
};

}  // namespace

SearchResult lm_solve(const FamilySpec& fam, const SolitonParams& params, const SearchConfig& cfg) {
  cfg.check();
  const int n = static_cast<int>(fam.params.size()) + 1;
  if (!cfg.initial.empty() && static_cast<int>(cfg.initial.size()) != n - 1)
    throw Error(ErrorKind::MalformedConfig, "search: family " + fam.name + " takes " + std::to_string(n - 1) +
                                                " parameters");
  Problem pb{fam, params, n};
  Eigen::VectorXd x(n);
  for (int i = 0; i < n - 1; ++i)
    x[i] = cfg.initial.empty() ? fam.params[i].start : cfg.initial[static_cast<std::size_t>(i)];
  x[n - 1] = std::log(cfg.initial_e2phi.value_or(fam.weight.start));

  std::mt19937_64 rng(cfg.seed);
  auto perturb = [&](Eigen::VectorXd y) {
    for (int i = 0; i < n; ++i) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      y[i] += 0.1 * (2 * u - 1) * std::max(1.0, std::abs(y[i]));
    }
    return cfg.clamp_to_bounds ? pb.clamp(y) : y;
  };

  SearchResult res;
  res.family = fam.name;
  auto finish = [&](const Eigen::VectorXd& xf, double objective) {
    res.params.assign(xf.data(), xf.data() + n - 1);
    res.e2phi = std::exp(xf[n - 1]);
    res.objective = objective;
    PointGeometry<double> pg = lie_geometry(pb.family(xf), std::optional<double>(res.e2phi));
    res.s = pg.geo.s;
    res.ricci_eigenvalues = eigen_report(pg.geo.metric.g(), pg.geo.ric).eigenvalues;
    double scale = std::max(1.0, std::abs(res.s));
    res.einstein = true;
    for (double ev : res.ricci_eigenvalues)
      if (std::abs(ev - res.s / 3) > 1e-6 * scale) res.einstein = false;
    ClassificationReport c = classify_constant_dilaton(params);
    res.matches_classification = res.einstein && std::abs(res.s - c.s.get_d()) <= 1e-6 * scale &&
                                 std::abs(res.e2phi - c.e2phi.get_d()) <= 1e-4 * std::abs(c.e2phi.get_d());
    return res;
  };

  auto r = pb.residual(x);
  if (!r) throw Error(ErrorKind::DegenerateMetric, "search: start point has a degenerate metric");
  double obj = r->squaredNorm();
  Eigen::VectorXd best_x = x;
  double best_obj = obj;
  double lambda = cfg.lambda0;
  const int max_restarts = 5;
  std::optional<Eigen::MatrixXd> J = pb.jacobian(x, r->size());

  for (int it = 0;; ++it) {
    // A Jacobian that cannot be evaluated or carries no information: damped restart
    // from a perturbed point.
    bool singular = !J || !J->allFinite() || J->isZero(0);
    if (singular) {
      if (res.restarts >= max_restarts) {
        res.failure = ErrorKind::SingularJacobian;
        return finish(best_x, best_obj);
      }
      ++res.restarts;
      x = perturb(best_x);
      r = pb.residual(x);
      if (!r) continue;
      obj = r->squaredNorm();
      lambda = cfg.lambda0;
      J = pb.jacobian(x, r->size());
      continue;
    }
    Eigen::MatrixXd A = J->transpose() * (*J);
    Eigen::VectorXd grad = J->transpose() * (*r);
    // Marquardt scaling by diag(J^T J); columns the residual does not see get scale 1.
    Eigen::VectorXd scale = A.diagonal();
    for (int k = 0; k < n; ++k)
      if (!(scale[k] > 0)) scale[k] = 1;
    Eigen::MatrixXd M = A;
    M.diagonal() += lambda * scale;
    Eigen::VectorXd step = M.ldlt().solve(-grad);
    Eigen::VectorXd xn = x + step;
    if (cfg.clamp_to_bounds) xn = pb.clamp(xn);
    double step_norm = (xn - x).norm();
    if (obj <= cfg.tolerance && step_norm < cfg.step_tolerance) {
      res.converged = true;
      return finish(x, obj);
    }
    if (it >= cfg.max_iterations) {
      res.failure = ErrorKind::MaxIterations;
      return finish(best_x, best_obj);
    }
    res.iterations = it + 1;
    auto rn = pb.residual(xn);
    double on = rn ? rn->squaredNorm() : HUGE_VAL;
    if (on < obj) {
      x = xn;
      r = rn;
      obj = on;
      if (obj < best_obj) {
        best_obj = obj;
        best_x = x;
      }
      lambda = std::max(lambda / cfg.lambda_factor, 1e-15);
      res.history.push_back(obj);
      J = pb.jacobian(x, r->size());
    } else {
      lambda = std::min(lambda * cfg.lambda_factor, 1e16);
      if (lambda >= 1e16 && obj <= cfg.tolerance) {
        // No representable decrease left: the iterate is as good as double allows.
        res.converged = true;
        return finish(x, obj);
      }
    }
  }
}

GridScan grid_scan(const FamilySpec& fam, const SolitonParams& params, int nx, int ny) {
  GridScan g;
  g.family = fam.name;
  g.nx = nx;
  g.ny = ny;
  g.min_objective = HUGE_VAL;
  std::vector<double> base;
  for (const auto& p : fam.params) base.push_back(p.start);
  const bool has_param = !fam.params.empty();
  g.x_name = has_param ? fam.params[0].name : "(none)";
  g.y_name = "e2phi";
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      std::vector<double> v = base;
      double x = 0;
      if (has_param) {
        const auto& p = fam.params[0];
        x = p.lower + (p.upper - p.lower) * ix / std::max(1, nx - 1);
        v[0] = x;
      }
      double w = fam.weight.lower + (fam.weight.upper - fam.weight.lower) * iy / std::max(1, ny - 1);
      double o = soliton_objective(fam.instantiate(v), params, w);
      g.samples.push_back({x, w, o});
      if (o < g.min_objective) {
        g.min_objective = o;
        g.best = v;
        g.best.push_back(w);
      }
    }
  return g;
}

}  // namespace hetsol
