#include "hetsol/chart.hpp"

namespace hetsol {

namespace {
constexpr std::array<const char*, 6> kSymKeys{"11", "12", "13", "22", "23", "33"};
}

ChartGeometry::ChartGeometry(SymField metric, DilatonField dilaton, Domain domain, Rational radius)
    : metric_(std::move(metric)), dilaton_(std::move(dilaton)), domain_(domain), radius_(std::move(radius)) {
  if (domain_ == Domain::Ball && radius_ <= 0)
    throw Error(ErrorKind::MalformedConfig, "ball radius must be positive");
}

SymField sym_field_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, path + ": expected an object keyed 11..33");
  SymField f;
  for (int i = 0; i < 6; ++i) {
    const char* key = kSymKeys[i];
    if (j.contains(key)) {
      f[i] = FieldExpr::from_json(j.at(key), path + "." + key);
    } else {
      // Accept the transposed key for off-diagonal entries.
      std::string alt{key[1], key[0]};
      if (!j.contains(alt)) throw Error(ErrorKind::MalformedConfig, path + ": missing component " + key);
      f[i] = FieldExpr::from_json(j.at(alt), path + "." + alt);
    }
  }
  return f;
}

nlohmann::json sym_field_to_json(const SymField& f) {
  nlohmann::json j;
  for (int i = 0; i < 6; ++i) j[kSymKeys[i]] = f[i].to_json();
  return j;
}

ChartGeometry ChartGeometry::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, "chart: expected a JSON object");
  Domain domain = Domain::Ball;
  Rational radius = 1;
  if (j.contains("domain")) {
    const std::string d = j.at("domain").get<std::string>();
    if (d == "ball")
      domain = Domain::Ball;
    else if (d == "torus")
      domain = Domain::Torus;
    else
      throw Error(ErrorKind::MalformedConfig, "chart.domain: expected 'ball' or 'torus'");
  }
  if (j.contains("radius")) {
    const auto& r = j.at("radius");
    radius = r.is_string() ? parse_rational(r.get<std::string>()) : Rational(r.get<double>());
  }
  if (!j.contains("metric")) throw Error(ErrorKind::MalformedConfig, "chart: missing 'metric'");
  SymField metric = sym_field_from_json(j.at("metric"), "chart.metric");

  DilatonField dil;
  if (j.contains("dilaton")) {
    const auto& d = j.at("dilaton");
    if (d.contains("phi"))
      dil = DilatonField::phi(FieldExpr::from_json(d.at("phi"), "chart.dilaton.phi"));
    else if (d.contains("exp2phi"))
      dil = DilatonField::exp2phi(FieldExpr::from_json(d.at("exp2phi"), "chart.dilaton.exp2phi"));
    else
      throw Error(ErrorKind::MalformedConfig, "chart.dilaton: expected 'phi' or 'exp2phi'");
  }
  ChartGeometry chart(std::move(metric), std::move(dil), domain, radius);
  if (j.contains("name")) chart.set_name(j.at("name").get<std::string>());
  return chart;
}

nlohmann::json ChartGeometry::to_json() const {
  nlohmann::json j;
  if (!name_.empty()) j["name"] = name_;
  j["domain"] = domain_ == Domain::Ball ? "ball" : "torus";
  if (domain_ == Domain::Ball) j["radius"] = to_string(radius_);
  j["metric"] = sym_field_to_json(metric_);
  j["dilaton"][dilaton_.form == DilatonField::Form::Phi ? "phi" : "exp2phi"] = dilaton_.field.to_json();
  return j;
}

ChartGeometry euclidean_chart() {
  SymField g;
  for (int i = 0; i < 6; ++i) g[i] = FieldExpr::constant(0);
  g[sym_index(0, 0)] = g[sym_index(1, 1)] = g[sym_index(2, 2)] = FieldExpr::constant(1);
  ChartGeometry c(g, DilatonField::phi(FieldExpr::constant(0)), ChartGeometry::Domain::Ball, 1000);
  c.set_name("euclidean");
  return c;
}

ChartGeometry poincare_ball_chart(const Rational& length_squared) {
  // 4 L^2 / (1 - |x|^2)^2
  Polynomial one_minus = Polynomial::constant(1);
  for (int i = 0; i < 3; ++i) {
    MultiIndex e{0, 0, 0};
    e[i] = 2;
    one_minus = one_minus + Polynomial({{e, Rational(-1)}});
  }
  Polynomial den = one_minus * one_minus;
  FieldExpr conf(RationalFunction(Polynomial::constant(Rational(4 * length_squared)), den));
  SymField g;
  for (int i = 0; i < 6; ++i) g[i] = FieldExpr::constant(0);
  g[sym_index(0, 0)] = g[sym_index(1, 1)] = g[sym_index(2, 2)] = conf;
  ChartGeometry c(g, DilatonField::phi(FieldExpr::constant(0)), ChartGeometry::Domain::Ball, 1);
  c.set_name("poincare-ball");
  return c;
}

ChartGeometry poincare_ball_chart() { return poincare_ball_chart(Rational(1)); }

ChartGeometry flat_torus_chart(const Rational& a, const Rational& b, const Rational& c) {
  SymField g;
  for (int i = 0; i < 6; ++i) g[i] = FieldExpr(TrigPolynomial());
  g[sym_index(0, 0)] = FieldExpr(TrigPolynomial::constant(a));
  g[sym_index(1, 1)] = FieldExpr(TrigPolynomial::constant(b));
  g[sym_index(2, 2)] = FieldExpr(TrigPolynomial::constant(c));
  ChartGeometry chart(g, DilatonField::phi(FieldExpr(TrigPolynomial())), ChartGeometry::Domain::Torus);
  chart.set_name("flat-torus");
  return chart;
}

}  // namespace hetsol
