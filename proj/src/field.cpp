#include "hetsol/field.hpp"

#include <algorithm>
#include <sstream>

namespace hetsol {

// --- Polynomial --------------------------------------------------------------

Polynomial::Polynomial(std::map<MultiIndex, Rational> terms) {
  for (auto& [e, c] : terms)
    if (c != 0) terms_.emplace(e, c);
}

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({{MultiIndex{0, 0, 0}, c}}); }

Polynomial Polynomial::coordinate(int axis) {
  MultiIndex e{0, 0, 0};
  e[axis] = 1;
  return Polynomial({{e, Rational(1)}});
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::map<MultiIndex, Rational> t = a.terms_;
  for (const auto& [e, c] : b.terms_) t[e] += c;
  return Polynomial(std::move(t));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::map<MultiIndex, Rational> t;
  for (const auto& [e1, c1] : a.terms_)
    for (const auto& [e2, c2] : b.terms_) t[{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}] += c1 * c2;
  return Polynomial(std::move(t));
}

Polynomial operator*(const Rational& s, const Polynomial& a) {
  std::map<MultiIndex, Rational> t;
  for (const auto& [e, c] : a.terms_) t[e] = s * c;
  return Polynomial(std::move(t));
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorKind::MalformedConfig, "zero denominator polynomial");
}

// --- TrigPolynomial ----------------------------------------------------------

namespace {

// Canonical representative of +-k and the sign flip applied to the sine part.
std::pair<MultiIndex, int> canonical(MultiIndex k) {
  for (int i = 0; i < 3; ++i) {
    if (k[i] > 0) return {k, 1};
    if (k[i] < 0) return {{-k[0], -k[1], -k[2]}, -1};
  }
  return {k, 0};
}

MultiIndex add(const MultiIndex& a, const MultiIndex& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
MultiIndex sub(const MultiIndex& a, const MultiIndex& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace

void TrigPolynomial::add(const MultiIndex& k, const Rational& a, const Rational& b) {
  auto [kc, flip] = canonical(k);
  auto& c = terms_[kc];
  c.cos_part += a;
  if (flip != 0) c.sin_part += flip > 0 ? b : Rational(-b);
}

void TrigPolynomial::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.cos_part == 0 && it->second.sin_part == 0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

TrigPolynomial TrigPolynomial::constant(const Rational& c) {
  TrigPolynomial t;
  t.add({0, 0, 0}, c, 0);
  t.prune();
  return t;
}

TrigPolynomial TrigPolynomial::cosine(const MultiIndex& k, const Rational& a) {
  TrigPolynomial t;
  t.add(k, a, 0);
  t.prune();
  return t;
}

TrigPolynomial TrigPolynomial::sine(const MultiIndex& k, const Rational& b) {
  TrigPolynomial t;
  t.add(k, 0, b);
  t.prune();
  return t;
}

int TrigPolynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_)
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(k[i]));
  return d;
}

bool TrigPolynomial::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first == MultiIndex{0, 0, 0}; });
}

Rational TrigPolynomial::constant_term() const {
  auto it = terms_.find({0, 0, 0});
  return it == terms_.end() ? Rational(0) : it->second.cos_part;
}

Rational TrigPolynomial::quadrature_mean(int nodes_per_axis) const {
  if (nodes_per_axis < 1) throw Error(ErrorKind::MalformedConfig, "quadrature needs at least one node");
  Rational acc = 0;
  for (const auto& [k, c] : terms_)
    if (k[0] % nodes_per_axis == 0 && k[1] % nodes_per_axis == 0 && k[2] % nodes_per_axis == 0)
      acc += c.cos_part;
  return acc;
}

TrigPolynomial TrigPolynomial::derivative(int axis) const {
  TrigPolynomial out;
  for (const auto& [k, c] : terms_) {
    // d/dx (a cos + b sin)(k.x) = k_axis (b cos - a sin)
    Rational ka = k[axis];
    out.add(k, ka * c.sin_part, -ka * c.cos_part);
  }
  out.prune();
  return out;
}

TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b) {
  TrigPolynomial out = a;
  for (const auto& [k, c] : b.terms_) out.add(k, c.cos_part, c.sin_part);
  out.prune();
  return out;
}

TrigPolynomial operator-(const TrigPolynomial& a, const TrigPolynomial& b) {
  return a + Rational(-1) * b;
}

TrigPolynomial operator*(const Rational& s, const TrigPolynomial& a) {
  TrigPolynomial out;
  for (const auto& [k, c] : a.terms_) out.add(k, s * c.cos_part, s * c.sin_part);
  out.prune();
  return out;
}

TrigPolynomial operator*(const TrigPolynomial& x, const TrigPolynomial& y) {
  // Product-to-sum with p = k.x, q = l.x:
  //   cos p cos q = (cos(p-q) + cos(p+q))/2     sin p sin q = (cos(p-q) - cos(p+q))/2
  //   sin p cos q = (sin(p+q) + sin(p-q))/2     cos p sin q = (sin(p+q) - sin(p-q))/2
  TrigPolynomial out;
  const Rational half(1, 2);
  for (const auto& [k, a] : x.terms_)
    for (const auto& [l, b] : y.terms_) {
      MultiIndex plus = add(k, l), minus = sub(k, l);
      Rational cc = a.cos_part * b.cos_part, ss = a.sin_part * b.sin_part;
      Rational sc = a.sin_part * b.cos_part, cs = a.cos_part * b.sin_part;
      out.add(minus, half * (cc + ss), half * (sc - cs));
      out.add(plus, half * (cc - ss), half * (sc + cs));
    }
  out.prune();
  return out;
}

// --- JSON --------------------------------------------------------------------

namespace {

Rational coeff_from_json(const nlohmann::json& j, const std::string& path) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return Rational(j.get<double>());
  throw Error(ErrorKind::MalformedConfig, path + ": expected a number or rational string");
}

MultiIndex index_from_key(const std::string& key, const std::string& path) {
  MultiIndex e{};
  std::stringstream ss(key);
  std::string part;
  int n = 0;
  while (std::getline(ss, part, ',')) {
    if (n >= 3) break;
    try {
      e[n++] = std::stoi(part);
    } catch (const std::exception&) {
      n = -1;
      break;
    }
  }
  if (n != 3) throw Error(ErrorKind::MalformedConfig, path + ": bad multi-index key '" + key + "'");
  return e;
}

std::string key_of(const MultiIndex& e) {
  return std::to_string(e[0]) + "," + std::to_string(e[1]) + "," + std::to_string(e[2]);
}

Polynomial polynomial_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, path + ": expected an object of coefficients");
  std::map<MultiIndex, Rational> terms;
  for (const auto& [key, val] : j.items()) {
    MultiIndex e = index_from_key(key, path);
    if (e[0] < 0 || e[1] < 0 || e[2] < 0)
      throw Error(ErrorKind::MalformedConfig, path + ": negative exponent in '" + key + "'");
    terms[e] += coeff_from_json(val, path + "." + key);
  }
  return Polynomial(std::move(terms));
}

nlohmann::json polynomial_to_json(const Polynomial& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [e, c] : p.terms()) j[key_of(e)] = to_string(c);
  return j;
}

}  // namespace

FieldExpr FieldExpr::from_json(const nlohmann::json& j, const std::string& path) {
  if (j.is_string() || j.is_number()) return constant(coeff_from_json(j, path));
  if (!j.is_object() || !j.contains("class"))
    throw Error(ErrorKind::MalformedConfig, path + ": field needs a 'class'");
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "polynomial") {
    if (!j.contains("coefficients")) throw Error(ErrorKind::MalformedConfig, path + ": missing 'coefficients'");
    return FieldExpr(polynomial_from_json(j.at("coefficients"), path + ".coefficients"));
  }
  if (cls == "rational") {
    if (!j.contains("numerator") || !j.contains("denominator"))
      throw Error(ErrorKind::MalformedConfig, path + ": rational field needs 'numerator' and 'denominator'");
    return FieldExpr(RationalFunction(polynomial_from_json(j.at("numerator"), path + ".numerator"),
                                      polynomial_from_json(j.at("denominator"), path + ".denominator")));
  }
  if (cls == "trig") {
    TrigPolynomial t;
    for (const char* part : {"cos", "sin"}) {
      if (!j.contains(part)) continue;
      for (const auto& [key, val] : j.at(part).items()) {
        MultiIndex k = index_from_key(key, path + "." + part);
        Rational c = coeff_from_json(val, path + "." + part + "." + key);
        if (std::string(part) == "cos")
          t = t + TrigPolynomial::cosine(k, c);
        else
          t = t + TrigPolynomial::sine(k, c);
      }
    }
    return FieldExpr(t);
  }
  throw Error(ErrorKind::MalformedConfig, path + ": unknown field class '" + cls + "'");
}

nlohmann::json FieldExpr::to_json() const {
  nlohmann::json j;
  if (const auto* p = polynomial()) {
    j["class"] = "polynomial";
    j["coefficients"] = polynomial_to_json(*p);
  } else if (const auto* r = rational()) {
    j["class"] = "rational";
    j["numerator"] = polynomial_to_json(r->numerator());
    j["denominator"] = polynomial_to_json(r->denominator());
  } else {
    j["class"] = "trig";
    nlohmann::json c = nlohmann::json::object(), s = nlohmann::json::object();
    for (const auto& [k, v] : trig()->terms()) {
      if (v.cos_part != 0) c[key_of(k)] = to_string(v.cos_part);
      if (v.sin_part != 0) s[key_of(k)] = to_string(v.sin_part);
    }
    j["cos"] = c;
    j["sin"] = s;
  }
  return j;
}

}  // namespace hetsol
