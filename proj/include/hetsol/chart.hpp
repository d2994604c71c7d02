#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "hetsol/algebra3.hpp"
#include "hetsol/field.hpp"

namespace hetsol {

// Six FieldExprs holding the upper triangle of a symmetric 2-tensor field.
using SymField = std::array<FieldExpr, 6>;
// Three FieldExprs holding the components of a vector field.
using VecField = std::array<FieldExpr, 3>;

template <class T>
std::array<Jet<T>, 6> sym_jets(const SymField& f, const Point<T>& p, int order) {
  std::array<Jet<T>, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = f[i].jet(p, order);
  return out;
}

template <class T>
Sym2<T> sym_values(const SymField& f, const Point<T>& p) {
  std::array<T, 6> v;
  for (int i = 0; i < 6; ++i) v[i] = f[i].evaluate(p);
  return Sym2<T>(v);
}

// The dilaton is given either by phi itself or by the weight W = e^{2 phi}.
// The weight form keeps e^{2 phi} rational at rational points.
struct DilatonField {
  enum class Form { Phi, Exp2Phi };
  Form form = Form::Phi;
  FieldExpr field = FieldExpr::constant(0);

  static DilatonField phi(FieldExpr f) { return {Form::Phi, std::move(f)}; }
  static DilatonField exp2phi(FieldExpr w) { return {Form::Exp2Phi, std::move(w)}; }
};

template <class T>
struct DilatonJets {
  std::array<Jet<T>, 3> dphi;  // partial_i phi, expanded to order n - 1
  std::optional<T> e2phi;      // absent when not representable in T
};

class ChartGeometry {
 public:
  enum class Domain { Ball, Torus };

  ChartGeometry(SymField metric, DilatonField dilaton, Domain domain, Rational radius = 1);

  const SymField& metric() const { return metric_; }
  const DilatonField& dilaton() const { return dilaton_; }
  Domain domain() const { return domain_; }
  const Rational& radius() const { return radius_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  ChartGeometry with_dilaton(DilatonField d) const {
    ChartGeometry c = *this;
    c.dilaton_ = std::move(d);
    return c;
  }

  template <class T>
  void check_domain(const Point<T>& p) const {
    if (domain_ == Domain::Torus) return;
    T r2 = T(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    T rad2 = cast<T>(Rational(radius_ * radius_));
    if (sign_of(T(rad2 - r2)) <= 0)
      throw Error(ErrorKind::OutsideDomain, "point lies outside the ball chart");
  }

  template <class T>
  std::array<Jet<T>, 6> metric_jets(const Point<T>& p, int order) const {
    check_domain(p);
    return sym_jets(metric_, p, order);
  }

  template <class T>
  Sym2<T> metric_values(const Point<T>& p) const {
    check_domain(p);
    return sym_values(metric_, p);
  }

  template <class T>
  DilatonJets<T> dilaton_jets(const Point<T>& p, int order) const {
    check_domain(p);
    DilatonJets<T> out;
    if (dilaton_.form == DilatonField::Form::Phi) {
      Jet<T> phi = dilaton_.field.jet(p, order);
      for (int i = 0; i < 3; ++i) out.dphi[i] = phi.derivative(i);
      if constexpr (std::is_same_v<T, double>) {
        out.e2phi = std::exp(2 * phi.value());
      } else {
        if (sign_of(phi.value()) == 0) out.e2phi = T(1);
      }
    } else {
      Jet<T> w = dilaton_.field.jet(p, order);
      if (sign_of(w.value()) <= 0)
        throw Error(ErrorKind::PreconditionViolated, "dilaton weight e^{2 phi} must be positive");
      Jet<T> two_w = w.truncated(order - 1) * T(2);
      for (int i = 0; i < 3; ++i) out.dphi[i] = w.derivative(i) / two_w;
      out.e2phi = w.value();
    }
    return out;
  }

  static ChartGeometry from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  SymField metric_;
  DilatonField dilaton_;
  Domain domain_;
  Rational radius_;
  std::string name_;
};

SymField sym_field_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json sym_field_to_json(const SymField& f);

// --- Standard charts --------------------------------------------------------

ChartGeometry euclidean_chart();
// g = 4 / (1 - |x|^2)^2 delta on the unit ball: constant curvature -1.
ChartGeometry poincare_ball_chart();
// Poincare ball rescaled to constant curvature -1/L^2 (g = 4 L^2 / (1-|x|^2)^2 delta).
ChartGeometry poincare_ball_chart(const Rational& length_squared);
// Flat 3-torus with constant metric diag(a, b, c).
ChartGeometry flat_torus_chart(const Rational& a, const Rational& b, const Rational& c);

}  // namespace hetsol
