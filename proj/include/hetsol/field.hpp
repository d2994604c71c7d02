#pragma once

// Scalar field expressions on a 3D chart with closed-form derivatives:
// polynomials and rational functions with rational coefficients, and
// trigonometric polynomials on the 2*pi-periodic torus.

#include <array>
#include <cmath>
#include <map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hetsol/jet.hpp"
#include "hetsol/scalar.hpp"

namespace hetsol {

template <class T>
using Point = std::array<T, 3>;

template <class T>
Point<T> cast_point(const Point<Rational>& p) {
  return {cast<T>(p[0]), cast<T>(p[1]), cast<T>(p[2])};
}

namespace detail {
template <class T>
T ipow(const T& x, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}
inline long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace detail

class Polynomial {
 public:
  Polynomial() = default;
  // Coefficients keyed by exponent triple; zero coefficients are dropped.
  explicit Polynomial(std::map<MultiIndex, Rational> terms);
  static Polynomial constant(const Rational& c);
  static Polynomial coordinate(int axis);

  const std::map<MultiIndex, Rational>& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }

  template <class T>
  T evaluate(const Point<T>& p) const {
    T acc(0);
    for (const auto& [e, c] : terms_)
      acc += cast<T>(c) * detail::ipow(p[0], e[0]) * detail::ipow(p[1], e[1]) * detail::ipow(p[2], e[2]);
    return acc;
  }

  template <class T>
  Jet<T> jet(const Point<T>& p, int order) const {
    const auto& tab = MultiIndexTable::get();
    Jet<T> out(order, T(0));
    for (const auto& [e, c] : terms_) {
      T coeff = cast<T>(c);
      for (int idx = 0; idx < out.size(); ++idx) {
        const MultiIndex& a = tab.at(idx);
        if (a[0] > e[0] || a[1] > e[1] || a[2] > e[2]) continue;
        long b = detail::binom(e[0], a[0]) * detail::binom(e[1], a[1]) * detail::binom(e[2], a[2]);
        out.coeff(idx) += coeff * cast<T>(b) * detail::ipow(p[0], e[0] - a[0]) *
                          detail::ipow(p[1], e[1] - a[1]) * detail::ipow(p[2], e[2] - a[2]);
      }
    }
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& s, const Polynomial& a);

 private:
  std::map<MultiIndex, Rational> terms_;
};

class RationalFunction {
 public:
  RationalFunction(Polynomial num, Polynomial den);
  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  template <class T>
  T evaluate(const Point<T>& p) const {
    T d = den_.evaluate(p);
    check_pole(d);
    return T(num_.evaluate(p) / d);
  }
  template <class T>
  Jet<T> jet(const Point<T>& p, int order) const {
    Jet<T> d = den_.jet(p, order);
    check_pole(d.value());
    return num_.jet(p, order) / d;
  }

 private:
  template <class T>
  static void check_pole(const T& d) {
    bool pole;
    if constexpr (is_exact_v<T>)
      pole = sign_of(d) == 0;
    else
      pole = std::abs(to_double(d)) < 1e-300;
    if (pole) throw Error(ErrorKind::PoleAtPoint, "denominator vanishes at evaluation point");
  }
  Polynomial num_, den_;
};

// Finite Fourier sum  sum_k  a_k cos(k.x) + b_k sin(k.x)  with rational
// coefficients. Frequencies are canonical: k = 0, or the first nonzero
// component of k is positive. Exact arithmetic happens in coefficient space.
class TrigPolynomial {
 public:
  struct Coeffs {
    Rational cos_part;
    Rational sin_part;
  };

  TrigPolynomial() = default;
  static TrigPolynomial constant(const Rational& c);
  static TrigPolynomial cosine(const MultiIndex& k, const Rational& a);
  static TrigPolynomial sine(const MultiIndex& k, const Rational& b);

  const std::map<MultiIndex, Coeffs>& terms() const { return terms_; }
  // Largest |k_i| over all frequencies and components.
  int degree() const;
  bool is_constant() const;
  Rational constant_term() const;

  // Exact value of (1/N^3) sum over the N^3 equispaced torus nodes: the sum of
  // cosine coefficients over frequencies with every component divisible by N.
  Rational quadrature_mean(int nodes_per_axis) const;
  TrigPolynomial derivative(int axis) const;

  void add(const MultiIndex& k, const Rational& a, const Rational& b);

  template <class T>
  T evaluate(const Point<T>& p) const {
    if constexpr (is_exact_v<T>) {
      if (!is_constant())
        throw Error(ErrorKind::InexactEvaluation, "trigonometric field at an exact point");
      return cast<T>(constant_term());
    } else {
      static_assert(std::is_same_v<T, double>, "trig fields evaluate in double only");
      double acc = 0;
      for (const auto& [k, c] : terms_) {
        double th = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
        acc += c.cos_part.get_d() * std::cos(th) + c.sin_part.get_d() * std::sin(th);
      }
      return acc;
    }
  }

  template <class T>
  Jet<T> jet(const Point<T>& p, int order) const {
    if constexpr (is_exact_v<T>) {
      if (!is_constant())
        throw Error(ErrorKind::InexactEvaluation, "trigonometric field at an exact point");
      return Jet<T>(order, cast<T>(constant_term()));
    } else {
      static_assert(std::is_same_v<T, double>, "trig fields evaluate in double only");
      const auto& tab = MultiIndexTable::get();
      Jet<double> out(order, 0.0);
      for (const auto& [k, c] : terms_) {
        double th = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
        double cs = std::cos(th), sn = std::sin(th);
        double a = c.cos_part.get_d(), b = c.sin_part.get_d();
        for (int idx = 0; idx < out.size(); ++idx) {
          const MultiIndex& al = tab.at(idx);
          int n = al[0] + al[1] + al[2];
          double kpow = detail::ipow<double>(k[0], al[0]) * detail::ipow<double>(k[1], al[1]) *
                        detail::ipow<double>(k[2], al[2]);
          double fact = 1;
          for (int ai : al)
            for (int m = 2; m <= ai; ++m) fact *= m;
          // d^n/dth^n of cos and sin, rotated by n * pi/2.
          double dcos, dsin;
          switch (n % 4) {
            case 0: dcos = cs; dsin = sn; break;
            case 1: dcos = -sn; dsin = cs; break;
            case 2: dcos = -cs; dsin = -sn; break;
            default: dcos = sn; dsin = -cs; break;
          }
          out.coeff(idx) += kpow * (a * dcos + b * dsin) / fact;
        }
      }
      return out;
    }
  }

  friend TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b);
  friend TrigPolynomial operator-(const TrigPolynomial& a, const TrigPolynomial& b);
  friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b);
  friend TrigPolynomial operator*(const Rational& s, const TrigPolynomial& a);

 private:
  void prune();
  std::map<MultiIndex, Coeffs> terms_;
};

class FieldExpr {
 public:
  enum class Kind { Polynomial, Rational, Trig };

  FieldExpr() : v_(Polynomial()) {}
  FieldExpr(Polynomial p) : v_(std::move(p)) {}
  FieldExpr(RationalFunction r) : v_(std::move(r)) {}
  FieldExpr(TrigPolynomial t) : v_(std::move(t)) {}
  static FieldExpr constant(const Rational& c) { return FieldExpr(Polynomial::constant(c)); }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  const Polynomial* polynomial() const { return std::get_if<Polynomial>(&v_); }
  const RationalFunction* rational() const { return std::get_if<RationalFunction>(&v_); }
  const TrigPolynomial* trig() const { return std::get_if<TrigPolynomial>(&v_); }

  template <class T>
  T evaluate(const Point<T>& p) const {
    return std::visit([&](const auto& f) { return f.template evaluate<T>(p); }, v_);
  }
  template <class T>
  Jet<T> jet(const Point<T>& p, int order) const {
    return std::visit([&](const auto& f) { return f.template jet<T>(p, order); }, v_);
  }

  static FieldExpr from_json(const nlohmann::json& j, const std::string& path);
  nlohmann::json to_json() const;

 private:
  std::variant<Polynomial, RationalFunction, TrigPolynomial> v_;
};

}  // namespace hetsol
