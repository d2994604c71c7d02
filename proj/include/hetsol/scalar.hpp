#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace hetsol {

using Rational = mpq_class;

enum class Mode { Exact, Float };

Mode parse_mode(std::string_view text);
std::string to_string(Mode mode);

// num / den in canonical form (gmp requires canonical operands).
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p", "p/q", decimal ("-0.125") and scientific ("3e-2") forms exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

enum class ErrorKind {
  SingularMetric,
  PoleAtPoint,
  StencilOutOfDomain,
  OutsideDomain,
  InexactEvaluation,
  PreconditionViolated,
  InvalidKappa,
  NotHarmonic,
  NotEinstein,
  NotTT,
  JacobiViolated,
  DegenerateMetric,
  MaxIterations,
  SingularJacobian,
  MalformedConfig,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Forward-mode dual number: value plus one directional derivative.
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}
  explicit Dual(int value) : v(value), d(0) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {T(a.v + b.v), T(a.d + b.d)}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {T(a.v - b.v), T(a.d - b.d)}; }
  friend Dual operator-(const Dual& a) { return {T(-a.v), T(-a.d)}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {T(a.v * b.v), T(a.v * b.d + a.d * b.v)};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1) / b.v;
    return {T(a.v * inv), T((a.d * b.v - a.v * b.d) * inv * inv)};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v && a.d == b.d; }
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_rational(const Rational& q) { return q; }
  static double to_double(const Rational& q) { return q.get_d(); }
  static int sign(const Rational& q) { return sgn(q); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_rational(const Rational& q) { return q.get_d(); }
  static double to_double(double x) { return x; }
  static int sign(double x) { return (x > 0) - (x < 0); }
};

template <class U>
struct scalar_traits<Dual<U>> {
  static constexpr bool exact = scalar_traits<U>::exact;
  static Dual<U> from_rational(const Rational& q) {
    return {scalar_traits<U>::from_rational(q), U(0)};
  }
  static double to_double(const Dual<U>& x) { return scalar_traits<U>::to_double(x.v); }
  static int sign(const Dual<U>& x) { return scalar_traits<U>::sign(x.v); }
};

template <class T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

template <class T>
T cast(const Rational& q) {
  return scalar_traits<T>::from_rational(q);
}

template <class T>
T cast(long n) {
  return scalar_traits<T>::from_rational(Rational(n));
}

template <class T>
double to_double(const T& x) {
  return scalar_traits<T>::to_double(x);
}

template <class T>
int sign_of(const T& x) {
  return scalar_traits<T>::sign(x);
}

// Absolute float tolerance used wherever a float-mode comparison needs one.
inline constexpr double kFloatTolerance = 1e-12;

// Exact mode: literal zero. Float mode: |x| <= tol * max(1, scale).
template <class T>
bool near_zero(const T& x, double scale = 1.0, double tol = kFloatTolerance) {
  if constexpr (is_exact_v<T>) {
    return sign_of(x) == 0;
  } else {
    return std::abs(to_double(x)) <= tol * std::max(1.0, scale);
  }
}

}  // namespace hetsol
