#include "hetsol/scalar.hpp"

#include <cctype>

namespace hetsol {

Mode parse_mode(std::string_view text) {
  if (text == "exact") return Mode::Exact;
  if (text == "float") return Mode::Float;
  throw Error(ErrorKind::MalformedConfig, "mode must be 'exact' or 'float', got '" +
                                              std::string(text) + "'");
}

std::string to_string(Mode mode) { return mode == Mode::Exact ? "exact" : "float"; }

namespace {

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(1, p) : Rational(p);
}

Rational parse_decimal(std::string_view text) {
  std::string digits;
  long scale = 0;
  long exponent = 0;
  bool negative = false;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  bool seen_dot = false;
  bool seen_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exponent = std::stol(std::string(text.substr(i + 1)));
      break;
    } else {
      throw Error(ErrorKind::MalformedConfig, "bad number '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) throw Error(ErrorKind::MalformedConfig, "bad number '" + std::string(text) + "'");
  Rational q(mpz_class(digits, 10));
  q *= pow10(exponent - scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorKind::MalformedConfig, "empty number");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::MalformedConfig, "zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::PoleAtPoint: return "PoleAtPoint";
    case ErrorKind::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::InexactEvaluation: return "InexactEvaluation";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InvalidKappa: return "InvalidKappa";
    case ErrorKind::NotHarmonic: return "NotHarmonic";
    case ErrorKind::NotEinstein: return "NotEinstein";
    case ErrorKind::NotTT: return "NotTT";
    case ErrorKind::JacobiViolated: return "JacobiViolated";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::MalformedConfig: return "MalformedConfig";
  }
  return "Unknown";
}

}  // namespace hetsol
