#pragma once

// Deterministic random inputs for the identity suites.
//
// The generator is std::mt19937_64 (whose output sequence is fixed by the C++
// standard). Bounded integers are taken as lo + (raw mod (hi - lo + 1)), so a
// seed replays identically on every platform; std distributions are not used.

#include <cstdint>
#include <random>

#include "hetsol/algebra3.hpp"
#include "hetsol/chart.hpp"

namespace hetsol {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }
  long integer(long lo, long hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(engine_() % span);
  }
  // num / den with num in [-max_num, max_num], den in [1, max_den].
  Rational rational(long max_num = 9, long max_den = 7) {
    Rational q(integer(-max_num, max_num), integer(1, max_den));
    q.canonicalize();
    return q;
  }
  Rational positive_rational(long max_num = 9, long max_den = 7) {
    Rational q(integer(1, max_num), integer(1, max_den));
    q.canonicalize();
    return q;
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

Sym2<Rational> random_sym2(Rng& rng, long max_num = 9);
// Strictly diagonally dominant with positive diagonal, hence positive definite.
Sym2<Rational> random_metric(Rng& rng);
Vec3<Rational> random_vec3(Rng& rng, long max_num = 9);
// Cayley transform (I - A)(I + A)^{-1} of a random skew matrix: rational and orthogonal.
Mat3<Rational> random_rational_rotation(Rng& rng);
Point<Rational> random_point_in_ball(Rng& rng, const Rational& radius);
Polynomial random_polynomial(Rng& rng, int max_degree, long max_num = 5, long max_den = 4);

// Metric (M + P(x)) / (1 + |x|^2) with M random positive definite and P a
// small degree <= 2 symmetric polynomial perturbation; dilaton weight is a
// positive polynomial of degree <= 2. Positive definite for |x| <= 1/2.
ChartGeometry random_rational_chart(Rng& rng);
// Random polynomial symmetric 2-tensor field of degree <= max_degree.
SymField random_sym_field(Rng& rng, int max_degree);

}  // namespace hetsol
