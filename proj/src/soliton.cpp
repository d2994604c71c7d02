#include "hetsol/soliton.hpp"

namespace hetsol {

ClassificationReport classify_constant_dilaton(const SolitonParams& params) {
  const Rational& k = params.kappa;
  ClassificationReport r;
  r.kappa = k;

  // Einstein branch: l = s/3 turns the quadratic into (s/3)(kappa s/12 + 2) = 0, s != 0.
  r.s = Rational(-24) / k;
  r.e2phi = -2 * r.s;  // from s + e^{2 phi}/2 = 0
  r.ricci_factor = r.s / 3;
  r.hyperbolic_residue = eigenvalue_quadratic(k, r.s, r.ricci_factor);

  // Product branch: eigenvalues (0, mu, mu), s = 2 mu. The root 0 forces (kappa/4) s^2 + s = 0.
  r.product_s = Rational(-4) / k;
  r.product_mu = r.product_s / 2;
  r.product_zero_residue = eigenvalue_quadratic(k, r.product_s, Rational(0));
  r.product_defect = eigenvalue_quadratic(k, r.product_s, r.product_mu);

  r.branch = ClassificationReport::Branch::Hyperbolic;
  r.nonpositive_dilaton = sgn(r.e2phi) <= 0;
  return r;
}

}  // namespace hetsol
