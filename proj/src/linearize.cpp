#include "hetsol/linearize.hpp"

#include <cmath>
#include <numbers>

namespace hetsol {

BackgroundConstants BackgroundConstants::hyperbolic(const SolitonParams& params) {
  ClassificationReport c = classify_constant_dilaton(params);
  return {params.kappa, c.s, c.e2phi, c.ricci_factor, "hyperbolic"};
}

bool BackgroundConstants::satisfies_hyperbolic() const {
  return kappa * s == -24 && kappa * e2phi == 48 && lambda * 3 == s;
}

// --- Torus pairing ----------------------------------------------------------------

int TorusGaugeData::max_degree() const {
  int d = std::max(xi.degree(), phi.degree());
  for (const auto& f : v) d = std::max(d, f.degree());
  for (const auto& f : h) d = std::max(d, f.degree());
  return d;
}

TrigSym lie_derivative_trig(const TrigSym& g, const TrigVec& v) {
  auto G = [&](int i, int j) -> const TrigPolynomial& { return g[sym_index(i, j)]; };
  TrigSym out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      TrigPolynomial acc;
      for (int k = 0; k < 3; ++k) {
        acc = acc + v[k] * G(i, j).derivative(k);
        acc = acc + G(k, j) * v[k].derivative(i);
        acc = acc + G(i, k) * v[k].derivative(j);
      }
      out[sym_index(i, j)] = acc;
    }
  return out;
}

TorusPairing torus_gauge_pairing(const TorusGaugeData& d, int nodes) {
  Metric3<Rational> metric(d.g);
  const Sym2<Rational>& gi = metric.inv();
  TrigSym g;
  for (int m = 0; m < 6; ++m) g[m] = TrigPolynomial::constant(d.g.upper()[m]);
  TrigSym lie = lie_derivative_trig(g, d.v);
  auto L = [&](int i, int j) -> const TrigPolynomial& { return lie[sym_index(i, j)]; };
  auto H = [&](int i, int j) -> const TrigPolynomial& { return d.h[sym_index(i, j)]; };

  TrigPolynomial dphi_v;
  for (int k = 0; k < 3; ++k) dphi_v = dphi_v + d.phi.derivative(k) * d.v[k];

  TrigPolynomial image = dphi_v * d.xi;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          Rational c = gi(i, a) * gi(j, b);
          if (c != 0) image = image + c * (L(a, b) * H(i, j));
        }

  TrigPolynomial adjoint;
  for (int j = 0; j < 3; ++j) {
    TrigPolynomial w;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        if (gi(k, i) != 0) w = w - gi(k, i) * H(i, j).derivative(k);
    TrigPolynomial cov = Rational(2) * w + d.xi * d.phi.derivative(j);
    adjoint = adjoint + cov * d.v[j];
  }

  TorusPairing r;
  r.image_side = image.quadrature_mean(nodes);
  r.adjoint_side = adjoint.quadrature_mean(nodes);
  r.defect = r.image_side - r.adjoint_side;
  r.exact_image_side = image.constant_term();
  r.exact_adjoint_side = adjoint.constant_term();
  r.nodes = nodes;
  r.quadrature_exact = nodes > 2 * d.max_degree();
  return r;
}

NodalPairing torus_gauge_pairing_nodal(const ChartGeometry& chart, const VecField& v, const SymField& h,
                                       const FieldExpr& xi, int nodes) {
  const double step = 2 * std::numbers::pi / nodes;
  double image = 0, adjoint = 0;
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b)
      for (int c = 0; c < nodes; ++c) {
        Point<double> p{a * step, b * step, c * step};
        Metric3<double> g(chart.metric_values(p));
        double vol = std::sqrt(g.det());
        GaugeImage<double> im = gauge_image(chart, v, p);
        Vec3<double> adj = gauge_adjoint(chart, h, xi, p);
        Sym2<double> hv = sym_values(h, p);
        Vec3<double> vv{v[0].evaluate(p), v[1].evaluate(p), v[2].evaluate(p)};
        image += vol * (g.inner(im.lie_g, hv) + im.dphi_v * xi.evaluate(p));
        adjoint += vol * dot(adj, vv);
      }
  double n3 = double(nodes) * nodes * nodes;
  return {image / n3, adjoint / n3, std::abs(image - adjoint) / n3, nodes};
}

// --- Essential deformations ---------------------------------------------------------

bool EssentialChain::consistent() const {
  for (const auto& s : steps)
    if (!s.ok()) return false;
  return bg.satisfies_hyperbolic();
}

EssentialChain essential_chain(const SolitonParams& params) {
  EssentialChain c;
  c.bg = BackgroundConstants::hyperbolic(params);
  const Rational& k = c.bg.kappa;
  const Rational& s = c.bg.s;
  const Rational& w = c.bg.e2phi;

  // Linearized scalar identity: (1 + kappa s / 2) d s(h) = 5 e^{2 phi} xi. Its exterior
  // derivative against d[d s(h)] = (2/3) s d xi.
  c.exterior = 1 + k * s / 2;
  c.dxi = c.exterior * Rational(2, 3) * s - 5 * w;

  // Dilaton equation with xi constant: -2 e^{2 phi} xi + kappa (s / 6) d s(h) = 0.
  c.ds_per_xi = 2 * w / (k * s / 6);
  c.kappa_ds_per_xi = k * c.ds_per_xi;
  // Trace equation: (1 + kappa s / 3) d s(h) - 3 e^{2 phi} xi.
  c.lemma_ric = 1 + k * s / 3;
  c.xi_final = c.lemma_ric * c.ds_per_xi - 3 * w;

  // Einstein equation for trace-free, divergence-free h with xi = 0.
  c.lemma_h = -(w / 2 + k * s * s / 18);
  c.ricci_rate = -c.lemma_h / c.lemma_ric;

  c.steps = {
      {"exterior_derivative_coefficient", c.exterior, Rational(-11)},
      {"dxi_coefficient", c.dxi, Rational(-64) / k},
      {"ds_per_xi", c.ds_per_xi, Rational(-24) / k},
      {"kappa_ds_per_xi", c.kappa_ds_per_xi, Rational(-24)},
      {"xi_coefficient", c.xi_final, Rational(24) / k},
      {"ricci_coefficient", c.lemma_ric, Rational(-7)},
      {"h_coefficient", c.lemma_h, Rational(-56) / k},
      {"ricci_rate", c.ricci_rate, s / 3},
  };
  return c;
}

// --- Transverse-traceless projection ------------------------------------------------

namespace {

Polynomial shifted_monomial(const MultiIndex& alpha, const Point<Rational>& p) {
  Polynomial out = Polynomial::constant(1);
  for (int i = 0; i < 3; ++i) {
    Polynomial lin = Polynomial::coordinate(i) + Polynomial::constant(-p[i]);
    for (int e = 0; e < alpha[i]; ++e) out = out * lin;
  }
  return out;
}

}  // namespace

SymField project_tt_at(const ChartGeometry& chart, const SymField& h, const Point<Rational>& p) {
  for (const auto& f : h)
    if (!f.polynomial()) throw Error(ErrorKind::PreconditionViolated, "projection needs a polynomial deformation");
  CurvatureJets<Rational> cj = curvature_jets(chart.metric_jets(p, 2));
  const int per = MultiIndexTable::count(2);
  const int cols = 6 * per;

  std::vector<std::vector<Rational>> A;
  for (int col = 0; col < cols; ++col) {
    std::array<Jet<Rational>, 6> unit;
    for (auto& u : unit) u = Jet<Rational>(2, Rational(0));
    unit[col / per].coeff(col % per) = 1;
    std::vector<Rational> c = tt_constraints(linearization_from_jets(cj, unit));
    if (A.empty()) A.assign(c.size(), std::vector<Rational>(cols));
    for (std::size_t r = 0; r < c.size(); ++r) A[r][col] = c[r];
  }

  // Reduced row echelon form.
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < cols && row < static_cast<int>(A.size()); ++col) {
    int sel = -1;
    for (int r = row; r < static_cast<int>(A.size()); ++r)
      if (A[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(A[row], A[sel]);
    Rational inv = 1 / A[row][col];
    for (auto& x : A[row]) x *= inv;
    for (int r = 0; r < static_cast<int>(A.size()); ++r) {
      if (r == row || A[r][col] == 0) continue;
      Rational f = A[r][col];
      for (int c2 = 0; c2 < cols; ++c2) A[r][c2] -= f * A[row][c2];
    }
    pivots.push_back(col);
    ++row;
  }

  auto hj = sym_jets(h, p, 2);
  std::vector<Rational> coef(cols);
  for (int col = 0; col < cols; ++col) coef[col] = hj[col / per].coeff(col % per);
  std::vector<Rational> fixed = coef;
  std::vector<bool> is_pivot(cols, false);
  for (int pc : pivots) is_pivot[pc] = true;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    Rational acc = 0;
    for (int c2 = 0; c2 < cols; ++c2)
      if (!is_pivot[c2]) acc += A[r][c2] * coef[c2];
    fixed[pivots[r]] = -acc;
  }

  const auto& tab = MultiIndexTable::get();
  SymField out;
  for (int m = 0; m < 6; ++m) {
    Polynomial poly = *h[m].polynomial();
    for (int idx = 0; idx < per; ++idx) {
      Rational delta = fixed[m * per + idx] - coef[m * per + idx];
      if (delta != 0) poly = poly + delta * shifted_monomial(tab.at(idx), p);
    }
    out[m] = FieldExpr(poly);
  }
  return out;
}

}  // namespace hetsol
