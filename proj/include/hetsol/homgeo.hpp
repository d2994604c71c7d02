#pragma once

// Left-invariant metrics on three-dimensional Lie groups. The metric is
// diagonal, g = diag(d1, d2, d3), in a fixed basis e1, e2, e3 of the Lie
// algebra with [e_i, e_j] = c_ij^k e_k. All curvature quantities are
// constant, so the geometry is pure algebra in that frame.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsol/geometry.hpp"
#include "hetsol/soliton.hpp"

namespace hetsol {

inline constexpr int bracket_index(int i, int j, int k) { return 9 * i + 3 * j + k; }

template <class T>
struct LieFamily {
  std::array<T, 27> c;  // c_ij^k at bracket_index(i, j, k)
  Vec3<T> d;            // diagonal metric entries

  const T& operator()(int i, int j, int k) const { return c[bracket_index(i, j, k)]; }
};

// Cyclic sum [[e_i, e_j], e_k] + ... expanded on e_m, at bracket_index-like (i, j, k) and m.
template <class T>
std::array<T, 81> jacobi_residual(const LieFamily<T>& f) {
  std::array<T, 81> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) {
          T acc(0);
          for (int n = 0; n < 3; ++n)
            acc += f(i, j, n) * f(n, k, m) + f(j, k, n) * f(n, i, m) + f(k, i, n) * f(n, j, m);
          out[27 * i + 9 * j + 3 * k + m] = acc;
        }
  return out;
}

template <class T>
void validate(const LieFamily<T>& f) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!near_zero(T(f(i, j, k) + f(j, i, k))))
          throw Error(ErrorKind::JacobiViolated, "structure constants are not antisymmetric");
  for (const T& x : jacobi_residual(f))
    if (!near_zero(x, 1.0, 1e-10)) throw Error(ErrorKind::JacobiViolated, "Jacobi identity fails");
  for (const T& x : f.d)
    if (sign_of(x) <= 0) throw Error(ErrorKind::DegenerateMetric, "diagonal metric entries must be positive");
}

// Connection nabla_{e_a} e_b = Gamma^m_ab e_m from the Koszul formula, stored at
// gamma_index(m, a, b) (not symmetric in a, b).
template <class T>
std::array<T, 27> lie_connection(const LieFamily<T>& f) {
  std::array<T, 27> out;
  const T half = T(T(1) / T(2));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int m = 0; m < 3; ++m) {
        // g(nabla_a e_b, e_m) = (1/2)(g([a,b],m) - g([b,m],a) + g([m,a],b))
        T lowered = half * (f(a, b, m) * f.d[m] - f(b, m, a) * f.d[a] + f(m, a, b) * f.d[b]);
        out[gamma_index(m, a, b)] = T(lowered / f.d[m]);
      }
  return out;
}

template <class T>
PointGeometry<T> lie_geometry(const LieFamily<T>& f, std::optional<T> e2phi = std::nullopt) {
  validate(f);
  std::array<T, 27> G = lie_connection(f);
  auto Gm = [&](int m, int a, int b) -> const T& { return G[gamma_index(m, a, b)]; };

  // R(e_i, e_j) e_k = (G^m_jk G^n_im - G^m_ik G^n_jm - c_ij^m G^n_mk) e_n, lowered into slot four.
  auto riemann = [&](int i, int j, int k, int l) {
    T acc(0);
    for (int m = 0; m < 3; ++m) acc += Gm(m, j, k) * Gm(l, i, m) - Gm(m, i, k) * Gm(l, j, m) - f(i, j, m) * Gm(l, m, k);
    return T(acc * f.d[l]);
  };
  Sym2<T> op;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) op(a, b) = riemann(kPairs[a][0], kPairs[a][1], kPairs[b][0], kPairs[b][1]);

  Metric3<T> g(Sym2<T>::diag(f.d[0], f.d[1], f.d[2]));
  Curv3<T> curv(op);
  RicciScalar<T> rs = ricci_contract(curv, g);
  PointGeometry<T> pg{{g, G, curv, rs.ric, rs.s}, {}};
  auto& der = pg.der;
  der.dphi = Vec3<T>{T(0), T(0), T(0)};
  der.delta_dphi = T(0);
  der.dphi_norm2 = T(0);
  der.ds = Vec3<T>{T(0), T(0), T(0)};
  der.e2phi = e2phi;

  // Components are constant, so nabla_a only sees the connection terms.
  const Sym2<T>& gi = g.inv();
  for (int v1 = 0; v1 < 3; ++v1)
    for (int v2 = 0; v2 < 3; ++v2)
      for (int v3 = 0; v3 < 3; ++v3) {
        T acc(0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            if (sign_of(gi(a, b)) == 0) continue;
            T v(0);
            for (int m = 0; m < 3; ++m) {
              v -= Gm(m, a, b) * curv(m, v1, v2, v3);
              v -= Gm(m, a, v1) * curv(b, m, v2, v3);
              v -= Gm(m, a, v2) * curv(b, v1, m, v3);
              v -= Gm(m, a, v3) * curv(b, v1, v2, m);
            }
            acc += gi(a, b) * v;
          }
        der.div_R(v1, v2, v3) = T(-acc);
      }
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        T v(0);
        for (int m = 0; m < 3; ++m) v -= Gm(m, a, j) * rs.ric(m, k) + Gm(m, a, k) * rs.ric(j, m);
        der.nabla_ric(a, j, k) = v;
      }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int z = 0; z < 3; ++z) der.d_ric(x, y, z) = T(der.nabla_ric(x, y, z) - der.nabla_ric(y, x, z));
  return pg;
}

// |E|^2 + |YM|^2 + D^2 with a constant dilaton of weight e2phi.
template <class T>
T soliton_objective(const LieFamily<T>& f, const SolitonParams& params, const T& e2phi) {
  SolitonResidual<T> r = residuals(lie_geometry(f, std::optional<T>(e2phi)), params);
  return T(r.E_norm2 + r.YM_norm2 + r.D_norm2);
}

// Residual entries whose sum of squares is the objective (diagonal metric).
std::vector<double> soliton_residual_vector(const LieFamily<double>& f, const SolitonParams& params,
                                            double e2phi);

// --- Family catalogue ------------------------------------------------------

// A coefficient is scale * parameter, or scale alone when param is empty.
struct FamilyCoeff {
  std::string param;
  Rational scale = 1;
};

struct FamilyBracket {
  int i, j, k;  // [e_i, e_j] gets coeff * e_k
  FamilyCoeff coeff;
};

struct ParamSpec {
  std::string name;
  double lower, upper;
  double start;
};

struct FamilySpec {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::vector<FamilyBracket> brackets;
  std::array<FamilyCoeff, 3> metric;
  ParamSpec weight{"e2phi", 1, 1000, 30};  // bounds for e^{2 phi}

  template <class T>
  LieFamily<T> instantiate(const std::vector<T>& values) const {
    auto eval = [&](const FamilyCoeff& c) {
      T v = cast<T>(c.scale);
      if (!c.param.empty()) v = T(v * values.at(param_index(c.param)));
      return v;
    };
    LieFamily<T> f;
    f.c.fill(T(0));
    for (const auto& b : brackets) {
      T v = eval(b.coeff);
      f.c[bracket_index(b.i, b.j, b.k)] += v;
      f.c[bracket_index(b.j, b.i, b.k)] -= v;
    }
    for (int i = 0; i < 3; ++i) f.d[i] = eval(metric[i]);
    return f;
  }

  int param_index(const std::string& name) const;
  static FamilySpec from_json(const nlohmann::json& j, const std::string& path);
  nlohmann::json to_json() const;
};

std::vector<FamilySpec> load_catalogue(const std::string& path);
std::vector<FamilySpec> catalogue_from_json(const nlohmann::json& j);
const FamilySpec& find_family(const std::vector<FamilySpec>& cat, const std::string& name);

// --- Levenberg-Marquardt search ----------------------------------------------

struct SearchConfig {
  std::vector<double> initial;  // family parameters; empty means the catalogue start
  std::optional<double> initial_e2phi;
  double lambda0 = 1e-3;
  double lambda_factor = 10;
  int max_iterations = 200;
  double tolerance = 1e-12;  // on the objective
  double step_tolerance = 1e-12;
  std::uint64_t seed = 0;
  bool clamp_to_bounds = true;

  void check() const;
};

struct SearchResult {
  std::string family;
  bool converged = false;
  std::optional<ErrorKind> failure;  // MaxIterations or SingularJacobian
  int iterations = 0;
  int restarts = 0;
  std::vector<double> params;
  double e2phi = 0;
  double objective = 0;
  std::vector<double> history;  // objective after each accepted iterate
  // Classification of the final point.
  double s = 0;
  std::array<double, 3> ricci_eigenvalues{};
  bool einstein = false;
  bool matches_classification = false;
};

SearchResult lm_solve(const FamilySpec& fam, const SolitonParams& params, const SearchConfig& cfg);

struct GridScan {
  std::string family;
  std::string x_name, y_name;
  int nx, ny;
  double min_objective;
  std::vector<double> best;  // parameter values and e2phi at the minimum
  std::vector<std::array<double, 3>> samples;  // (x, y, objective)
};

// Objective on an nx by ny grid over the first free parameter and e^{2 phi}
// (the parameter values not on the grid stay at their start).
GridScan grid_scan(const FamilySpec& fam, const SolitonParams& params, int nx, int ny);

}  // namespace hetsol
