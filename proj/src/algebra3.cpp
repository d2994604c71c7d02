#include "hetsol/algebra3.hpp"

#include <Eigen/Dense>
#include <numeric>

namespace hetsol {

EigenReport eigen_report(const Sym2<double>& g, const Sym2<double>& ric) {
  Eigen::Matrix3d G, R;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      G(i, j) = g(i, j);
      R(i, j) = ric(i, j);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> solver(R, G);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::SingularMetric, "generalized eigensolver failed");

  std::array<int, 3> order;
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals(a) < vals(b); });

  EigenReport rep;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d v = solver.eigenvectors().col(order[c]);
    v /= std::sqrt(v.dot(G * v));
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v(i)) > 1e-14) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    rep.eigenvalues[c] = vals(order[c]);
    for (int i = 0; i < 3; ++i) rep.eigenvectors[c][i] = v(i);
  }
  return rep;
}

}  // namespace hetsol
