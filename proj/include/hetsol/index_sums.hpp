#pragma once

// Brute-force index-summation references for the pointwise curvature algebra.
// Everything here works on full (0,4) arrays and never touches the 2-form
// storage except through Curv3::operator().

#include <array>

#include "hetsol/algebra3.hpp"

namespace hetsol::index_sum {

using hetsol::Curv3;
using hetsol::Metric3;
using hetsol::Sym2;
using hetsol::Vec3;

template <class T>
using Tensor4 = std::array<std::array<std::array<std::array<T, 3>, 3>, 3>, 3>;

template <class T>
T kn_four_term(const Sym2<T>& A, const Sym2<T>& B, int i, int j, int k, int l) {
  return T(A(i, k) * B(j, l) + A(j, l) * B(i, k) - A(i, l) * B(j, k) - A(j, k) * B(i, l));
}

template <class T>
Tensor4<T> expand(const Curv3<T>& R) {
  Tensor4<T> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) t[i][j][k][l] = R(i, j, k, l);
  return t;
}

// -g o ric + (s/4) g o g written out term by term.
template <class T>
Tensor4<T> riemann_from_ricci(const Sym2<T>& g, const Sym2<T>& ric, const T& s) {
  Tensor4<T> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t[i][j][k][l] = T(s / T(4) * kn_four_term(g, g, i, j, k, l) - kn_four_term(g, ric, i, j, k, l));
  return t;
}

// Ric_jk = sum over i, l of g^{il} R_ijkl.
template <class T>
Sym2<T> ricci(const Tensor4<T>& R, const Sym2<T>& ginv) {
  Sym2<T> out;
  for (int j = 0; j < 3; ++j)
    for (int k = j; k < 3; ++k) {
      T acc(0);
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) acc += ginv(i, l) * R[i][j][k][l];
      out(j, k) = acc;
    }
  return out;
}

// (1/2) sum R(v1, e_i, e_j, e_k) R(v2, e_i, e_j, e_k) over an orthonormal frame.
template <class T>
Sym2<T> curv_square(const Tensor4<T>& R, const Sym2<T>& ginv) {
  Sym2<T> out;
  for (int x = 0; x < 3; ++x)
    for (int y = x; y < 3; ++y) {
      T acc(0);
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
          for (int j = 0; j < 3; ++j)
            for (int b = 0; b < 3; ++b)
              for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c)
                  acc += ginv(i, a) * ginv(j, b) * ginv(k, c) * R[x][i][j][k] * R[y][a][b][c];
      out(x, y) = T(acc / T(2));
    }
  return out;
}

// (1/4) sum R_ijkl^2 over an orthonormal frame.
template <class T>
T curv_norm(const Tensor4<T>& R, const Sym2<T>& ginv) {
  T acc(0);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 3; ++j)
        for (int b = 0; b < 3; ++b)
          for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 3; ++c)
              for (int l = 0; l < 3; ++l)
                for (int d = 0; d < 3; ++d)
                  acc += ginv(i, a) * ginv(j, b) * ginv(k, c) * ginv(l, d) * R[i][j][k][l] * R[a][b][c][d];
  return T(acc / T(4));
}

// The 2-form (a, b) -> R(v1, v2, a, b), sampled on (e2,e3), (e3,e1), (e1,e2).
template <class T>
std::array<T, 3> operator_action(const Tensor4<T>& R, const Vec3<T>& v1, const Vec3<T>& v2) {
  const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  std::array<T, 3> out;
  for (int s = 0; s < 3; ++s) {
    T acc(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc += v1[i] * v2[j] * R[i][j][pairs[s][0]][pairs[s][1]];
    out[s] = acc;
  }
  return out;
}

template <class T>
Sym2<T> conjugate(const hetsol::Mat3<T>& Q, const Sym2<T>& a) {
  hetsol::Mat3<T> m = Q * a.matrix() * Q.transposed();
  return Sym2<T>::from_matrix(m);
}

}  // namespace hetsol::index_sum
