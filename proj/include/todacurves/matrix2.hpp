#pragma once

#include <cmath>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"

namespace todacurves {

/// 2x2 complex matrix, row-major entries a b / c d.
struct Matrix2 {
  cplx a{}, b{}, c{}, d{};

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 diag(const cplx& p, const cplx& q) { return {p, 0.0, 0.0, q}; }

  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
  Matrix2 inverse() const {
    const cplx dt = det();
    if (std::abs(dt) == 0.0) throw Error("singular 2x2 matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  Matrix2 transpose() const { return {a, c, b, d}; }

  friend Matrix2 operator*(const Matrix2& l, const Matrix2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend Matrix2 operator+(const Matrix2& l, const Matrix2& r) { return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d}; }
  friend Matrix2 operator-(const Matrix2& l, const Matrix2& r) { return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d}; }
  friend Matrix2 operator*(const cplx& s, const Matrix2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

  C2Point apply(const C2Point& p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
};

inline double max_abs(const Matrix2& m) { return m.max_abs(); }

struct Eigen2 {
  cplx lambda0, lambda1;   // |lambda0| >= |lambda1|
  C2Point vec0, vec1;      // unit-norm eigenvectors
  bool defective = false;  // relative eigenvalue gap below tol::eigen_gap
};

/// Eigen decomposition of a 2x2 matrix; the smaller eigenvalue is computed
/// as det/lambda0 to avoid cancellation.
inline Eigen2 eigen2(const Matrix2& m) {
  Eigen2 e;
  const cplx tr = m.trace();
  const cplx disc = std::sqrt(tr * tr - 4.0 * m.det());
  const cplx r0 = (tr + disc) / 2.0;
  const cplx r1 = (tr - disc) / 2.0;
  e.lambda0 = std::abs(r0) >= std::abs(r1) ? r0 : r1;
  e.lambda1 = std::abs(e.lambda0) > 0 ? m.det() / e.lambda0 : r1;
  const double scale = std::max(std::abs(e.lambda0), std::abs(e.lambda1));
  e.defective = std::abs(e.lambda0 - e.lambda1) <= tol::eigen_gap * std::max(scale, 1e-300);

  auto kernel_vector = [&m](const cplx& lam) {
    // rows of (m - lam I) are (a-lam, b) and (c, d-lam); the kernel vector is
    // orthogonal-by-determinant to either row, pick the better conditioned one
    const C2Point v1{m.b, lam - m.a};
    const C2Point v2{lam - m.d, m.c};
    C2Point v = v1.norm() >= v2.norm() ? v1 : v2;
    const double n = v.norm();
    if (n == 0.0) return C2Point{1.0, 0.0};
    return (1.0 / n) * v;
  };
  e.vec0 = kernel_vector(e.lambda0);
  e.vec1 = kernel_vector(e.lambda1);
  return e;
}

using MatSeq = BasicSeq<Matrix2>;

}  // namespace todacurves
