#pragma once

#include <utility>
#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/matrix2.hpp"

namespace todacurves {

struct BacklundParams {
  cplx mu{};         // transform parameter, nondegenerate for mu not in {0, 1}
  C2Point initial{};  // choice of γ̃_0
};

/// The unique γ̃_{k+1} with cr(γ_k, γ_{k+1}, γ̃_{k+1}, γ̃_k) = μ, as a
/// unit-norm homogeneous representative:
/// γ̃_{k+1} ∝ g_k γ̃_k + μ det(γ̃_k, γ_k) γ_{k+1}.
inline C2Point backlund_step(const C2Point& gk, const C2Point& gk1, const C2Point& tgk, const cplx& mu,
                             int index = -1) {
  if (wedge_residual(tgk, gk1) <= tol::immersion) throw Degenerate(index);
  const C2Point z = det2(gk, gk1) * tgk + (mu * det2(tgk, gk)) * gk1;
  const double n = z.norm();
  if (n <= tol::immersion * (tgk.norm() + gk1.norm())) throw Degenerate(index);
  return (1.0 / n) * z;
}

/// The step as a Moebius matrix acting on γ̃_k, scaled to unit max entry.
inline Matrix2 backlund_step_matrix(const C2Point& gk, const C2Point& gk1, const cplx& mu) {
  const cplx g = det2(gk, gk1);
  // g·I + μ γ_{k+1} (y_k, -x_k)
  Matrix2 m{g + mu * gk1.x * gk.y, -mu * gk1.x * gk.x, mu * gk1.y * gk.y, g - mu * gk1.y * gk.x};
  const double s = m.max_abs();
  if (s == 0.0) throw Degenerate(-1);
  return (1.0 / s) * m;
}

/// Composition of the N per-edge Moebius steps around a periodic curve.
inline Matrix2 backlund_monodromy(const CurveC2& c, const cplx& mu) {
  if (!c.is_periodic()) throw Error("monodromy requires a periodic curve");
  Matrix2 m = Matrix2::identity();
  for (int k = 0; k < c.size(); ++k) m = backlund_step_matrix(c.at(k), c.at(k + 1), mu) * m;
  return m;
}

struct FixPoints {
  C2Point first, second;
  bool defective = false;  // eigenvalue gap below tol::eigen_gap; both points equal
};

/// Fixed points of the monodromy as homogeneous eigenvectors; either seeds a
/// periodic transform ("past" and "future").
inline FixPoints periodic_fixpoints(const CurveC2& c, const cplx& mu) {
  const Matrix2 m = backlund_monodromy(c, mu);
  const double scale = m.max_abs();
  const bool scalar = std::abs(m.b) <= 1e-12 * scale && std::abs(m.c) <= 1e-12 * scale &&
                      std::abs(m.a - m.d) <= 1e-12 * scale;
  const bool collapsed = std::abs(m.det()) <= 1e-12 * scale * scale;
  if (scalar || collapsed) throw IdentityMonodromy{};
  const Eigen2 e = eigen2(m);
  return {e.vec0, e.vec1, e.defective};
}

struct BacklundResult {
  CurveC2 transformed;
  /// wedge residual |γ̃_N ∧ γ̃_0| / (|γ̃_N||γ̃_0|) for periodic inputs
  double periodicity_residual = 0.0;
  bool periodic = false;
  /// whether the lift was rescaled to g̃ ≡ 1 (fails only on the even-period
  /// scaling obstruction, which leaves the CP^1 transform untouched)
  bool renormalized = false;
  cplx holonomy = 1.0;
};

/// Steps the transform along the whole curve from params.initial and
/// re-normalizes the lift to conformal arc length where possible.
inline BacklundResult backlund_transform(const CurveC2& c, const BacklundParams& params,
                                         double closure_eps = tol::periodic_closure,
                                         double arclength_eps = tol::arclength) {
  require_arclength(c, arclength_eps);
  const int n = c.size();
  const int steps = c.is_periodic() ? n : n - 1;
  std::vector<C2Point> t;
  t.reserve(static_cast<size_t>(steps) + 1);
  {
    const double nn = params.initial.norm();
    if (nn == 0.0) throw Degenerate(0);
    t.push_back((1.0 / nn) * params.initial);
  }
  for (int k = 0; k < steps; ++k) t.push_back(backlund_step(c.at(k), c.at(k + 1), t.back(), params.mu, k));

  BacklundResult out;
  if (c.is_periodic()) {
    out.periodicity_residual = wedge_residual(t[static_cast<size_t>(n)], t[0]);
    if (out.periodicity_residual <= closure_eps) {
      t.resize(static_cast<size_t>(n));
      NormalizeResult norm = normalize_arclength(CurveC2::periodic(std::move(t)));
      out.holonomy = norm.holonomy;
      if (norm.periodic_obstruction) {
        out.transformed = CurveC2::periodic(std::move(norm.curve.points()));
        out.renormalized = false;
      } else {
        out.transformed = std::move(norm.curve);
        out.renormalized = true;
      }
      out.periodic = true;
      return out;
    }
  }
  NormalizeResult norm = normalize_arclength(CurveC2::open(std::move(t)));
  out.transformed = std::move(norm.curve);
  out.renormalized = true;
  return out;
}

/// s_k = cr(γ_{k-1}, γ̃_k, γ_{k+1}, γ_k)
inline Seq s_sequence(const CurveC2& c, const CurveC2& transformed) {
  IndexRange r = c.is_periodic() && transformed.is_periodic()
                     ? IndexRange{0, c.size(), true}
                     : IndexRange{1, std::min(c.size() - 1, transformed.size()), false};
  return build_over<cplx>(r, [&](int k) {
    return cross_ratio(c.at(k - 1), transformed.at(k), c.at(k + 1), c.at(k));
  });
}

struct DiscreteVolterraReport {
  double map_residual = 0.0;      // α̃_k = α_k β_{k+1} / β_k
  double closure_residual = 0.0;  // β_k - h α_k = β_{k-1} / (β_{k-1} - h α_{k-1})
};

/// Discrete-time Volterra identities with α_k = Q_k, α̃_k = Q̃_{k+1},
/// β_k / h = Q_k / s_{k+1}, h = μ - 1.
inline DiscreteVolterraReport discrete_volterra_check(const Seq& Q, const Seq& Qt, const Seq& s, const cplx& mu) {
  const cplx h = mu - 1.0;
  const Seq beta = build_over<cplx>(stencil_range(s, 0, 1), [&](int k) { return h * Q(k) / s(k + 1); });
  DiscreteVolterraReport rep;
  const IndexRange r1 = intersect(stencil_range(beta, 0, 1), stencil_range(Qt, 1, 0));
  for (int k = r1.lo; k < r1.hi; ++k) {
    rep.map_residual = std::max(rep.map_residual, std::abs(Qt(k + 1) - Q(k) * beta(k + 1) / beta(k)));
  }
  const IndexRange r2 = intersect(stencil_range(beta, 1, 0), stencil_range(Q, 1, 0));
  for (int k = r2.lo; k < r2.hi; ++k) {
    rep.closure_residual = std::max(
        rep.closure_residual, std::abs(beta(k) - h * Q(k) - beta(k - 1) / (beta(k - 1) - h * Q(k - 1))));
  }
  return rep;
}

/// Determinant test: vanishes iff the four plane points are concircular (or
/// collinear). Points are centered and scaled first, so the residual is
/// similarity-invariant.
inline double concircularity_residual(const cplx& z0, const cplx& z1, const cplx& z2, const cplx& z3) {
  cplx z[4] = {z0, z1, z2, z3};
  cplx centroid = (z0 + z1 + z2 + z3) / 4.0;
  double scale = 0.0;
  for (auto& w : z) {
    w -= centroid;
    scale = std::max(scale, std::abs(w));
  }
  if (scale > 0) {
    for (auto& w : z) w /= scale;
  }
  double m[4][4];
  for (int i = 0; i < 4; ++i) {
    m[i][0] = std::norm(z[i]);
    m[i][1] = z[i].real();
    m[i][2] = z[i].imag();
    m[i][3] = 1.0;
  }
  // 4x4 determinant by elimination
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int row = col + 1; row < 4; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
    }
    if (piv != col) {
      for (int j = 0; j < 4; ++j) std::swap(m[piv][j], m[col][j]);
      det = -det;
    }
    if (m[col][col] == 0.0) return 0.0;
    det *= m[col][col];
    for (int row = col + 1; row < 4; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[row][j] -= f * m[col][j];
    }
  }
  return std::abs(det);
}

}  // namespace todacurves
