#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "todacurves/core.hpp"

namespace todacurves {

/// Homogeneous coordinates of a point in CP^1; (x, y) != (0, 0).
struct C2Point {
  cplx x{};
  cplx y{};

  friend C2Point operator+(const C2Point& a, const C2Point& b) { return {a.x + b.x, a.y + b.y}; }
  friend C2Point operator-(const C2Point& a, const C2Point& b) { return {a.x - b.x, a.y - b.y}; }
  friend C2Point operator*(const cplx& s, const C2Point& p) { return {s * p.x, s * p.y}; }
  C2Point& operator+=(const C2Point& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }
};

inline cplx det2(const C2Point& a, const C2Point& b) { return a.x * b.y - a.y * b.x; }

/// |det(a,b)| normalized by the operand norms; vanishes iff a ~ b projectively.
inline double wedge_residual(const C2Point& a, const C2Point& b) {
  const double s = a.norm() * b.norm();
  return s > 0 ? std::abs(det2(a, b)) / s : 0.0;
}

/// cr(a,b,c,d) = det(a,b) det(c,d) / (det(b,c) det(d,a))
inline cplx cross_ratio(const C2Point& a, const C2Point& b, const C2Point& c, const C2Point& d) {
  const cplx bc = det2(b, c);
  const cplx da = det2(d, a);
  if (near_zero(bc, b.norm() * c.norm()) || near_zero(da, d.norm() * a.norm())) throw DegenerateCrossRatio{};
  return det2(a, b) * det2(c, d) / (bc * da);
}

enum class Boundary { Periodic, Open };

/// Discrete curve in C^2 (a lifted CP^1 curve). Periodic curves wrap: the
/// point at k + N is the point at k.
class CurveC2 {
 public:
  CurveC2() = default;
  CurveC2(std::vector<C2Point> pts, Boundary b) : pts_(std::move(pts)), boundary_(b) {}

  static CurveC2 periodic(std::vector<C2Point> pts) { return CurveC2(std::move(pts), Boundary::Periodic); }
  static CurveC2 open(std::vector<C2Point> pts) { return CurveC2(std::move(pts), Boundary::Open); }

  const C2Point& at(int k) const {
    if (boundary_ == Boundary::Periodic) {
      const int n = size();
      return pts_[static_cast<size_t>(((k % n) + n) % n)];
    }
    return pts_.at(static_cast<size_t>(k));
  }

  int size() const { return static_cast<int>(pts_.size()); }
  bool is_periodic() const { return boundary_ == Boundary::Periodic; }
  Boundary boundary() const { return boundary_; }
  const std::vector<C2Point>& points() const { return pts_; }
  std::vector<C2Point>& points() { return pts_; }

  IndexRange point_range() const {
    return {0, size(), is_periodic()};
  }

 private:
  std::vector<C2Point> pts_;
  Boundary boundary_ = Boundary::Open;
};

/// Plane curve c_k in C. Periodic means c_{k+N} = c_k.
class PlaneCurve {
 public:
  PlaneCurve() = default;
  PlaneCurve(std::vector<cplx> pts, Boundary b) : pts_(std::move(pts)), boundary_(b) {}

  static PlaneCurve periodic(std::vector<cplx> pts) { return PlaneCurve(std::move(pts), Boundary::Periodic); }
  static PlaneCurve open(std::vector<cplx> pts) { return PlaneCurve(std::move(pts), Boundary::Open); }

  const cplx& at(int k) const {
    if (boundary_ == Boundary::Periodic) {
      const int n = size();
      return pts_[static_cast<size_t>(((k % n) + n) % n)];
    }
    return pts_.at(static_cast<size_t>(k));
  }

  int size() const { return static_cast<int>(pts_.size()); }
  bool is_periodic() const { return boundary_ == Boundary::Periodic; }
  Boundary boundary() const { return boundary_; }
  const std::vector<cplx>& points() const { return pts_; }
  std::vector<cplx>& points() { return pts_; }

  /// Edges S_k = c_{k+1} - c_k. Periodic: N edges; open: M-1 edges from index 0.
  Seq edges() const {
    const int n = size();
    const int count = is_periodic() ? n : n - 1;
    std::vector<cplx> s(static_cast<size_t>(std::max(0, count)));
    for (int k = 0; k < count; ++k) s[static_cast<size_t>(k)] = at(k + 1) - at(k);
    return is_periodic() ? Seq::periodic(std::move(s)) : Seq::ranged(0, std::move(s));
  }

  /// max | |S_k| - 1 | over all edges
  double unit_edge_residual() const {
    double m = 0.0;
    for (const auto& s : edges().values()) m = std::max(m, std::abs(std::abs(s) - 1.0));
    return m;
  }
  bool is_arclength(double eps = tol::unit_edge) const { return unit_edge_residual() <= eps; }

 private:
  std::vector<cplx> pts_;
  Boundary boundary_ = Boundary::Open;
};

/// Edge determinants g_k = det(γ_k, γ_{k+1}), second determinants
/// u_k = det(γ_{k-1}, γ_{k+1}) and cross-ratios Q_k of four neighbors.
struct InvariantData {
  Seq g;
  Seq u;
  Seq Q;
};

namespace detail {
inline IndexRange g_range(const CurveC2& c) {
  return c.is_periodic() ? IndexRange{0, c.size(), true} : IndexRange{0, c.size() - 1, false};
}
inline IndexRange u_range(const CurveC2& c) {
  return c.is_periodic() ? IndexRange{0, c.size(), true} : IndexRange{1, c.size() - 1, false};
}
inline IndexRange q_range(const CurveC2& c) {
  return c.is_periodic() ? IndexRange{0, c.size(), true} : IndexRange{1, c.size() - 2, false};
}
}  // namespace detail

inline Seq edge_determinants(const CurveC2& c) {
  return build_over<cplx>(detail::g_range(c), [&](int k) {
    const cplx g = det2(c.at(k), c.at(k + 1));
    if (near_zero(g, c.at(k).norm() * c.at(k + 1).norm())) throw NotImmersed(k);
    return g;
  });
}

inline Seq second_determinants(const CurveC2& c) {
  return build_over<cplx>(detail::u_range(c), [&](int k) {
    const cplx u = det2(c.at(k - 1), c.at(k + 1));
    if (near_zero(u, c.at(k - 1).norm() * c.at(k + 1).norm())) throw NotImmersed(k);
    return u;
  });
}

/// g, u and Q_k = cr(γ_{k-1}, γ_k, γ_{k+2}, γ_{k+1}) = g_{k-1} g_{k+1} / (u_k u_{k+1}).
inline InvariantData extract_invariants(const CurveC2& c) {
  InvariantData inv;
  inv.g = edge_determinants(c);
  inv.u = second_determinants(c);
  inv.Q = build_over<cplx>(detail::q_range(c),
                           [&](int k) { return inv.g(k - 1) * inv.g(k + 1) / (inv.u(k) * inv.u(k + 1)); });
  return inv;
}

/// Curve from invariants via γ_{k+1} = (u_k γ_k - g_k γ_{k-1}) / g_{k-1}.
/// Produces `count` points starting from the two seeds (count >= 2).
inline CurveC2 reconstruct(const Seq& g, const Seq& u, const C2Point& g0, const C2Point& g1, int count) {
  const cplx d = det2(g0, g1);
  if (std::abs(d - g(0)) > 1e-9 * std::max(1.0, std::abs(g(0)))) throw InconsistentSeed{};
  std::vector<C2Point> pts{g0, g1};
  pts.reserve(static_cast<size_t>(count));
  for (int k = 1; k + 1 < count; ++k) {
    if (near_zero(g(k - 1), 1.0) || near_zero(g(k), 1.0)) throw ZeroDeterminant(k);
    const cplx inv = 1.0 / g(k - 1);
    pts.push_back(inv * (u(k) * pts[static_cast<size_t>(k)] - g(k) * pts[static_cast<size_t>(k - 1)]));
  }
  return CurveC2::open(std::move(pts));
}

/// Periodic reconstruction: g and u must be periodic with period N; the
/// recursion is required to close up (γ_N = γ_0, γ_{N+1} = γ_1) within eps.
inline CurveC2 reconstruct_periodic(const Seq& g, const Seq& u, const C2Point& g0, const C2Point& g1,
                                    double eps = 1e-8) {
  const int n = g.size();
  CurveC2 chain = reconstruct(g, u, g0, g1, n + 2);
  const double scale = std::max(chain.at(0).norm(), chain.at(n).norm());
  const double closure = std::max((chain.at(n) - chain.at(0)).norm(), (chain.at(n + 1) - chain.at(1)).norm());
  if (closure > eps * std::max(1.0, scale)) {
    throw Error("invariants do not close up into a periodic curve, residual " + std::to_string(closure));
  }
  std::vector<C2Point> pts(chain.points().begin(), chain.points().begin() + n);
  return CurveC2::periodic(std::move(pts));
}

struct NormalizeResult {
  CurveC2 curve;
  /// set when the input was periodic but the required scalings do not close
  /// up around the period; the returned curve is then open
  bool periodic_obstruction = false;
  /// λ_N, the scaling that would have to equal 1 for a periodic result
  cplx holonomy = 1.0;
};

/// Rescales the lift pointwise (λ_0 = 1, λ_{k+1} = 1 / (λ_k g_k)) so that
/// every defined edge determinant becomes 1. The CP^1 curve is unchanged.
inline NormalizeResult normalize_arclength(const CurveC2& c, double eps = 1e-10) {
  const Seq g = edge_determinants(c);
  const int n = c.size();
  std::vector<cplx> lambda(static_cast<size_t>(n) + 1);
  lambda[0] = 1.0;
  for (int k = 0; k + 1 <= n; ++k) {
    if (k >= n - 1 && !c.is_periodic()) break;
    lambda[static_cast<size_t>(k + 1)] = 1.0 / (lambda[static_cast<size_t>(k)] * g(k));
  }
  std::vector<C2Point> pts(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) pts[static_cast<size_t>(k)] = lambda[static_cast<size_t>(k)] * c.at(k);

  NormalizeResult out;
  if (c.is_periodic()) {
    out.holonomy = lambda[static_cast<size_t>(n)];
    if (std::abs(out.holonomy - 1.0) > eps) {
      out.periodic_obstruction = true;
      out.curve = CurveC2::open(std::move(pts));
      return out;
    }
    out.curve = CurveC2::periodic(std::move(pts));
    return out;
  }
  out.curve = CurveC2::open(std::move(pts));
  return out;
}

/// c_k = x_k / y_k
inline PlaneCurve project(const CurveC2& c) {
  std::vector<cplx> pts(static_cast<size_t>(c.size()));
  for (int k = 0; k < c.size(); ++k) {
    const C2Point& p = c.at(k);
    if (near_zero(p.y, p.norm())) throw HitsInfinity(k);
    pts[static_cast<size_t>(k)] = p.x / p.y;
  }
  return PlaneCurve(std::move(pts), c.boundary());
}

/// canonical lift (c_k, 1)
inline CurveC2 lift(const PlaneCurve& c) {
  std::vector<C2Point> pts(static_cast<size_t>(c.size()));
  for (int k = 0; k < c.size(); ++k) pts[static_cast<size_t>(k)] = {c.at(k), 1.0};
  return CurveC2(std::move(pts), c.boundary());
}

/// max |g_k - 1|; throws if the curve is not conformal arc length parametrized.
inline double require_arclength(const CurveC2& c, double eps = tol::arclength) {
  double m = 0.0;
  for (const auto& g : edge_determinants(c).values()) m = std::max(m, std::abs(g - 1.0));
  if (m > eps) throw NotArcLength(m);
  return m;
}

}  // namespace todacurves
