#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/flow.hpp"
#include "todacurves/matrix2.hpp"

namespace todacurves {

/// Flaschka-Manakov data on a curve: p_k = u_k / (g_k g_{k-1}) - λ and
/// g_k = exp((q_k - q_{k+1})/2), anchored at q_0 = 0 with the principal log.
struct TodaState {
  Seq g;
  Seq p;
  Seq q;  // ranged from 0; one more entry than the window so q(k+1) exists
  cplx lambda{};
};

inline TodaState flaschka_vars(const CurveC2& c, const cplx& lambda) {
  TodaState st;
  st.lambda = lambda;
  st.g = edge_determinants(c);
  const Seq u = second_determinants(c);
  st.p = build_over<cplx>(intersect(stencil_range(u, 0, 0), stencil_range(st.g, 1, 0)),
                          [&](int k) { return u(k) / (st.g(k) * st.g(k - 1)) - lambda; });
  const int count = c.is_periodic() ? c.size() + 1 : c.size();
  std::vector<cplx> q(static_cast<size_t>(count));
  q[0] = 0.0;
  for (int k = 0; k + 1 < count; ++k) q[static_cast<size_t>(k + 1)] = q[static_cast<size_t>(k)] - 2.0 * std::log(st.g(k));
  st.q = Seq::ranged(0, std::move(q));
  return st;
}

enum class TodaFlow : int { First = 1, Second = 2, Third = 3 };

inline TodaFlow toda_flow_from_int(int n) {
  if (n < 1 || n > 3) throw Error("Toda flow index must be 1, 2 or 3");
  return static_cast<TodaFlow>(n);
}

/// Flow coefficients realizing the first three Toda hierarchy flows as curve
/// flows. (The second flow's α carries -(g_k^{-2} - g_{k-1}^{-2})/2; with it
/// the induced rates reproduce the Toda rhs exactly.)
inline FlowCoefficients toda_coeffs(TodaFlow flow, const CurveC2& c, const cplx& lambda) {
  const Seq g = edge_determinants(c);
  const TodaState st = flaschka_vars(c, lambda);
  const Seq& p = st.p;
  auto gi2 = [&](int k) { return 1.0 / (g(k) * g(k)); };
  auto ratio = [&](int k) { return (g(k - 1) - g(k)) / (g(k - 1) + g(k)); };

  IndexRange r = intersect(stencil_range(p, 0, 0), stencil_range(g, 1, 0));
  switch (flow) {
    case TodaFlow::First: {
      Seq alpha = build_over<cplx>(r, [&](int k) { return -0.5 * (p(k) + lambda) * ratio(k); });
      Seq beta = build_over<cplx>(r, [&](int k) { return -g(k - 1) * g(k) * (p(k) + lambda) / (g(k - 1) + g(k)); });
      return {std::move(alpha), std::move(beta)};
    }
    case TodaFlow::Second: {
      Seq alpha = build_over<cplx>(r, [&](int k) {
        return -0.5 * (p(k) * p(k) - lambda * lambda) * ratio(k) - 0.5 * (gi2(k) - gi2(k - 1));
      });
      Seq beta = build_over<cplx>(
          r, [&](int k) { return -g(k - 1) * g(k) * (p(k) * p(k) - lambda * lambda) / (g(k - 1) + g(k)); });
      return {std::move(alpha), std::move(beta)};
    }
    case TodaFlow::Third: {
      IndexRange r3 = intersect(stencil_range(p, 1, 1), stencil_range(g, 1, 0));
      Seq alpha = build_over<cplx>(r3, [&](int k) {
        const cplx cube = p(k) * p(k) * p(k) + lambda * lambda * lambda -
                          2.0 * (p(k) + lambda) / (g(k) * g(k - 1));
        return -0.5 * ratio(k) * cube - 0.5 * gi2(k) * (2.0 * p(k) + p(k + 1)) +
               0.5 * gi2(k - 1) * (p(k - 1) + 2.0 * p(k));
      });
      Seq beta = build_over<cplx>(r3, [&](int k) {
        return -g(k - 1) * g(k) * (p(k) + lambda) / (g(k - 1) + g(k)) *
               (gi2(k - 1) + gi2(k) + p(k) * p(k) - lambda * p(k) + lambda * lambda);
      });
      return {std::move(alpha), std::move(beta)};
    }
  }
  throw Error("unreachable");
}

struct TodaRates {
  Seq g_rate_over_g;
  Seq p_rate;
};

/// Right-hand sides of the first three Toda hierarchy flows in (g, p).
inline TodaRates toda_rhs(TodaFlow flow, const Seq& g, const Seq& p) {
  for (const auto& v : g.values()) {
    if (std::abs(v) == 0.0) throw ZeroG(0);
  }
  auto gi2 = [&](int k) { return 1.0 / (g(k) * g(k)); };
  TodaRates out;
  switch (flow) {
    case TodaFlow::First: {
      out.g_rate_over_g = build_over<cplx>(stencil_range(p, 0, 1), [&](int k) { return 0.5 * (p(k) - p(k + 1)); });
      out.p_rate = build_over<cplx>(intersect(stencil_range(g, 1, 0), stencil_range(p, 0, 0)),
                                    [&](int k) { return gi2(k) - gi2(k - 1); });
      return out;
    }
    case TodaFlow::Second: {
      out.g_rate_over_g = build_over<cplx>(intersect(stencil_range(p, 0, 1), stencil_range(g, 1, 1)), [&](int k) {
        return -0.5 * (p(k + 1) * p(k + 1) - p(k) * p(k) + gi2(k + 1) - gi2(k - 1));
      });
      out.p_rate = build_over<cplx>(intersect(stencil_range(p, 1, 1), stencil_range(g, 1, 0)), [&](int k) {
        return gi2(k) * (p(k + 1) + p(k)) - gi2(k - 1) * (p(k) + p(k - 1));
      });
      return out;
    }
    case TodaFlow::Third: {
      out.g_rate_over_g = build_over<cplx>(intersect(stencil_range(p, 1, 2), stencil_range(g, 1, 1)), [&](int k) {
        const cplx up = p(k + 1) * p(k + 1) * p(k + 1) + p(k + 2) * gi2(k + 1) + 2.0 * p(k + 1) * gi2(k + 1) +
                        p(k + 1) * gi2(k);
        const cplx dn = p(k) * p(k) * p(k) + p(k - 1) * gi2(k - 1) + p(k) * gi2(k) + 2.0 * p(k) * gi2(k - 1);
        return -0.5 * (up - dn);
      });
      out.p_rate = build_over<cplx>(intersect(stencil_range(p, 1, 1), stencil_range(g, 2, 1)), [&](int k) {
        return gi2(k) * (p(k + 1) * p(k + 1) + p(k) * p(k) + p(k + 1) * p(k) + gi2(k + 1) + gi2(k)) -
               gi2(k - 1) * (p(k) * p(k) + p(k - 1) * p(k - 1) + p(k) * p(k - 1) + gi2(k - 1) + gi2(k - 2));
      });
      return out;
    }
  }
  throw Error("unreachable");
}

/// q̇_k along each flow (remarks to the flow propositions)
inline Seq toda_qdot(TodaFlow flow, const Seq& g, const Seq& p, const cplx& lambda) {
  auto gi2 = [&](int k) { return 1.0 / (g(k) * g(k)); };
  switch (flow) {
    case TodaFlow::First:
      return build_over<cplx>(stencil_range(p, 0, 0), [&](int k) { return p(k) + lambda; });
    case TodaFlow::Second:
      return build_over<cplx>(intersect(stencil_range(p, 0, 0), stencil_range(g, 1, 0)), [&](int k) {
        return gi2(k) + gi2(k - 1) + p(k) * p(k) - lambda * lambda;
      });
    case TodaFlow::Third:
      return build_over<cplx>(intersect(stencil_range(p, 1, 1), stencil_range(g, 1, 0)), [&](int k) {
        return gi2(k) * (2.0 * p(k) + p(k + 1)) + gi2(k - 1) * (p(k - 1) + 2.0 * p(k)) +
               p(k) * p(k) * p(k) + lambda * lambda * lambda;
      });
  }
  throw Error("unreachable");
}

inline CoeffGen toda_gen(TodaFlow flow, const cplx& lambda) {
  return [flow, lambda](const CurveC2& c) { return toda_coeffs(flow, c, lambda); };
}

struct TodaConsistencyReport {
  double g_rel = 0.0;  // finite differences of g vs toda_rhs, relative
  double p_rel = 0.0;
  double q_rel = 0.0;  // q̇ vs the remark
  double q2_rel = 0.0; // flow 1 only: q̈ vs g^{-2} - g_{-}^{-2}
};

/// Integrates the curve under the chosen Toda flow and compares finite
/// differences of (g, p, q) with the Toda right-hand sides.
inline TodaConsistencyReport toda_consistency(TodaFlow flow, const CurveC2& c, const cplx& lambda, double dt,
                                              int steps) {
  const Trajectory traj = integrate(c, toda_gen(flow, lambda), dt, steps);
  TodaConsistencyReport rep;
  auto rel = [](double err, double scale) { return err / std::max(scale, 1e-12); };

  const int samples[] = {1, steps / 4, steps / 2, (3 * steps) / 4, steps - 1};
  for (int i : samples) {
    if (i < 1 || i + 1 > steps) continue;
    const TodaState sm = flaschka_vars(traj.at(i - 1), lambda);
    const TodaState s0 = flaschka_vars(traj.at(i), lambda);
    const TodaState sp = flaschka_vars(traj.at(i + 1), lambda);
    const TodaRates rhs = toda_rhs(flow, s0.g, s0.p);
    const Seq qdot = toda_qdot(flow, s0.g, s0.p, lambda);

    double gerr = 0.0, gsc = 0.0, perr = 0.0, psc = 0.0, qerr = 0.0, qsc = 0.0, q2err = 0.0, q2sc = 0.0;
    IndexRange r = intersect(stencil_range(rhs.g_rate_over_g, 0, 0), stencil_range(rhs.p_rate, 0, 0));
    r = intersect(r, stencil_range(qdot, 0, 0));
    for (int k = r.lo; k < r.hi; ++k) {
      const cplx gfd = (sp.g(k) - sm.g(k)) / (2.0 * dt) / s0.g(k);
      gerr = std::max(gerr, std::abs(gfd - rhs.g_rate_over_g(k)));
      gsc = std::max(gsc, std::abs(rhs.g_rate_over_g(k)));
      const cplx pfd = (sp.p(k) - sm.p(k)) / (2.0 * dt);
      perr = std::max(perr, std::abs(pfd - rhs.p_rate(k)));
      psc = std::max(psc, std::abs(rhs.p_rate(k)));
      const cplx qfd = (sp.q(k) - sm.q(k)) / (2.0 * dt);
      qerr = std::max(qerr, std::abs(qfd - qdot(k)));
      qsc = std::max(qsc, std::abs(qdot(k)));
      if (flow == TodaFlow::First) {
        const cplx q2fd = (sp.q(k) - 2.0 * s0.q(k) + sm.q(k)) / (dt * dt);
        const cplx toda_eq = 1.0 / (s0.g(k) * s0.g(k)) - 1.0 / (s0.g(k - 1) * s0.g(k - 1));
        q2err = std::max(q2err, std::abs(q2fd - toda_eq));
        q2sc = std::max(q2sc, std::abs(toda_eq));
      }
    }
    rep.g_rel = std::max(rep.g_rel, rel(gerr, gsc));
    rep.p_rel = std::max(rep.p_rel, rel(perr, psc));
    rep.q_rel = std::max(rep.q_rel, rel(qerr, qsc));
    if (flow == TodaFlow::First) rep.q2_rel = std::max(rep.q2_rel, rel(q2err, q2sc));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// discrete quadrics

/// complex bilinear form x1 x2 + y1 y2 (not hermitian)
inline cplx bilinear(const C2Point& a, const C2Point& b) { return a.x * b.x + a.y * b.y; }

struct QuadricData {
  Matrix2 M;  // symmetric
  cplx u{};
  cplx g{};
};

/// The unique symmetric M with <Mγ0,γ0> = <Mγ1,γ1> = 1 and <Mγ0,γ1> = u/(2g);
/// det M = (1 - u²/g²)/g².
inline QuadricData quadric_matrix(const C2Point& g0, const C2Point& g1, const cplx& u) {
  const cplx g = det2(g0, g1);
  if (near_zero(g, g0.norm() * g1.norm())) throw ZeroG(0);
  const cplx w = u / (2.0 * g);
  QuadricData q;
  q.u = u;
  q.g = g;
  const cplx inv_g2 = 1.0 / (g * g);
  q.M.a = inv_g2 * (g0.y * g0.y + g1.y * g1.y - 2.0 * g0.y * g1.y * w);
  q.M.b = inv_g2 * ((g0.x * g1.y + g0.y * g1.x) * w - (g0.x * g0.y + g1.x * g1.y));
  q.M.c = q.M.b;
  q.M.d = inv_g2 * (g0.x * g0.x + g1.x * g1.x - 2.0 * g0.x * g1.x * w);
  return q;
}

/// γ_{k+2} = (u/g) γ_{k+1} - γ_k from the two seed points; n points total.
inline CurveC2 quadric_curve(const C2Point& g0, const C2Point& g1, const cplx& u, const cplx& g, int n) {
  const cplx d = det2(g0, g1);
  if (std::abs(d - g) > 1e-9 * std::max(1.0, std::abs(g))) throw InconsistentSeed{};
  if (std::abs(g) == 0.0) throw ZeroG(0);
  std::vector<C2Point> pts{g0, g1};
  pts.reserve(static_cast<size_t>(n));
  for (int k = 2; k < n; ++k) {
    pts.push_back((u / g) * pts[static_cast<size_t>(k - 1)] - pts[static_cast<size_t>(k - 2)]);
  }
  return CurveC2::open(std::move(pts));
}

struct QuadricResiduals {
  double on_quadric = 0.0;   // max |<Mγ_k, γ_k> - 1|
  double edge_value = 0.0;   // max |<Mγ_k, γ_{k+1}> - u/(2g)|
};

inline QuadricResiduals quadric_residuals(const CurveC2& c, const QuadricData& q) {
  QuadricResiduals r;
  const cplx target = q.u / (2.0 * q.g);
  for (int k = 0; k < c.size(); ++k) {
    r.on_quadric = std::max(r.on_quadric, std::abs(bilinear(q.M.apply(c.at(k)), c.at(k)) - 1.0));
    if (c.is_periodic() || k + 1 < c.size()) {
      r.edge_value = std::max(r.edge_value, std::abs(bilinear(q.M.apply(c.at(k)), c.at(k + 1)) - target));
    }
  }
  return r;
}

/// d/dt of the quadric identities under γ̇_k = ρ(γ_{k+1} - γ_{k-1}),
/// evaluated analytically by the product rule. Vanishes on quadric curves.
inline double quadric_tangency_residual(const CurveC2& c, const QuadricData& q, const cplx& rho) {
  double m = 0.0;
  const IndexRange pts = c.point_range();
  const int lo = c.is_periodic() ? 0 : 1;
  const int hi = c.is_periodic() ? c.size() : c.size() - 1;
  (void)pts;
  for (int k = lo; k < hi; ++k) {
    const cplx ddt_diag =
        2.0 * rho * (bilinear(q.M.apply(c.at(k + 1)), c.at(k)) - bilinear(q.M.apply(c.at(k - 1)), c.at(k)));
    m = std::max(m, std::abs(ddt_diag));
    if (c.is_periodic() ? true : k + 2 < c.size()) {
      const cplx ddt_edge =
          rho * (bilinear(q.M.apply(c.at(k + 1)), c.at(k + 1)) - bilinear(q.M.apply(c.at(k - 1)), c.at(k + 1))) +
          rho * (bilinear(q.M.apply(c.at(k)), c.at(k + 2)) - bilinear(q.M.apply(c.at(k)), c.at(k)));
      m = std::max(m, std::abs(ddt_edge));
    }
  }
  return m;
}

}  // namespace todacurves
