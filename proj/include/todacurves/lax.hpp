#pragma once

#include <vector>

#include "todacurves/arclength.hpp"
#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/flow.hpp"
#include "todacurves/matrix2.hpp"

namespace todacurves {

/// F_k stacks γ_k and γ_{k-1} as rows.
inline Matrix2 frame(const CurveC2& c, int k) {
  return {c.at(k).x, c.at(k).y, c.at(k - 1).x, c.at(k - 1).y};
}

/// L_k = [[u_k / g_{k-1}, -g_k / g_{k-1}], [1, 0]] with F_{k+1} = L_k F_k.
inline MatSeq build_L(const CurveC2& c) {
  const Seq g = edge_determinants(c);
  const Seq u = second_determinants(c);
  const IndexRange r = intersect(stencil_range(u, 0, 0), stencil_range(g, 1, 0));
  return build_over<Matrix2>(r, [&](int k) {
    return Matrix2{u(k) / g(k - 1), -g(k) / g(k - 1), 1.0, 0.0};
  });
}

/// V_k of the zero-curvature representation, Ḟ_k = V_k F_k.
inline MatSeq build_V(const CurveC2& c, const FlowCoefficients& f) {
  const Seq g = edge_determinants(c);
  const Seq u = second_determinants(c);
  IndexRange r = intersect(stencil_range(u, 1, 0), stencil_range(g, 2, 0));
  r = intersect(r, intersect(stencil_range(f.alpha, 1, 0), stencil_range(f.beta, 1, 0)));
  return build_over<Matrix2>(r, [&](int k) {
    return Matrix2{f.alpha(k) + f.beta(k) / g(k - 1),
                   -(1.0 + g(k) / g(k - 1)) * f.beta(k) / u(k),
                   (1.0 + g(k - 2) / g(k - 1)) * f.beta(k - 1) / u(k - 1),
                   f.alpha(k - 1) - f.beta(k - 1) / g(k - 1)};
  });
}

/// max_k ‖ Ḟ_k - V_k F_k ‖ with Ḟ from the velocity field; an exactness
/// check of the V construction.
inline double frame_rate_residual(const CurveC2& c, const FlowCoefficients& f) {
  const VelocityField v = velocity(c, f);
  const MatSeq V = build_V(c, f);
  IndexRange r = intersect(stencil_range(V, 0, 0), stencil_range(v, 1, 0));
  if (!c.is_periodic()) r = intersect(r, IndexRange{2, c.size(), false});
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) {
    const Matrix2 Fdot{v(k).x, v(k).y, v(k - 1).x, v(k - 1).y};
    m = std::max(m, (Fdot - V(k) * frame(c, k)).max_abs());
  }
  return m;
}

/// Instantaneous zero-curvature residual: L̇_k (from the induced g, u rates)
/// against V_{k+1} L_k - L_k V_k. Exact algebra, no time stepping.
inline double compat_algebraic_residual(const CurveC2& c, const FlowCoefficients& f) {
  const Seq g = edge_determinants(c);
  const Seq u = second_determinants(c);
  const InvariantRates rates = induced_rates(c, f);
  const MatSeq L = build_L(c);
  const MatSeq V = build_V(c, f);
  IndexRange r = intersect(stencil_range(L, 0, 0), stencil_range(V, 0, 1));
  r = intersect(r, intersect(stencil_range(rates.u_rate, 0, 0), stencil_range(rates.g_rate, 1, 0)));
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) {
    const cplx gm = g(k - 1), gdm = rates.g_rate(k - 1);
    const Matrix2 Ldot{rates.u_rate(k) / gm - u(k) * gdm / (gm * gm),
                       -rates.g_rate(k) / gm + g(k) * gdm / (gm * gm), 0.0, 0.0};
    m = std::max(m, (Ldot - (V(k + 1) * L(k) - L(k) * V(k))).max_abs());
  }
  return m;
}

/// max over k and interior times of ‖ L̇_k - (V_{k+1} L_k - L_k V_k) ‖ with
/// L̇ by central differences along the stored trajectory.
inline double compat_residual(const Trajectory& traj, const CoeffGen& gen) {
  double m = 0.0;
  const double dt = traj.dt;
  for (int i = 1; i + 1 < static_cast<int>(traj.states.size()); ++i) {
    const CurveC2& cur = traj.at(i);
    const MatSeq Lp = build_L(traj.at(i + 1));
    const MatSeq Lm = build_L(traj.at(i - 1));
    const MatSeq L = build_L(cur);
    const MatSeq V = build_V(cur, gen(cur));
    IndexRange r = intersect(stencil_range(L, 0, 0), stencil_range(V, 0, 1));
    r = intersect(r, intersect(stencil_range(Lp, 0, 0), stencil_range(Lm, 0, 0)));
    for (int k = r.lo; k < r.hi; ++k) {
      const Matrix2 Ldot = (1.0 / (2.0 * dt)) * (Lp(k) - Lm(k));
      m = std::max(m, (Ldot - (V(k + 1) * L(k) - L(k) * V(k))).max_abs());
    }
  }
  return m;
}

/// max_k | tr V_{k+1} - ġ_k / g_k |
inline double trace_residual(const CurveC2& c, const FlowCoefficients& f) {
  const Seq g = edge_determinants(c);
  const InvariantRates rates = induced_rates(c, f);
  const MatSeq V = build_V(c, f);
  IndexRange r = intersect(stencil_range(rates.g_rate, 0, 0), stencil_range(V, 0, 1));
  r = intersect(r, stencil_range(g, 0, 0));
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) m = std::max(m, std::abs(V(k + 1).trace() - rates.g_rate(k) / g(k)));
  return m;
}

struct GaugedLax {
  MatSeq E;       // gauge E_k over the window k = 0..N-1 (unwrapped prefixes)
  MatSeq Ltilde;  // [[1, -1], [Q_k, 0]]
  MatSeq Vtilde;  // [[1 + Q_{k-1}, -1], [Q_{k-1}, Q_k]], constant summand dropped
  double ltilde_residual = 0.0;       // conjugation vs closed form
  double vtilde_residual = 0.0;       // conjugation (minus E^{-1} Ė) vs closed form + const·I
};

/// Gauge chain to the classical Volterra Lax pair. Requires a periodic
/// conformal arc-length curve with tangential coefficients. The E-conjugated
/// V picks up -E_k^{-1} Ė_k; its difference from the closed form is a
/// k-independent multiple of the identity, which is dropped.
inline GaugedLax volterra_gauge(const CurveC2& c, const FlowCoefficients& f, double eps = tol::arclength) {
  require_arclength(c, eps);
  if (!c.is_periodic()) throw Error("volterra_gauge requires a periodic curve");
  for (const auto& b : f.beta.values()) {
    if (std::abs(b - 0.5) > 1e-10) throw Error("volterra_gauge requires tangential coefficients (beta = 1/2)");
  }
  const int n = c.size();
  const Seq u = second_determinants(c);
  const Seq Q = extract_invariants(c).Q;

  GaugedLax out;
  std::vector<Matrix2> E(static_cast<size_t>(n) + 1);
  cplx prefix = 1.0;
  for (int k = 0; k <= n; ++k) {
    E[static_cast<size_t>(k)] = prefix * Matrix2::diag(1.0, u(k));
    if (k < n) prefix *= u(k);
  }

  const MatSeq L = build_L(c);
  std::vector<Matrix2> Lt(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Lt[static_cast<size_t>(k)] = Matrix2{1.0, -1.0, Q(k), 0.0};
    const Matrix2 conj = E[static_cast<size_t>(k + 1)].inverse() * L(k) * E[static_cast<size_t>(k)];
    out.ltilde_residual = std::max(out.ltilde_residual, (conj - Lt[static_cast<size_t>(k)]).max_abs());
  }

  // udot under the tangential flow; drives Ė
  const Seq udot = build_over<cplx>(stencil_range(u, 1, 1), [&](int k) { return 1.0 / u(k - 1) - 1.0 / u(k + 1); });
  const MatSeq V = build_V(c, f);
  std::vector<Matrix2> Vt(static_cast<size_t>(n));
  cplx drop{};
  bool drop_set = false;
  for (int k = 0; k < n; ++k) {
    Vt[static_cast<size_t>(k)] = Matrix2{1.0 + Q(k - 1), -1.0, Q(k - 1), Q(k)};
    // Ė_k = (Σ_{i<k} u̇_i/u_i) E_k + (∏_{i<k} u_i) diag(0, u̇_k)
    cplx prefdot = 0.0;
    cplx pref = 1.0;
    for (int i = 0; i < k; ++i) {
      prefdot += udot(i) / u(i);
      pref *= u(i);
    }
    const Matrix2 Ed = prefdot * E[static_cast<size_t>(k)] + pref * Matrix2::diag(0.0, udot(k));
    const Matrix2 Einv = E[static_cast<size_t>(k)].inverse();
    const Matrix2 conj = Einv * V(k) * E[static_cast<size_t>(k)] - Einv * Ed;
    const Matrix2 diff = conj - Vt[static_cast<size_t>(k)];
    // diff must be c·I with one c for all k
    out.vtilde_residual = std::max(out.vtilde_residual, std::abs(diff.b));
    out.vtilde_residual = std::max(out.vtilde_residual, std::abs(diff.c));
    out.vtilde_residual = std::max(out.vtilde_residual, std::abs(diff.a - diff.d));
    if (!drop_set) {
      drop = diff.a;
      drop_set = true;
    } else {
      out.vtilde_residual = std::max(out.vtilde_residual, std::abs(diff.a - drop));
    }
  }
  out.E = MatSeq::ranged(0, std::move(E));
  out.Ltilde = MatSeq::periodic(std::move(Lt));
  out.Vtilde = MatSeq::periodic(std::move(Vt));
  return out;
}

/// λ-dependent Volterra Lax matrices (transposed, k-reversed convention):
/// L^v(λ) = [[1, λ Q_k], [-1, 0]], V^v(λ) = [[1 + λ Q_{k+1}, λ Q_{k+1}], [-1, λ Q_k]].
inline Matrix2 volterra_L_lambda(const Seq& Q, int k, const cplx& lambda) {
  return {1.0, lambda * Q(k), -1.0, 0.0};
}
inline Matrix2 volterra_V_lambda(const Seq& Q, int k, const cplx& lambda) {
  return {1.0 + lambda * Q(k + 1), lambda * Q(k + 1), -1.0, lambda * Q(k)};
}

/// λ L̇^v_k = V^v_k L^v_k - L^v_k V^v_{k-1} by central differences along a
/// tangential-flow trajectory.
inline double lambda_compat_residual(const Trajectory& traj, const cplx& lambda) {
  double m = 0.0;
  const double dt = traj.dt;
  for (int i = 1; i + 1 < static_cast<int>(traj.states.size()); ++i) {
    const Seq Q = extract_invariants(traj.at(i)).Q;
    const Seq Qp = extract_invariants(traj.at(i + 1)).Q;
    const Seq Qm = extract_invariants(traj.at(i - 1)).Q;
    for (int k = 0; k < Q.size(); ++k) {
      const Matrix2 Ldot = (1.0 / (2.0 * dt)) * (volterra_L_lambda(Qp, k, lambda) - volterra_L_lambda(Qm, k, lambda));
      const Matrix2 rhs = volterra_V_lambda(Q, k, lambda) * volterra_L_lambda(Q, k, lambda) -
                          volterra_L_lambda(Q, k, lambda) * volterra_V_lambda(Q, k - 1, lambda);
      m = std::max(m, (lambda * Ldot - rhs).max_abs());
    }
  }
  return m;
}

/// Conjugation by diag(λ^{1/2}, λ^{-1/2}) with the principal square root;
/// together with λ → λ^{-2} this carries the pair to the cited classical form.
inline Matrix2 classical_gauge(const Matrix2& m, const cplx& lambda) {
  if (std::abs(lambda) == 0.0) throw ZeroLambda{};
  // diag(λ^{-1/2}, λ^{1/2}) * m * diag(λ^{1/2}, λ^{-1/2})
  return {m.a, m.b / lambda, m.c * lambda, m.d};
}

inline std::pair<Matrix2, Matrix2> classical_volterra_pair(const Seq& Q, int k, const cplx& lambda) {
  if (std::abs(lambda) == 0.0) throw ZeroLambda{};
  const cplx lam_sub = 1.0 / (lambda * lambda);
  return {classical_gauge(volterra_L_lambda(Q, k, lam_sub), lambda),
          classical_gauge(volterra_V_lambda(Q, k, lam_sub), lambda)};
}

/// Inverts the V construction: α_k = v11_k + v12_k u_k / (g_{k-1} + g_k),
/// β_k = -v12_k g_{k-1} u_k / (g_{k-1} + g_k). The 22-component constraint
/// v12_k = -v21_{k+1} g_k / g_{k-1} is checked first.
inline FlowCoefficients coeffs_from_V(const MatSeq& V, const Seq& g, const Seq& u, double eps = 1e-9) {
  IndexRange r = intersect(stencil_range(V, 0, 1), intersect(stencil_range(g, 1, 0), stencil_range(u, 0, 0)));
  for (int k = r.lo; k < r.hi; ++k) {
    const cplx lhs = V(k).b;
    const cplx rhs = -V(k + 1).c * g(k) / g(k - 1);
    const double res = std::abs(lhs - rhs);
    if (res > eps * std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)))) throw ConstraintViolated(k, res);
  }
  IndexRange ra = intersect(stencil_range(V, 0, 0), intersect(stencil_range(g, 1, 0), stencil_range(u, 0, 0)));
  Seq alpha = build_over<cplx>(ra, [&](int k) { return V(k).a + V(k).b * u(k) / (g(k - 1) + g(k)); });
  Seq beta = build_over<cplx>(ra, [&](int k) { return -V(k).b * g(k - 1) * u(k) / (g(k - 1) + g(k)); });
  return {std::move(alpha), std::move(beta)};
}

}  // namespace todacurves
