#pragma once

#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/flow.hpp"

namespace todacurves {

struct ConstraintReport {
  bool satisfied = false;
  double max_residual = 0.0;
};

/// Verifies the arc-length preservation condition α_{k+1} + α_k = β_{k+1} - β_k.
inline ConstraintReport check_arclength_constraint(const FlowCoefficients& f, double eps = 1e-10) {
  const IndexRange r = intersect(stencil_range(f.alpha, 0, 1), stencil_range(f.beta, 0, 1));
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) {
    m = std::max(m, std::abs(f.alpha(k + 1) + f.alpha(k) - f.beta(k + 1) + f.beta(k)));
  }
  return {m <= eps, m};
}

/// Closure defect of the cyclic system α_{k+1} + α_k = β_{k+1} - β_k for
/// periodic β: zero iff a periodic α exists (always for odd periods).
inline double alpha_closure_defect(const Seq& beta) {
  if (!beta.is_periodic()) return 0.0;
  const int n = beta.size();
  if (n % 2 != 0) return 0.0;
  cplx a = 0.0;  // alternating sum of D_k = β_{k+1} - β_k
  for (int k = 0; k < n; ++k) a = (beta(k + 1) - beta(k)) - a;
  return std::abs(a);
}

/// Solves α_{k+1} + α_k = β_{k+1} - β_k.
/// Periodic odd period: the unique cyclic solution. Periodic even period:
/// one-parameter family, anchored at α_0 = (β_1 - β_0)/2; if the closure
/// defect is nonzero the returned α wraps with that defect (only β enters
/// the CP^1 evolution). Ranged β: recursion from α_first = (D_first)/2.
inline Seq alpha_from_beta(const Seq& beta) {
  if (beta.is_periodic()) {
    const int n = beta.size();
    cplx a0;
    if (n % 2 != 0) {
      cplx alt = 0.0;  // α_N = -α_0 + alt for odd N
      for (int k = n - 1; k >= 0; --k) alt = (beta(k + 1) - beta(k)) - alt;
      a0 = alt / 2.0;
    } else {
      a0 = (beta(1) - beta(0)) / 2.0;
    }
    std::vector<cplx> alpha(static_cast<size_t>(n));
    alpha[0] = a0;
    for (int k = 0; k + 1 < n; ++k) alpha[static_cast<size_t>(k + 1)] = beta(k + 1) - beta(k) - alpha[static_cast<size_t>(k)];
    return Seq::periodic(std::move(alpha));
  }
  const int lo = beta.first();
  const int n = beta.size();
  std::vector<cplx> alpha(static_cast<size_t>(n));
  alpha[0] = (beta(lo + 1) - beta(lo)) / 2.0;
  for (int k = 0; k + 1 < n; ++k) {
    alpha[static_cast<size_t>(k + 1)] = beta(lo + k + 1) - beta(lo + k) - alpha[static_cast<size_t>(k)];
  }
  return Seq::ranged(lo, std::move(alpha));
}

/// Conformal tangential flow: α ≡ 0, β ≡ 1/2. Requires g ≡ 1; then Q solves
/// the Volterra model Q̇_k = Q_k (Q_{k+1} - Q_{k-1}).
inline FlowCoefficients tangential_coeffs(const CurveC2& c, double eps = tol::arclength) {
  require_arclength(c, eps);
  const bool p = c.is_periodic();
  const int n = c.size();
  return {Seq::constant(0.0, n, p), Seq::constant(0.5, n, p)};
}

/// Q̇_k = Q_k (Q_{k+1} - Q_{k-1})
inline Seq volterra_rhs(const Seq& Q) {
  return build_over<cplx>(stencil_range(Q, 1, 1), [&](int k) { return Q(k) * (Q(k + 1) - Q(k - 1)); });
}

/// Second Volterra flow
/// Q̇_k = Q_k (Q_{k+1}(Q_{k+2} + Q_{k+1} + Q_k) - Q_{k-1}(Q_k + Q_{k-1} + Q_{k-2}))
inline Seq volterra2_rhs(const Seq& Q) {
  return build_over<cplx>(stencil_range(Q, 2, 2), [&](int k) {
    return Q(k) * (Q(k + 1) * (Q(k + 2) + Q(k + 1) + Q(k)) - Q(k - 1) * (Q(k) + Q(k - 1) + Q(k - 2)));
  });
}

/// β_k = (Q_{k-1} + Q_k + 1)/2; under this flow Q solves the second Volterra flow.
inline FlowCoefficients volterra2_coeffs(const CurveC2& c, double eps = tol::arclength) {
  require_arclength(c, eps);
  const Seq Q = extract_invariants(c).Q;
  Seq beta = build_over<cplx>(stencil_range(Q, 1, 0), [&](int k) { return (Q(k - 1) + Q(k) + 1.0) / 2.0; });
  Seq alpha = alpha_from_beta(beta);
  return {std::move(alpha), std::move(beta)};
}

struct HierarchyLevel {
  int level = 1;
  std::vector<cplx> constants;  // a_1 .. a_level; missing entries default to 1/2

  cplx constant(int i) const {  // 1-based
    if (i - 1 < static_cast<int>(constants.size())) return constants[static_cast<size_t>(i - 1)];
    return 0.5;
  }
};

/// Q̇_k / Q_k of the flow driven by β on a conformal arc-length curve, in the
/// normalization of the hierarchy iteration (half of the g ≡ 1 cross-ratio
/// flow; equals β̂-driven rates since β̂ = 2β at g ≡ 1).
inline Seq normalized_q_rate(const Seq& Q, const Seq& beta) {
  const IndexRange r = intersect(stencil_range(Q, 1, 1), stencil_range(beta, 1, 2));
  return build_over<cplx>(r, [&](int k) {
    return (Q(k) - 1.0) * (beta(k + 1) - beta(k)) + Q(k + 1) * beta(k + 2) - Q(k - 1) * beta(k - 1);
  });
}

/// Iterates β^{new}_{k+1} - β^{new}_k = Q̇^{old}_k / Q^{old}_k from the zero
/// flow. Level 1: β ≡ a_1. Level 2: β_k = a_1 (Q_k + Q_{k-1}) + a_2. Levels
/// above 2 are the conjectured flows; the additive constant a_m anchors β_0.
inline Seq hierarchy_beta(const HierarchyLevel& lvl, const Seq& Q, double eps = 1e-9) {
  if (lvl.level < 0) throw Error("hierarchy level must be >= 0");
  if (!Q.is_periodic()) throw Error("hierarchy_beta requires a periodic cross-ratio sequence");
  const int n = Q.size();
  if (lvl.level == 0) return Seq::constant(0.0, n, true);
  Seq beta = Seq::constant(lvl.constant(1), n, true);
  for (int m = 2; m <= lvl.level; ++m) {
    const Seq incr = normalized_q_rate(Q, beta);
    cplx total = 0.0;
    double scale = 0.0;
    for (int k = 0; k < n; ++k) {
      total += incr(k);
      scale = std::max(scale, std::abs(incr(k)));
    }
    if (std::abs(total) > eps * std::max(1.0, scale)) throw NonTelescoping(std::abs(total));
    std::vector<cplx> next(static_cast<size_t>(n));
    next[0] = (m == 2) ? lvl.constant(1) * (Q(0) + Q(-1)) + lvl.constant(2) : lvl.constant(m);
    for (int k = 0; k + 1 < n; ++k) next[static_cast<size_t>(k + 1)] = next[static_cast<size_t>(k)] + incr(k);
    beta = Seq::periodic(std::move(next));
  }
  return beta;
}

inline FlowCoefficients hierarchy_coeffs(const CurveC2& c, const HierarchyLevel& lvl, double eps = tol::arclength) {
  require_arclength(c, eps);
  Seq beta = hierarchy_beta(lvl, extract_invariants(c).Q);
  Seq alpha = alpha_from_beta(beta);
  return {std::move(alpha), std::move(beta)};
}

/// Associated family: Q_k(λ) = λ Q_k, with λ ≠ 0. The scaled Volterra
/// equation λ Q̇(λ) = Q(λ)(Q_{k+1}(λ) - Q_{k-1}(λ)) holds when Q solves
/// the Volterra model.
inline Seq associated_family(const Seq& Q, const cplx& lambda) {
  if (std::abs(lambda) == 0.0) throw ZeroLambda{};
  const IndexRange r{Q.first(), Q.end(), Q.is_periodic()};
  return build_over<cplx>(r, [&](int k) { return lambda * Q(k); });
}

inline CoeffGen tangential_gen(double eps = tol::arclength) {
  return [eps](const CurveC2& c) { return tangential_coeffs(c, eps); };
}
inline CoeffGen volterra2_gen(double eps = tol::arclength) {
  return [eps](const CurveC2& c) { return volterra2_coeffs(c, eps); };
}
inline CoeffGen hierarchy_gen(HierarchyLevel lvl, double eps = tol::arclength) {
  return [lvl, eps](const CurveC2& c) { return hierarchy_coeffs(c, lvl, eps); };
}

}  // namespace todacurves
