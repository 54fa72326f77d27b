#pragma once

#include <cmath>
#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/flow.hpp"

namespace todacurves {

/// real scalar product of plane vectors, <a,b> = Re(a conj(b))
inline double dot(const cplx& a, const cplx& b) { return (a * std::conj(b)).real(); }

/// harmonic mean 2ab / (a+b)
inline cplx harmonic_mean(const cplx& a, const cplx& b) { return 2.0 * a * b / (a + b); }

/// Discrete curvature κ_k = 2 tan(∠(S_{k-1}, S_k)/2), evaluated as
/// 2i (1 - S_k/S_{k-1}) / (1 + S_k/S_{k-1}) and projected to the real part.
inline RealSeq curvature(const PlaneCurve& c, double imag_guard = tol::curvature_imag) {
  const Seq S = c.edges();
  const IndexRange r = stencil_range(S, 1, 0);
  return build_over<double>(r, [&](int k) {
    const cplx sum = S(k - 1) + S(k);
    if (std::abs(sum) <= 1e-12 * (std::abs(S(k - 1)) + std::abs(S(k)))) throw CuspError(k);
    const cplx ratio = S(k) / S(k - 1);
    const cplx kap = 2.0 * cplx(0.0, 1.0) * (1.0 - ratio) / (1.0 + ratio);
    if (std::abs(kap.imag()) > imag_guard) {
      throw Error(detail::at_index("curvature has nonreal value (curve not arc length parametrized?)", k));
    }
    return kap.real();
  });
}

/// μ_k = ½(β_{k+1} κ_{k+1} - β_k κ_k) - i(β_{k+1} + β_k), as displayed.
inline Seq mu_from_beta(const RealSeq& kappa, const Seq& beta) {
  const IndexRange r = intersect(stencil_range(kappa, 0, 1), stencil_range(beta, 0, 1));
  return build_over<cplx>(r, [&](int k) {
    return 0.5 * (beta(k + 1) * kappa(k + 1) - beta(k) * kappa(k)) - cplx(0.0, 1.0) * (beta(k + 1) + beta(k));
  });
}

/// Tangential flow on arc-length plane curves,
/// ċ_k = 2 (S_{k-1} + S_k) / (1 + <S_{k-1}, S_k>); its curvature evolves by
/// κ̇_k = (1 + κ_k²/4)(κ_{k+1} - κ_{k-1}).
inline Seq tangential_flow(const PlaneCurve& c) {
  const Seq S = c.edges();
  return build_over<cplx>(stencil_range(S, 1, 0), [&](int k) {
    const double den = 1.0 + dot(S(k - 1), S(k));
    if (std::abs(den) <= 1e-12) throw CuspError(k);
    return 2.0 * (S(k - 1) + S(k)) / den;
  });
}

/// Discrete mKdV flow,
/// ċ_k = (1/32)((κ_k κ_{k-1} + κ_{k+1} κ_k) + 2i(κ_{k+1} - κ_{k-1}) + 1) M^h(S_{k-1}, S_k).
inline Seq mkdv_flow(const PlaneCurve& c) {
  const Seq S = c.edges();
  const RealSeq kap = curvature(c);
  const IndexRange r = stencil_range(kap, 1, 1);
  return build_over<cplx>(r, [&](int k) {
    const cplx coeff = (1.0 / 32.0) * (kap(k) * kap(k - 1) + kap(k + 1) * kap(k) +
                                       2.0 * cplx(0.0, 1.0) * (kap(k + 1) - kap(k - 1)) + 1.0);
    const cplx sum = S(k - 1) + S(k);
    if (std::abs(sum) <= 1e-12 * (std::abs(S(k - 1)) + std::abs(S(k)))) throw CuspError(k);
    return coeff * harmonic_mean(S(k - 1), S(k));
  });
}

/// κ̇ under the tangential flow
inline RealSeq tangential_kappa_rate(const RealSeq& kappa) {
  return build_over<double>(stencil_range(kappa, 1, 1), [&](int k) {
    return (1.0 + kappa(k) * kappa(k) / 4.0) * (kappa(k + 1) - kappa(k - 1));
  });
}

/// κ̇ under the mKdV flow above:
/// κ̇_k = (1 + κ_k²/4) [ -(7/64)(κ_{k+1} - κ_{k-1})
///        + (1/16)((κ_{k+1}²/4 + 1)(κ_{k+2} + κ_k) - (κ_{k-1}²/4 + 1)(κ_k + κ_{k-2})) ].
inline RealSeq mkdv_kappa_rate(const RealSeq& kappa) {
  return build_over<double>(stencil_range(kappa, 2, 2), [&](int k) {
    const double Dp = kappa(k + 1) * kappa(k + 1) / 4.0 + 1.0;
    const double Dm = kappa(k - 1) * kappa(k - 1) / 4.0 + 1.0;
    return (1.0 + kappa(k) * kappa(k) / 4.0) *
           (-(7.0 / 64.0) * (kappa(k + 1) - kappa(k - 1)) +
            (1.0 / 16.0) * (Dp * (kappa(k + 2) + kappa(k)) - Dm * (kappa(k) + kappa(k - 2))));
  });
}

/// Arc-length preservation condition for flows ċ = β M^h(S_{k-1}, S_k):
/// Re(β_{k+1} - β_k) = ½ Im(κ_{k+1} β_{k+1} + κ_k β_k). Returns the max residual.
inline double arc_preservation_residual(const RealSeq& kappa, const Seq& beta) {
  const IndexRange r = intersect(stencil_range(kappa, 0, 1), stencil_range(beta, 0, 1));
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) {
    const double lhs = (beta(k + 1) - beta(k)).real();
    const double rhs = 0.5 * (kappa(k + 1) * beta(k + 1) + kappa(k) * beta(k)).imag();
    m = std::max(m, std::abs(lhs - rhs));
  }
  return m;
}

/// Q_k = (1/16)(2i(κ_{k+1} - κ_k) + κ_k κ_{k+1} + 4); equals the homogeneous
/// cross-ratio of the lifted curve.
inline Seq q_from_kappa(const RealSeq& kappa) {
  return build_over<cplx>(stencil_range(kappa, 0, 1), [&](int k) {
    return (1.0 / 16.0) * (2.0 * cplx(0.0, 1.0) * (kappa(k + 1) - kappa(k)) + kappa(k) * kappa(k + 1) + 4.0);
  });
}

/// Rebuilds the canonical arc-length representative from curvature:
/// c_0 = 0, S_0 = 1, each edge rotated by the turning angle 2 atan(κ/2).
inline PlaneCurve curve_from_curvature(const RealSeq& kappa) {
  const int lo = kappa.first();
  const int n = kappa.size();
  std::vector<cplx> pts;
  pts.reserve(static_cast<size_t>(n) + 2);
  pts.push_back(0.0);
  cplx S = 1.0;
  pts.push_back(S);
  for (int k = lo; k < lo + n; ++k) {
    S *= std::exp(cplx(0.0, 2.0 * std::atan(kappa(k) / 2.0)));
    pts.push_back(pts.back() + S);
  }
  return PlaneCurve::open(std::move(pts));
}

struct Elastica {
  RealSeq kappa;  // vertex curvatures, indices 1 .. N
  PlaneCurve curve;
};

/// Generalized elastica curvature recursion
/// κ_{k+1} = 2a κ_k / (1 + κ_k²/4) - κ_{k-1} + b + c_k, c_{k+1} = -c_k.
inline Elastica elastica_generate(double kappa0, double kappa1, double a, double b, double c0, int n) {
  if (n < 2) throw Error("elastica_generate needs at least two curvature values");
  std::vector<double> kap(static_cast<size_t>(n));
  kap[0] = kappa0;
  if (n > 1) kap[1] = kappa1;
  for (int k = 1; k + 1 < n; ++k) {
    const double ck = c0 * (((k + 1) % 2 == 0) ? 1.0 : -1.0);  // c indexed by the middle vertex k+1
    const double prev = kap[static_cast<size_t>(k)];
    kap[static_cast<size_t>(k + 1)] = 2.0 * a * prev / (1.0 + prev * prev / 4.0) - kap[static_cast<size_t>(k - 1)] + b + ck;
    if (!std::isfinite(kap[static_cast<size_t>(k + 1)]) || std::abs(kap[static_cast<size_t>(k + 1)]) > tol::blow_up) {
      throw BlowUp(k + 1);
    }
  }
  Elastica out;
  out.kappa = RealSeq::ranged(1, std::move(kap));
  out.curve = curve_from_curvature(out.kappa);
  return out;
}

/// Residual of the mKdV-invariance constraint
/// (a - 11/32)(κ_{k+1} - κ_{k-1}) =
///   (1/64)((κ_{k+1}²/4 + 1)(κ_{k+2} + κ_k) - (κ_{k-1}²/4 + 1)(κ_k + κ_{k-2})).
/// For curvatures of the elastica recursion with constant A (b = c = 0) this
/// vanishes at a = (11 + A)/32.
inline double elastica_invariance_residual(const RealSeq& kappa, double a) {
  const IndexRange r = stencil_range(kappa, 2, 2);
  double m = 0.0;
  for (int k = r.lo; k < r.hi; ++k) {
    const double Dp = kappa(k + 1) * kappa(k + 1) / 4.0 + 1.0;
    const double Dm = kappa(k - 1) * kappa(k - 1) / 4.0 + 1.0;
    const double res = (a - 11.0 / 32.0) * (kappa(k + 1) - kappa(k - 1)) -
                       (1.0 / 64.0) * (Dp * (kappa(k + 2) + kappa(k)) - Dm * (kappa(k) + kappa(k - 2)));
    m = std::max(m, std::abs(res));
  }
  return m;
}

/// constraint constant matching the recursion constant of elastica_generate
inline double invariance_constant_for(double recursion_a) { return (11.0 + recursion_a) / 32.0; }

}  // namespace todacurves
