#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"

namespace todacurves {

/// Per-index coefficients (α_k, β_k) selecting a flow
/// γ̇_k = α_k γ_k + (β_k / u_k)(γ_{k+1} - γ_{k-1}).
struct FlowCoefficients {
  Seq alpha;
  Seq beta;

  /// normalized variable β̂_k = β_k (g_{k+1} + g_{k-1})
  Seq beta_hat(const Seq& g) const {
    const IndexRange r = intersect(stencil_range(beta, 0, 0), stencil_range(g, 1, 1));
    return build_over<cplx>(r, [&](int k) { return beta(k) * (g(k + 1) + g(k - 1)); });
  }
};

/// Re-evaluated from the current curve at every integrator stage.
using CoeffGen = std::function<FlowCoefficients(const CurveC2&)>;

using VelocityField = BasicSeq<C2Point>;

/// γ̇_k = α_k γ_k + (β_k / u_k)(γ_{k+1} - γ_{k-1})
inline VelocityField velocity(const CurveC2& c, const FlowCoefficients& f) {
  const Seq u = second_determinants(c);
  IndexRange r = intersect(stencil_range(u, 0, 0), c.is_periodic() ? c.point_range() : IndexRange{1, c.size() - 1, false});
  r = intersect(r, intersect(stencil_range(f.alpha, 0, 0), stencil_range(f.beta, 0, 0)));
  return build_over<C2Point>(r, [&](int k) {
    C2Point v = f.alpha(k) * c.at(k);
    v += (f.beta(k) / u(k)) * (c.at(k + 1) - c.at(k - 1));
    return v;
  });
}

struct InvariantRates {
  Seq g_rate;
  Seq u_rate;
  Seq q_rate;
};

/// Induced evolution of g, u and Q under the general flow.
inline InvariantRates induced_rates(const CurveC2& c, const FlowCoefficients& f) {
  const InvariantData inv = extract_invariants(c);
  const Seq& g = inv.g;
  const Seq& u = inv.u;
  const Seq& Q = inv.Q;
  const Seq& a = f.alpha;
  const Seq& b = f.beta;

  InvariantRates out;
  {
    IndexRange r = intersect(stencil_range(g, 0, 0), intersect(stencil_range(a, 0, 1), stencil_range(b, 0, 1)));
    out.g_rate = build_over<cplx>(r, [&](int k) { return g(k) * (a(k + 1) + a(k)) + b(k + 1) - b(k); });
  }
  {
    IndexRange r = intersect(stencil_range(u, 1, 1), stencil_range(g, 2, 1));
    r = intersect(r, intersect(stencil_range(a, 1, 1), stencil_range(b, 1, 1)));
    out.u_rate = build_over<cplx>(r, [&](int k) {
      return u(k) * (a(k - 1) + a(k + 1)) + b(k - 1) * (g(k) / (u(k - 1) * g(k - 1))) * (g(k - 2) + g(k - 1)) -
             b(k + 1) * (g(k - 1) / (u(k + 1) * g(k))) * (g(k) + g(k + 1)) +
             u(k) * (b(k + 1) / g(k) - b(k - 1) / g(k - 1));
    });
  }
  {
    IndexRange r = intersect(stencil_range(Q, 1, 1), stencil_range(g, 2, 2));
    r = intersect(r, stencil_range(b, 1, 2));
    out.q_rate = build_over<cplx>(r, [&](int k) {
      const cplx term = (Q(k) - 1.0) * (b(k + 1) * (1.0 / g(k + 1) + 1.0 / g(k)) - b(k) * (1.0 / g(k) + 1.0 / g(k - 1))) +
                        Q(k + 1) * b(k + 2) * (1.0 / g(k + 2) + 1.0 / g(k + 1)) -
                        Q(k - 1) * b(k - 1) * (1.0 / g(k - 1) + 1.0 / g(k - 2));
      return Q(k) * term;
    });
  }
  return out;
}

/// Flow of the non-lifted curve:
/// ċ_k = β_k (g_k + g_{k-1}) / (2 g_k g_{k-1}) · 2 (c_{k+1} - c_k)(c_k - c_{k-1}) / (c_{k+1} - c_{k-1}).
/// α does not enter.
inline Seq plane_rate(const PlaneCurve& c, const Seq& beta, const Seq& g) {
  IndexRange r = c.is_periodic() ? IndexRange{0, c.size(), true} : IndexRange{1, c.size() - 1, false};
  r = intersect(r, intersect(stencil_range(beta, 0, 0), stencil_range(g, 1, 0)));
  return build_over<cplx>(r, [&](int k) {
    const cplx dk = c.at(k + 1) - c.at(k - 1);
    const double scale = std::abs(c.at(k + 1)) + std::abs(c.at(k - 1)) + 1.0;
    if (std::abs(dk) <= tol::immersion * scale) throw DegenerateTriple(k);
    return beta(k) * (g(k) + g(k - 1)) / (2.0 * g(k) * g(k - 1)) * 2.0 * (c.at(k + 1) - c.at(k)) *
           (c.at(k) - c.at(k - 1)) / dk;
  });
}

struct Trajectory {
  std::vector<double> times;
  std::vector<CurveC2> states;
  double dt = 0.0;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  const CurveC2& at(int i) const { return states.at(static_cast<size_t>(i)); }
};

struct PlaneTrajectory {
  std::vector<double> times;
  std::vector<PlaneCurve> states;
  double dt = 0.0;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  const PlaneCurve& at(int i) const { return states.at(static_cast<size_t>(i)); }
};

namespace detail {

inline CurveC2 axpy(const CurveC2& base, double h, const VelocityField& v) {
  CurveC2 out = base;
  for (int k = 0; k < out.size(); ++k) {
    if (v.defined(k)) out.points()[static_cast<size_t>(k)] += h * C2Point{v(k).x, v(k).y};
  }
  return out;
}

inline PlaneCurve axpy(const PlaneCurve& base, double h, const Seq& v) {
  PlaneCurve out = base;
  for (int k = 0; k < out.size(); ++k) {
    if (v.defined(k)) out.points()[static_cast<size_t>(k)] += h * v(k);
  }
  return out;
}

template <typename State, typename Rate, typename RateFn>
State rk4_step(const State& y, double dt, const RateFn& rate) {
  const Rate k1 = rate(y);
  const Rate k2 = rate(axpy(y, dt / 2, k1));
  const Rate k3 = rate(axpy(y, dt / 2, k2));
  const Rate k4 = rate(axpy(y, dt, k3));
  State out = axpy(y, dt / 6, k1);
  out = axpy(out, dt / 3, k2);
  out = axpy(out, dt / 3, k3);
  out = axpy(out, dt / 6, k4);
  return out;
}

}  // namespace detail

/// Classical fixed-step RK4; the coefficient generator is re-evaluated at
/// every internal stage. Stores all intermediate states.
inline Trajectory integrate(const CurveC2& initial, const CoeffGen& gen, double dt, int steps) {
  if (!(dt > 0) || steps < 1) throw Error("integrate requires dt > 0 and steps >= 1");
  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(static_cast<size_t>(steps) + 1);
  traj.states.reserve(static_cast<size_t>(steps) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  auto rate = [&gen](const CurveC2& y) { return velocity(y, gen(y)); };
  for (int i = 0; i < steps; ++i) {
    try {
      traj.states.push_back(detail::rk4_step<CurveC2, VelocityField>(traj.states.back(), dt, rate));
    } catch (const NotImmersed& e) {
      throw FlowSingularity(e.index, (i + 1) * dt);
    }
    traj.times.push_back((i + 1) * dt);
  }
  return traj;
}

using PlaneRateFn = std::function<Seq(const PlaneCurve&)>;

inline PlaneTrajectory integrate_plane(const PlaneCurve& initial, const PlaneRateFn& rate_fn, double dt, int steps) {
  if (!(dt > 0) || steps < 1) throw Error("integrate requires dt > 0 and steps >= 1");
  PlaneTrajectory traj;
  traj.dt = dt;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  for (int i = 0; i < steps; ++i) {
    try {
      traj.states.push_back(detail::rk4_step<PlaneCurve, Seq>(traj.states.back(), dt, rate_fn));
    } catch (const CuspError& e) {
      throw FlowSingularity(e.index, (i + 1) * dt);
    }
    traj.times.push_back((i + 1) * dt);
  }
  return traj;
}

}  // namespace todacurves
