#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "todacurves/core.hpp"
#include "todacurves/curve.hpp"
#include "todacurves/matrix2.hpp"

namespace todacurves {

/// Uniform double in [0, 1) from the raw 64-bit stream; avoids the
/// distribution objects, whose output is not pinned by the standard.
inline double next_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double centered(std::mt19937_64& rng) { return next_double(rng) - 0.5; }

namespace detail {

/// Damped Newton for F: C^3 -> C^3 with a finite-difference Jacobian.
inline bool newton3(const std::function<std::array<cplx, 3>(const std::array<cplx, 3>&)>& f,
                    std::array<cplx, 3>& x, double eps = 1e-13, int iters = 60) {
  const double h = 1e-7;
  for (int it = 0; it < iters; ++it) {
    const std::array<cplx, 3> F = f(x);
    double norm = 0.0;
    for (const auto& v : F) norm = std::max(norm, std::abs(v));
    if (norm < eps) return true;

    cplx J[3][3];
    for (int j = 0; j < 3; ++j) {
      std::array<cplx, 3> xp = x;
      xp[static_cast<size_t>(j)] += h;
      const std::array<cplx, 3> Fp = f(xp);
      for (int i = 0; i < 3; ++i) J[i][j] = (Fp[static_cast<size_t>(i)] - F[static_cast<size_t>(i)]) / h;
    }
    // 3x3 complex solve, partial pivoting
    cplx A[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] = J[i][j];
      A[i][3] = -F[static_cast<size_t>(i)];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row) {
        if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
      }
      if (std::abs(A[piv][col]) < 1e-14) return false;
      if (piv != col) {
        for (int j = 0; j < 4; ++j) std::swap(A[piv][j], A[col][j]);
      }
      for (int row = col + 1; row < 3; ++row) {
        const cplx fac = A[row][col] / A[col][col];
        for (int j = col; j < 4; ++j) A[row][j] -= fac * A[col][j];
      }
    }
    cplx dx[3];
    for (int i = 2; i >= 0; --i) {
      cplx s = A[i][3];
      for (int j = i + 1; j < 3; ++j) s -= A[i][j] * dx[j];
      dx[i] = s / A[i][i];
    }
    for (int i = 0; i < 3; ++i) x[static_cast<size_t>(i)] += dx[i];
  }
  return false;
}

inline std::array<cplx, 3> monodromy_residual(const Matrix2& m) { return {m.a - 1.0, m.b, m.c}; }

}  // namespace detail

/// Conformal arc-length lift of the "regular" N-gon: g ≡ 1, u ≡ 2 cos(2π/N).
inline CurveC2 regular_polygon_lift(int n) {
  const Seq g = Seq::constant(1.0, n, true);
  const Seq u = Seq::constant(2.0 * std::cos(2.0 * M_PI / n), n, true);
  return reconstruct_periodic(g, u, {1.0, 0.0}, {0.0, 1.0});
}

/// Random periodic conformal arc-length curve near the regular polygon:
/// u_k perturbed, then u_0..u_2 moved onto the closure condition
/// (monodromy = Id) by Newton.
inline CurveC2 closed_arclength_curve(int n, uint64_t seed, double amp = 0.2) {
  std::mt19937_64 rng(seed);
  const cplx base = 2.0 * std::cos(2.0 * M_PI / n);
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<cplx> u(static_cast<size_t>(n));
    for (auto& v : u) v = base + cplx(amp * centered(rng), 0.5 * amp * centered(rng));
    auto residual = [&](const std::array<cplx, 3>& x) {
      std::vector<cplx> uu = u;
      for (int i = 0; i < 3; ++i) uu[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
      Matrix2 m = Matrix2::identity();
      for (int k = 0; k < n; ++k) m = Matrix2{uu[static_cast<size_t>(k)], -1.0, 1.0, 0.0} * m;
      return detail::monodromy_residual(m);
    };
    std::array<cplx, 3> x{u[0], u[1], u[2]};
    if (!detail::newton3(residual, x)) continue;
    for (int i = 0; i < 3; ++i) u[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    try {
      return reconstruct_periodic(Seq::constant(1.0, n, true), Seq::periodic(u), {1.0, 0.0}, {0.0, 1.0});
    } catch (const Error&) {
      continue;
    }
  }
  throw Error("closed_arclength_curve: Newton closure failed");
}

/// Random periodic curve with prescribed random (g, p) near (1, 0); u_0..u_2
/// adjusted for closure. λ enters through u = (p + λ) g_k g_{k-1}.
inline CurveC2 closed_toda_curve(int n, uint64_t seed, const cplx& lambda, double g_amp = 0.2, double p_amp = 0.4) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<cplx> g(static_cast<size_t>(n)), u(static_cast<size_t>(n));
    for (auto& v : g) v = 1.0 + cplx(g_amp * centered(rng), 0.5 * g_amp * centered(rng));
    for (int k = 0; k < n; ++k) {
      const cplx p = cplx(p_amp * centered(rng), 0.5 * p_amp * centered(rng));
      u[static_cast<size_t>(k)] = (p + lambda) * g[static_cast<size_t>(k)] * g[static_cast<size_t>((k + n - 1) % n)];
    }
    auto residual = [&](const std::array<cplx, 3>& x) {
      std::vector<cplx> uu = u;
      for (int i = 0; i < 3; ++i) uu[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
      Matrix2 m = Matrix2::identity();
      for (int k = 0; k < n; ++k) {
        const cplx gm = g[static_cast<size_t>((k + n - 1) % n)];
        m = Matrix2{uu[static_cast<size_t>(k)] / gm, -g[static_cast<size_t>(k)] / gm, 1.0, 0.0} * m;
      }
      return detail::monodromy_residual(m);
    };
    std::array<cplx, 3> x{u[0], u[1], u[2]};
    if (!detail::newton3(residual, x)) continue;
    for (int i = 0; i < 3; ++i) u[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    try {
      return reconstruct_periodic(Seq::periodic(g), Seq::periodic(u), {1.0, 0.0}, {0.0, g[0]});
    } catch (const Error&) {
      continue;
    }
  }
  throw Error("closed_toda_curve: Newton closure failed");
}

/// Periodic curve with p ≡ 0 exactly (u_k = λ g_k g_{k-1}); g_0..g_2 adjusted
/// for closure.
inline CurveC2 closed_p0_curve(int n, uint64_t seed, const cplx& lambda = 1.0, double g_amp = 0.25) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<cplx> g(static_cast<size_t>(n));
    for (auto& v : g) v = 1.0 + cplx(g_amp * centered(rng), 0.4 * g_amp * centered(rng));
    auto curve_of = [&](const std::array<cplx, 3>& x) {
      std::vector<cplx> gg = g;
      for (int i = 0; i < 3; ++i) gg[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
      return gg;
    };
    auto residual = [&](const std::array<cplx, 3>& x) {
      const std::vector<cplx> gg = curve_of(x);
      Matrix2 m = Matrix2::identity();
      for (int k = 0; k < n; ++k) {
        const cplx gk = gg[static_cast<size_t>(k)];
        const cplx gm = gg[static_cast<size_t>((k + n - 1) % n)];
        m = Matrix2{lambda * gk, -gk / gm, 1.0, 0.0} * m;  // u_k/g_{k-1} = λ g_k
      }
      return detail::monodromy_residual(m);
    };
    std::array<cplx, 3> x{g[0], g[1], g[2]};
    if (!detail::newton3(residual, x)) continue;
    const std::vector<cplx> gg = curve_of(x);
    std::vector<cplx> u(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      u[static_cast<size_t>(k)] = lambda * gg[static_cast<size_t>(k)] * gg[static_cast<size_t>((k + n - 1) % n)];
    }
    try {
      return reconstruct_periodic(Seq::periodic(gg), Seq::periodic(u), {1.0, 0.0}, {0.0, gg[0]});
    } catch (const Error&) {
      continue;
    }
  }
  throw Error("closed_p0_curve: Newton closure failed");
}

/// Regular N-gon in the plane with unit edges.
inline PlaneCurve regular_polygon_plane(int n) {
  std::vector<cplx> pts(static_cast<size_t>(n));
  cplx c = 0.0;
  for (int k = 0; k < n; ++k) {
    pts[static_cast<size_t>(k)] = c;
    c += std::exp(cplx(0.0, 2.0 * M_PI * k / n));
  }
  return PlaneCurve::periodic(std::move(pts));
}

/// Random closed unit-edge polygon: edge angles perturbed from the regular
/// polygon, then projected back onto Σ exp(iθ) = 0 by Gauss-Newton.
inline PlaneCurve closed_plane_polygon(int n, uint64_t seed, double amp = 0.4) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::vector<double> th(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) th[static_cast<size_t>(k)] = 2.0 * M_PI * k / n + amp * centered(rng);
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      double fr = 0.0, fi = 0.0;
      for (double t : th) {
        fr += std::cos(t);
        fi += std::sin(t);
      }
      if (std::hypot(fr, fi) < 1e-14) {
        ok = true;
        break;
      }
      // minimal-norm Gauss-Newton step: dθ = -Jᵀ (J Jᵀ)⁻¹ F
      double a = 0.0, b = 0.0, c2 = 0.0;
      for (double t : th) {
        a += std::sin(t) * std::sin(t);
        b += -std::sin(t) * std::cos(t);
        c2 += std::cos(t) * std::cos(t);
      }
      const double det = a * c2 - b * b;
      if (std::abs(det) < 1e-12) break;
      const double y0 = (c2 * fr - b * fi) / det;
      const double y1 = (-b * fr + a * fi) / det;
      for (auto& t : th) t -= -std::sin(t) * y0 + std::cos(t) * y1;
    }
    if (!ok) continue;
    std::vector<cplx> pts(static_cast<size_t>(n));
    cplx c = 0.0;
    for (int k = 0; k < n; ++k) {
      pts[static_cast<size_t>(k)] = c;
      c += std::exp(cplx(0.0, th[static_cast<size_t>(k)]));
    }
    return PlaneCurve::periodic(std::move(pts));
  }
  throw Error("closed_plane_polygon: closure projection failed");
}

// canonical fixture instances (seeds pinned; JSON copies live in fixtures/)
namespace fixtures {
inline constexpr uint64_t kRandom8Seed = 0x5eed0008;
inline constexpr uint64_t kPlane12Seed = 0x5eed0012;
inline constexpr uint64_t kToda6Seed = 0x5eed0006;
inline constexpr uint64_t kP0Seed = 0x5eed0600;

inline CurveC2 octagon_lift() { return regular_polygon_lift(8); }
inline CurveC2 random8() { return closed_arclength_curve(8, kRandom8Seed, 0.2); }
inline PlaneCurve octagon_plane() { return regular_polygon_plane(8); }
inline PlaneCurve plane12() { return closed_plane_polygon(12, kPlane12Seed, 0.4); }
inline CurveC2 toda6(const cplx& lambda = 0.0) { return closed_toda_curve(6, kToda6Seed, lambda); }
inline CurveC2 p0_curve6() { return closed_p0_curve(6, kP0Seed, 1.0); }

struct ElasticaParams {
  double kappa0 = 0.8, kappa1 = 1.3, a = 1.25, b = 0.0, c0 = 0.0;
  int n = 40;
};
inline ElasticaParams elastica_params() { return {}; }
}  // namespace fixtures

}  // namespace todacurves
