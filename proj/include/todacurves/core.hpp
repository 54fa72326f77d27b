#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace todacurves {

using cplx = std::complex<double>;

namespace tol {
// |det| below immersion * (scale of operands) is treated as zero.
inline constexpr double immersion = 1e-12;
// guard for operations that require conformal arc length (g == 1)
inline constexpr double arclength = 1e-8;
// | |S_k| - 1 | bound for plane arc-length parametrization
inline constexpr double unit_edge = 1e-10;
// wedge residual below which a stepped curve counts as periodic
inline constexpr double periodic_closure = 1e-8;
// relative eigenvalue gap below which a monodromy counts as defective
inline constexpr double eigen_gap = 1e-10;
// curvature values are real up to this after complex evaluation
inline constexpr double curvature_imag = 1e-6;
// overflow guard for curvature recursions
inline constexpr double blow_up = 1e8;
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string at_index(const std::string& what, int k) {
  return what + " at index " + std::to_string(k);
}
}  // namespace detail

struct NotImmersed : Error {
  int index;
  explicit NotImmersed(int k) : Error(detail::at_index("curve not immersed (vanishing determinant)", k)), index(k) {}
};
struct DegenerateCrossRatio : Error {
  DegenerateCrossRatio() : Error("degenerate cross-ratio (coincident projective points)") {}
};
struct InconsistentSeed : Error {
  InconsistentSeed() : Error("seed points do not match the prescribed edge determinant") {}
};
struct ZeroDeterminant : Error {
  int index;
  explicit ZeroDeterminant(int k) : Error(detail::at_index("vanishing edge determinant g", k)), index(k) {}
};
struct HitsInfinity : Error {
  int index;
  explicit HitsInfinity(int k) : Error(detail::at_index("curve hits infinity (y = 0)", k)), index(k) {}
};
struct NotArcLength : Error {
  double residual;
  explicit NotArcLength(double r)
      : Error("curve is not conformal arc length parametrized, max |g - 1| = " + std::to_string(r)), residual(r) {}
};
struct NotUnitEdge : Error {
  double residual;
  explicit NotUnitEdge(double r)
      : Error("plane curve is not arc length parametrized, max ||S| - 1| = " + std::to_string(r)), residual(r) {}
};
struct NonTelescoping : Error {
  double residual;
  explicit NonTelescoping(double r)
      : Error("periodic sum of Qdot/Q does not vanish, |sum| = " + std::to_string(r)), residual(r) {}
};
struct ZeroLambda : Error {
  ZeroLambda() : Error("spectral parameter lambda must be nonzero") {}
};
struct CuspError : Error {
  int index;
  explicit CuspError(int k) : Error(detail::at_index("cusp (S_{k-1} + S_k = 0)", k)), index(k) {}
};
struct BlowUp : Error {
  int index;
  explicit BlowUp(int k) : Error(detail::at_index("curvature recursion blow-up", k)), index(k) {}
};
struct Degenerate : Error {
  int index;
  explicit Degenerate(int k) : Error(detail::at_index("degenerate Baecklund step", k)), index(k) {}
};
struct IdentityMonodromy : Error {
  IdentityMonodromy() : Error("monodromy acts as the identity or collapses; fixed points undetermined") {}
};
struct ConstraintViolated : Error {
  int index;
  double residual;
  ConstraintViolated(int k, double r)
      : Error(detail::at_index("V-matrix constraint v12_k = -v21_{k+1} g_k / g_{k-1} violated", k) +
              ", residual " + std::to_string(r)),
        index(k), residual(r) {}
};
struct FlowSingularity : Error {
  int index;
  double time;
  FlowSingularity(int k, double t)
      : Error(detail::at_index("flow singularity (immersion lost)", k) + " at t = " + std::to_string(t)),
        index(k), time(t) {}
};
struct ZeroG : Error {
  int index;
  explicit ZeroG(int k) : Error(detail::at_index("vanishing g", k)), index(k) {}
};
struct DegenerateTriple : Error {
  int index;
  explicit DegenerateTriple(int k) : Error(detail::at_index("degenerate triple (c_{k+1} = c_{k-1})", k)), index(k) {}
};
struct ParseError : Error {
  using Error::Error;
};

/// Sequence indexed by lattice sites: either periodic (defined on all of Z,
/// wrapping with its period) or ranged (defined on [first, first + size)).
template <typename T>
class BasicSeq {
 public:
  BasicSeq() = default;

  static BasicSeq periodic(std::vector<T> v) {
    BasicSeq s;
    s.v_ = std::move(v);
    s.periodic_ = true;
    return s;
  }
  static BasicSeq ranged(int first, std::vector<T> v) {
    BasicSeq s;
    s.v_ = std::move(v);
    s.first_ = first;
    return s;
  }
  static BasicSeq constant(const T& value, int n, bool periodic = true) {
    return periodic ? BasicSeq::periodic(std::vector<T>(n, value))
                    : BasicSeq::ranged(0, std::vector<T>(n, value));
  }

  const T& operator()(int k) const {
    if (periodic_) {
      const int n = static_cast<int>(v_.size());
      return v_[static_cast<size_t>(((k % n) + n) % n)];
    }
    return v_.at(static_cast<size_t>(k - first_));
  }

  bool is_periodic() const { return periodic_; }
  int first() const { return first_; }
  int size() const { return static_cast<int>(v_.size()); }
  /// one past the last stored index
  int end() const { return first_ + size(); }
  bool defined(int k) const { return periodic_ || (k >= first_ && k < end()); }
  bool empty() const { return v_.empty(); }

  const std::vector<T>& values() const { return v_; }
  std::vector<T>& values() { return v_; }

 private:
  std::vector<T> v_;
  int first_ = 0;
  bool periodic_ = false;
};

using Seq = BasicSeq<cplx>;
using RealSeq = BasicSeq<double>;

/// Valid index window for derived quantities: the base range shrunk by the
/// stencil margins (no shrink for periodic sequences).
struct IndexRange {
  int lo = 0;
  int hi = 0;  // one past last
  bool periodic = false;
  int count() const { return hi - lo; }
};

template <typename T>
IndexRange stencil_range(const BasicSeq<T>& s, int need_below, int need_above) {
  if (s.is_periodic()) return {0, s.size(), true};
  return {s.first() + need_below, s.end() - need_above, false};
}

inline IndexRange intersect(const IndexRange& a, const IndexRange& b) {
  if (a.periodic && b.periodic) return a;  // callers keep periods aligned
  if (a.periodic) return b;
  if (b.periodic) return a;
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi), false};
}

/// Builds a sequence over `r` by evaluating f(k) at each index.
template <typename T, typename F>
BasicSeq<T> build_over(const IndexRange& r, F&& f) {
  std::vector<T> out;
  out.reserve(static_cast<size_t>(std::max(0, r.count())));
  for (int k = r.lo; k < r.hi; ++k) out.push_back(f(k));
  return r.periodic ? BasicSeq<T>::periodic(std::move(out)) : BasicSeq<T>::ranged(r.lo, std::move(out));
}

template <typename T>
double max_abs(const BasicSeq<T>& s) {
  double m = 0.0;
  for (const auto& v : s.values()) m = std::max(m, std::abs(v));
  return m;
}

inline bool near_zero(const cplx& value, double scale) {
  return std::abs(value) <= tol::immersion * std::max(scale, 1e-300);
}

}  // namespace todacurves
