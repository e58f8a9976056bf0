#pragma once

// Closed-form Riemannian operators for the three constant-curvature space
// forms, kept as free functions over Eigen expressions so callers can pass
// blocks, segments, and maps without materializing temporaries.
//
// Conventions used throughout:
//   Euclidean  E^d : all of R^d, curvature 0.
//   Spherical  S^d : {x in R^{d+1} : <x,x> = 1/C}, curvature C > 0.
//   Hyperbolic H^d : {x in R^{d+1} : [x,x] = 1/C, x_0 > 0}, curvature C < 0,
//                    where [u,v] = -u_0 v_0 + sum_{i>=1} u_i v_i.
// Tangent spaces at p are the orthogonal complement of p under the block's
// own bilinear form. Tangent norms equal geodesic lengths, so
// |log_p(x)| = d(p,x) and d(p, exp_p(v)) = |v| inside the injectivity
// radius.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "spaceform/errors.hpp"
#include "spaceform/types.hpp"

namespace spaceform {

namespace tol {
// Relative slack for on-manifold membership checks.
inline constexpr double point = 1e-8;
// Componentwise exp/log roundtrip accuracy the geometry layer guarantees.
inline constexpr double roundtrip = 1e-9;
// Relative slack for weight norm-constraint checks.
inline constexpr double weights = 1e-6;
// Slack beyond [-1,1] (or beyond 1 for acosh) tolerated before erroring.
inline constexpr double clamp_slack = 1e-9;
// Below this angle the log-map coefficient switches to its series.
inline constexpr double series_theta = 1e-6;
// Inner products closer to -1 than this make the spherical log singular.
inline constexpr double antipodal = 1e-9;
}  // namespace tol

enum class Kind { euclidean, spherical, hyperbolic };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::euclidean: return "euclidean";
    case Kind::spherical: return "spherical";
    case Kind::hyperbolic: return "hyperbolic";
  }
  return "?";
}

// One constant-curvature factor. dim is intrinsic; spherical and hyperbolic
// blocks live in an ambient space of dim+1 coordinates.
struct SpaceForm {
  Kind kind = Kind::euclidean;
  int dim = 0;
  double curvature = 0.0;

  int ambient() const { return kind == Kind::euclidean ? dim : dim + 1; }

  void validate() const {
    if (kind == Kind::euclidean) {
      if (dim < 1) throw ParameterError("euclidean block needs dim >= 1");
      if (curvature != 0.0)
        throw ParameterError("euclidean block must have zero curvature");
      return;
    }
    if (dim < 2)
      throw ParameterError(std::string(kind_name(kind)) +
                           " block needs dim >= 2");
    if (kind == Kind::spherical && !(curvature > 0.0))
      throw ParameterError("spherical block needs positive curvature");
    if (kind == Kind::hyperbolic && !(curvature < 0.0))
      throw ParameterError("hyperbolic block needs negative curvature");
  }

  static SpaceForm euclidean(int d) { return checked({Kind::euclidean, d, 0.0}); }
  static SpaceForm sphere(int d, double c = 1.0) {
    return checked({Kind::spherical, d, c});
  }
  static SpaceForm hyperbolic(int d, double c = -1.0) {
    return checked({Kind::hyperbolic, d, c});
  }

 private:
  static SpaceForm checked(SpaceForm f) {
    f.validate();
    return f;
  }
};

inline bool operator==(const SpaceForm& a, const SpaceForm& b) {
  return a.kind == b.kind && a.dim == b.dim && a.curvature == b.curvature;
}

// Minkowski bilinear form [u,v] = u^T diag(-1, I) v.
template <typename A, typename B>
typename A::Scalar lorentz_product(const Eigen::MatrixBase<A>& u,
                                   const Eigen::MatrixBase<B>& v) {
  if (u.size() != v.size() || u.size() < 2)
    throw DimensionError("lorentz_product: need equal sizes >= 2");
  return u.tail(u.size() - 1).dot(v.tail(v.size() - 1)) - u(0) * v(0);
}

// Clamps a into [-1,1]; values further than `slack` outside are a caller bug.
template <typename S>
S clamp_unit(S a, S slack = S(tol::clamp_slack)) {
  if (a > S(1)) {
    if (a > S(1) + slack)
      throw DomainError("argument exceeds 1 beyond clamp slack");
    return S(1);
  }
  if (a < S(-1)) {
    if (a < S(-1) - slack)
      throw DomainError("argument below -1 beyond clamp slack");
    return S(-1);
  }
  return a;
}

// Clamps a to [1, inf) for acosh.
template <typename S>
S clamp_cosh_arg(S a, S slack = S(tol::clamp_slack)) {
  if (a < S(1)) {
    if (a < S(1) - slack)
      throw DomainError("acosh argument below 1 beyond clamp slack");
    return S(1);
  }
  return a;
}

namespace detail {

// theta / sin(theta) and theta / sinh(theta) with series fallbacks below
// tol::series_theta; the forward factors get the mirrored series.
template <typename S>
S inv_sinc(S t) {
  if (t < S(tol::series_theta)) return S(1) + t * t / S(6);
  return t / std::sin(t);
}

template <typename S>
S inv_sinhc(S t) {
  if (t < S(tol::series_theta)) return S(1) - t * t / S(6);
  return t / std::sinh(t);
}

template <typename S>
S sinc(S t) {
  if (t < S(tol::series_theta)) return S(1) - t * t / S(6);
  return std::sin(t) / t;
}

template <typename S>
S sinhc(S t) {
  if (t < S(tol::series_theta)) return S(1) + t * t / S(6);
  return std::sinh(t) / t;
}

}  // namespace detail

// Signed residual of the defining quadric; zero on the manifold.
template <typename D>
typename D::Scalar manifold_residual(const SpaceForm& f,
                                     const Eigen::MatrixBase<D>& x) {
  using S = typename D::Scalar;
  switch (f.kind) {
    case Kind::euclidean: return S(0);
    case Kind::spherical: return S(f.curvature) * x.dot(x) - S(1);
    case Kind::hyperbolic:
      return S(f.curvature) * lorentz_product(x, x) - S(1);
  }
  return S(0);
}

template <typename D>
bool is_on_manifold(const SpaceForm& f, const Eigen::MatrixBase<D>& x,
                    double tau = tol::point) {
  if (x.size() != f.ambient()) return false;
  if (f.kind == Kind::euclidean) return true;
  if (std::abs(static_cast<double>(manifold_residual(f, x))) > tau)
    return false;
  if (f.kind == Kind::hyperbolic && !(x(0) > 0)) return false;
  return true;
}

template <typename D>
void check_point(const SpaceForm& f, const Eigen::MatrixBase<D>& x,
                 const char* who = "point") {
  if (x.size() != f.ambient())
    throw DimensionError(std::string(who) + ": expected " +
                         std::to_string(f.ambient()) + " coordinates, got " +
                         std::to_string(static_cast<long>(x.size())));
  if (!is_on_manifold(f, x))
    throw DomainError(std::string(who) + ": not on the " +
                      kind_name(f.kind) + " manifold (residual " +
                      std::to_string(
                          static_cast<double>(manifold_residual(f, x))) +
                      ")");
}

// Tangency of v at p under the block's bilinear form, relative slack.
template <typename DP, typename DV>
void check_tangent(const SpaceForm& f, const Eigen::MatrixBase<DP>& p,
                   const Eigen::MatrixBase<DV>& v) {
  if (v.size() != f.ambient())
    throw DimensionError("tangent: wrong ambient size");
  if (f.kind == Kind::euclidean) return;
  const double scale =
      std::max(1.0, static_cast<double>(p.norm() * v.norm()));
  const double ip =
      f.kind == Kind::spherical
          ? static_cast<double>(p.dot(v))
          : static_cast<double>(lorentz_product(p, v));
  if (std::abs(ip) > tol::point * scale)
    throw DomainError("tangent: vector not orthogonal to base point");
}

// Geodesic distance. Arguments are clamped within tol::clamp_slack; beyond
// that the inputs were not on the manifold and a DomainError is raised.
template <typename DX, typename DY>
typename DX::Scalar distance(const SpaceForm& f,
                             const Eigen::MatrixBase<DX>& x,
                             const Eigen::MatrixBase<DY>& y) {
  using S = typename DX::Scalar;
  if (x.size() != y.size() || x.size() != f.ambient())
    throw DimensionError("distance: size mismatch");
  const S c = S(f.curvature);
  switch (f.kind) {
    case Kind::euclidean: return (x - y).norm();
    case Kind::spherical:
      return std::acos(clamp_unit(c * x.dot(y))) / std::sqrt(c);
    case Kind::hyperbolic:
      return std::acosh(clamp_cosh_arg(c * lorentz_product(x, y))) /
             std::sqrt(-c);
  }
  return S(0);
}

// exp_p(v); rewritten so the v coefficient is the bounded cardinal-sine
// factor, which removes the 0/0 at v = 0.
template <typename DP, typename DV>
VectorX<typename DP::Scalar> exp_map(const SpaceForm& f,
                                     const Eigen::MatrixBase<DP>& p,
                                     const Eigen::MatrixBase<DV>& v) {
  using S = typename DP::Scalar;
  check_point(f, p, "exp_map base");
  check_tangent(f, p, v);
  switch (f.kind) {
    case Kind::euclidean: return p + v;
    case Kind::spherical: {
      const S theta = std::sqrt(S(f.curvature)) * v.norm();
      return std::cos(theta) * p + detail::sinc(theta) * v;
    }
    case Kind::hyperbolic: {
      // Tangents at hyperboloid points are space-like; tiny negative
      // self-products are rounding noise.
      const S vv = std::max(S(0), lorentz_product(v, v));
      const S theta = std::sqrt(S(-f.curvature)) * std::sqrt(vv);
      return std::cosh(theta) * p + detail::sinhc(theta) * v;
    }
  }
  return p;
}

// log_p(x); inverse of exp_map away from the cut locus. Spherical pairs
// within tol::antipodal of antipodal have no principal logarithm.
template <typename DP, typename DX>
VectorX<typename DP::Scalar> log_map(const SpaceForm& f,
                                     const Eigen::MatrixBase<DP>& p,
                                     const Eigen::MatrixBase<DX>& x) {
  using S = typename DP::Scalar;
  check_point(f, p, "log_map base");
  check_point(f, x, "log_map target");
  switch (f.kind) {
    case Kind::euclidean: return x - p;
    case Kind::spherical: {
      const S a = clamp_unit(S(f.curvature) * p.dot(x));
      if (a <= S(-1) + S(tol::antipodal))
        throw SingularityError("log_map: antipodal points");
      const S theta = std::acos(a);
      return detail::inv_sinc(theta) * (x - a * p);
    }
    case Kind::hyperbolic: {
      const S a = clamp_cosh_arg(S(f.curvature) * lorentz_product(p, x));
      const S theta = std::acosh(a);
      return detail::inv_sinhc(theta) * (x - a * p);
    }
  }
  return x - p;
}

// Riemannian inner product of tangent vectors (base point immaterial for
// the constant-curvature models in ambient coordinates).
template <typename DU, typename DV>
typename DU::Scalar metric(const SpaceForm& f, const Eigen::MatrixBase<DU>& u,
                           const Eigen::MatrixBase<DV>& v) {
  if (u.size() != v.size() || u.size() != f.ambient())
    throw DimensionError("metric: size mismatch");
  if (f.kind == Kind::hyperbolic) return lorentz_product(u, v);
  return u.dot(v);
}

template <typename DU>
typename DU::Scalar tangent_norm(const SpaceForm& f,
                                 const Eigen::MatrixBase<DU>& v) {
  using S = typename DU::Scalar;
  return std::sqrt(std::max(S(0), metric(f, v, v)));
}

// Radial retraction of a nonzero ambient vector onto the radius-1/sqrt(C)
// sphere.
template <typename D>
VectorX<typename D::Scalar> project_to_sphere(const Eigen::MatrixBase<D>& z,
                                              double curvature) {
  using S = typename D::Scalar;
  if (!(curvature > 0)) throw ParameterError("project_to_sphere: C <= 0");
  const S n = z.norm();
  if (!(n > S(0)))
    throw DomainError("project_to_sphere: zero vector has no direction");
  return z / (std::sqrt(S(curvature)) * n);
}

// Graph parametrization of the upper sheet: z = 0 maps to the apex, the
// last d coordinates are z scaled to the curvature's radius.
template <typename D>
VectorX<typename D::Scalar> lift_to_hyperboloid(const Eigen::MatrixBase<D>& z,
                                                double curvature) {
  using S = typename D::Scalar;
  if (!(curvature < 0)) throw ParameterError("lift_to_hyperboloid: C >= 0");
  const S s = S(1) / std::sqrt(S(-curvature));
  VectorX<S> x(z.size() + 1);
  x(0) = s * std::sqrt(S(1) + z.squaredNorm());
  x.tail(z.size()) = s * z;
  return x;
}

// Removes the p-component of an ambient vector under the block's form,
// leaving a tangent vector at p.
template <typename DP, typename DV>
VectorX<typename DP::Scalar> tangent_project(const SpaceForm& f,
                                             const Eigen::MatrixBase<DP>& p,
                                             const Eigen::MatrixBase<DV>& v) {
  using S = typename DP::Scalar;
  if (f.kind == Kind::euclidean) return v;
  check_point(f, p, "tangent_project base");
  if (f.kind == Kind::spherical) {
    return v - (p.dot(v) / p.dot(p)) * p;
  }
  const S pp = lorentz_product(p, p);
  return v - (lorentz_product(p, v) / pp) * p;
}

}  // namespace spaceform
