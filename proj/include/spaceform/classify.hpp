#pragma once

// Linear classifiers on space forms and their products.
//
// Each non-Euclidean block contributes a distance-based score: with the
// weight normalizations <w,w> = C for spheres and [w,w] = -C for
// hyperboloids, the geodesic distance from x to the decision boundary
// {z : <w,z> = 0} (resp. [w,z] = 0) is asin|<w,x>|/sqrt(C) (resp.
// asinh|[w,x]|/sqrt(-C)), so the signed scores below are monotone in the
// distance to the boundary. The product decision sums the Euclidean affine
// score with the alpha-weighted block scores.

#include <vector>

#include "spaceform/product.hpp"

namespace spaceform {

// Signed spherical score asin(<w,x>). Requires <w,w> = C within
// tol::weights (relative); <w,x> is clamped within tol::clamp_slack.
double spherical_decision(const Vector& w, const Vector& x, double curvature);

// Signed hyperbolic score asinh([w,x]). Requires w time-like with
// [w,w] = -C within tol::weights (relative).
double hyperbolic_decision(const Vector& w, const Vector& x, double curvature);

// Geodesic distance from x to the decision boundary of w.
double spherical_boundary_distance(const Vector& w, const Vector& x,
                                   double curvature);
double hyperbolic_boundary_distance(const Vector& w, const Vector& x,
                                    double curvature);

// Closest boundary point to x: the normalized projection of x onto the
// orthogonal complement of w under the block's form. Errors if the
// projection degenerates (x on the pole set of w).
Vector spherical_base_point(const Vector& w, const Vector& x,
                            double curvature);
Vector hyperbolic_base_point(const Vector& w, const Vector& x,
                             double curvature);

// Product-space classifier parameters. Weight blocks are laid out like
// point coordinates; Euclidean blocks absorb their alpha into the weight
// norm, non-Euclidean blocks keep their curvature normalization.
struct ClassifierParams {
  Signature sig;
  double bias = 0.0;
  std::vector<Vector> weights;  // one ambient-sized vector per block

  ClassifierParams() = default;
  ClassifierParams(Signature s, double b, std::vector<Vector> w)
      : sig(std::move(s)), bias(b), weights(std::move(w)) {}

  // Checks layout and the per-block norm constraints to tol::weights.
  // Construction does not validate; datagen's shattering witnesses use
  // deliberately unnormalized weights.
  void validate() const;

  Vector concatenated() const;
};

// sum_E w_k.x_k + b + sum_S alpha_k asin(<w_k,x_k>) +
// sum_H alpha_k asinh([w_k,x_k]). Only checks shapes, not norms; spherical
// arguments get the usual clamp slack, anything beyond is a domain error.
double product_decision(const ClassifierParams& params, const Vector& x);

// Sign of the decision; exact zeros go to the negative class.
int predict(const ClassifierParams& params, const Vector& x);

// y * decision, the l1-style margin proxy the trainers below bound.
double margin_surrogate(const ClassifierParams& params, const Vector& x,
                        int y);

}  // namespace spaceform
