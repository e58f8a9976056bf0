#pragma once

#include <optional>
#include <vector>

#include "spaceform/classify.hpp"
#include "spaceform/data.hpp"
#include "spaceform/rng.hpp"

namespace spaceform {

struct GenConfig {
  Signature sig;
  Index n = 100;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  double scale = 1.0;  // Gaussian scale before projection/lift
  std::optional<ClassifierParams> w_star;

  void validate() const;
};

struct GenResult {
  LabeledData data;
  ClassifierParams w_star;
  std::vector<double> radii;          // achieved max |x_H|_2 per block
  std::vector<double> teacher_radii;  // 1/|w_H|_2: radius at which the
                                      // teacher's asin feature saturates
  bool precondition_saturated = false;
  long attempts = 0;
  double theoretical_bound = 0;
};

// Teacher weights: Gaussian draws normalized onto |w_E| = alpha,
// <w_S,w_S> = C_S, [w_H,w_H] = -C_H (positive self-product); bias 0.
ClassifierParams sample_w_star(const Signature& sig, std::uint64_t seed);

// Rejection-samples points until n of them clear the margin |f(x)| >= eps;
// labels are the teacher's signs. Throws GenerationStallError when fewer
// than 10 of 10^4 consecutive attempts are accepted.
GenResult generate_margin_dataset(const GenConfig& config);

// d+1 points on the C=-1 hyperboloid whose lifts z_1 = 0, z_n = e_{n-1}
// are shattered by the closed-form weights below.
Matrix shatter_points_hyperbolic(Index d);

// w = (-t_1, -sqrt(2) t_1 + t_2, ..., -sqrt(2) t_1 + t_{d+1}) with t_1 = y_1
// and t_n = k y_n; requires k > sqrt(2) + 1 so every labeling is realized.
Vector solve_shatter_weights(const IntVector& labels, double k);

// The dim(M)+1 block-diagonal witness family for a product E x S x H, with
// per-labeling perturbed weights. The witness weights are deliberately not
// norm-normalized.
struct ProductShatter {
  Signature sig;
  Matrix points;  // (dim+1) x ambient

  ClassifierParams witness(const IntVector& labels, double eps) const;
};

ProductShatter shatter_points_product(const Signature& sig);

// First eps in 1e-2, 1e-3, ..., 1e-10 whose witness reproduces the labels
// at every point; 0 when none does.
double find_witness_epsilon(const ProductShatter& shatter,
                            const IntVector& labels);

}  // namespace spaceform
