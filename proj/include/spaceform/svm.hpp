#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spaceform/data.hpp"
#include "spaceform/perceptron.hpp"

namespace spaceform {

// Kernel matrices for one training set. `margin` is the composite kernel the
// decision rule lives in; the rest are the per-geometry matrices whose
// quadratic forms in beta recover the weight-norm quantities (|w_E|^2,
// asin-features, asinh-features) used by the constraint sets.
struct KernelSet {
  Signature sig;
  std::vector<double> radii;       // one per hyperbolic block
  Matrix margin;                   // 1 + <x_E,x'_E> + sum alpha asin(.)
  Matrix euclidean;                // 1 + pooled Euclidean Gram (bias inside)
  std::vector<Matrix> spherical;   // per block: asin(C <x,x'>)
  std::vector<Matrix> hyperbolic;  // per block: asinh(R^-2 [x,x'])
  std::vector<Matrix> hyp_plus;    // PSD split: hyperbolic = plus - minus
  std::vector<Matrix> hyp_minus;

  Index size() const { return margin.rows(); }
};

// Entrywise closed forms. Supplied radii must dominate the per-block data
// radii; empty means "use the data radii".
KernelSet build_kernel_matrices(const LabeledData& data,
                                std::vector<double> radii = {});

// Symmetric eigendecomposition split K = plus - minus, both PSD.
std::pair<Matrix, Matrix> split_indefinite(const Matrix& k);

struct SvmParams {
  double r = -1;        // < 0: per-block default 1e-2 * asinh(-R^2 C)
  double tolerance = 1e-6;
  long max_iters = 10000;
  // Off: drop the split hyperbolic constraint pair (the convex relaxation
  // then constrains only the Euclidean and spherical quadratic forms).
  bool hyperbolic_constraints = true;
  // Weight on the total slack in the objective; 1 is the plain program.
  double slack_weight = 1.0;
};

struct SvmSolution {
  Vector beta;
  double epsilon = 0;
  Vector zeta;
  double objective = 0;
  bool converged = false;
  long iterations = 0;
  // Violations recomputed from scratch: nonnegative, one entry per
  // constraint set plus one for the margin constraints.
  std::vector<std::pair<std::string, double>> residuals;
  // Best objective value so far at each outer iteration; nondecreasing.
  std::vector<double> objective_trace;
};

// Maximizes epsilon - slack_weight * sum(zeta) over beta in the intersection
// of the relaxed quadratic constraint sets. Supergradient ascent with exact
// Dykstra projections; deterministic. Throws SolverError when the labels are
// a single class or the active signature/mode leaves no constraint set.
SvmSolution solve_svm(const KernelSet& kernels, const IntVector& labels,
                      const SvmParams& params = {});

inline double svm_decision(const Vector& beta, const Vector& kernel_row) {
  if (beta.size() != kernel_row.size())
    throw DimensionError("svm_decision: size mismatch");
  return beta.dot(kernel_row);
}

inline int svm_predict(const Vector& beta, const Vector& kernel_row) {
  return svm_decision(beta, kernel_row) > 0 ? 1 : -1;
}

// Solution bundled with its training points so new points can be scored.
struct SvmModel {
  Signature sig;
  std::vector<double> radii;
  Matrix support;
  Vector beta;
  double epsilon = 0;

  double decision(const Vector& x) const;
  int predict_one(const Vector& x) const;
};

SvmModel make_svm_model(const LabeledData& train, const KernelSet& kernels,
                        const SvmSolution& solution);

}  // namespace spaceform
