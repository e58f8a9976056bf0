#pragma once

// Perceptron-style trainers.
//
// The product trainer works in the RKHS of the composite kernel
//   K(x,x') = 1 + <x_E,x'_E> + sum_S alpha asin(C <x_S,x'_S>)
//           + sum_H alpha asin(<x_H,x'_H> / R^2),
// where R bounds the Euclidean norms of that hyperbolic block's
// coordinates. The hyperbolic term is the arcsine of the ordinary dot
// product, not the Lorentzian one; the factored feature map that makes
// this a valid kernel forces it. On a mistake the decision function gains
// y_n K(., x_n); cycling stops after a full clean pass.
//
// The single-block hyperbolic trainer is primal: w <- w + y H x on a
// mistake, H = diag(-1, I). It converges within (R |w*| / sinh eps)^2
// updates on data with margin eps.

#include <cstdint>
#include <utility>
#include <vector>

#include "spaceform/classify.hpp"
#include "spaceform/data.hpp"

namespace spaceform {

// Kernel configuration: the signature (weights included) plus one norm
// bound per hyperbolic block, in block order.
struct ProductKernel {
  Signature sig;
  std::vector<double> radii;

  ProductKernel(Signature s, std::vector<double> r);

  template <typename DX, typename DY>
  double operator()(const Eigen::MatrixBase<DX>& x,
                    const Eigen::MatrixBase<DY>& y) const {
    double acc = 1.0;
    std::size_t h = 0;
    for (std::size_t k = 0; k < sig.size(); ++k) {
      const auto xk = sig.block(k, x);
      const auto yk = sig.block(k, y);
      const double a = sig.alphas(Index(k));
      switch (sig.blocks[k].kind) {
        case Kind::euclidean:
          acc += xk.dot(yk);
          break;
        case Kind::spherical:
          acc += a * std::asin(clamp_unit(sig.blocks[k].curvature *
                                          xk.dot(yk)));
          break;
        case Kind::hyperbolic: {
          const double R = radii[h++];
          acc += a * std::asin(clamp_unit(xk.dot(yk) / (R * R)));
          break;
        }
      }
    }
    return acc;
  }
};

double kernel_eval(const ProductKernel& kernel, const Vector& x,
                   const Vector& y);

struct PerceptronConfig {
  int max_passes = 1000;
  bool single_pass = false;   // streaming mode: exactly one pass
  // Optional per-hyperbolic-block norm bounds. Empty means "from data";
  // supplying a value below the data bound is an error, never a clamp.
  std::vector<double> radii;
  bool record_trace = false;
};

// Training F1 after selected updates, adaptively thinned so long runs
// keep at most ~2048 samples. Always ends with the final state.
struct TrainTrace {
  std::vector<std::pair<long, double>> f1_by_update;
};

struct PerceptronModel {
  Signature sig;
  std::vector<double> radii;
  std::vector<std::pair<Index, int>> updates;  // (training row, label)
  Matrix support;       // coordinates of rows that were ever updated
  std::vector<Index> support_rows;
  Vector coefficients;  // net y-sum per support row
  bool converged = false;
  int passes = 0;

  double decision(const Vector& x) const;
  int predict_one(const Vector& x) const;
  // min_n y_n g(x_n): positive iff the model separates `data`.
  double margin_certificate(const LabeledData& data) const;
};

PerceptronModel train_product_perceptron(const LabeledData& data,
                                         const PerceptronConfig& config,
                                         TrainTrace* trace = nullptr);

// Mistake bound for the product trainer: B Phi / eps^2 with
// B = 1 + R_E^2 + (pi/2) sum alpha and Phi the squared feature norm of the
// teacher; the hyperbolic arcsine argument is clamped at 1, where the
// feature expansion of the teacher stops converging and the bound
// saturates.
double theoretical_update_bound(const ClassifierParams& w_star,
                                const std::vector<double>& radii,
                                double r_euclidean, double eps);

// (R |w*| / sinh eps)^2.
double hyperbolic_update_bound(double radius, double w_star_norm, double eps);

struct HyperbolicPerceptron {
  Vector w;
  long updates = 0;
  int passes = 0;
  bool converged = false;

  double decision(const Vector& x) const;  // asinh([w, x])
  int predict_one(const Vector& x) const;
};

// max_updates stops training mid-pass once exceeded; pass 0 for no cap.
HyperbolicPerceptron train_hyperbolic_perceptron(const SpaceForm& form,
                                                 const Matrix& points,
                                                 const IntVector& labels,
                                                 long max_updates = 0);

// Primal Euclidean perceptron with bias, for the flattened baselines.
struct EuclideanPerceptron {
  Vector w;
  double b = 0;
  long updates = 0;
  bool converged = false;

  double decision(const Vector& x) const { return w.dot(x) + b; }
};

EuclideanPerceptron train_euclidean_perceptron(const Matrix& points,
                                               const IntVector& labels,
                                               long max_updates,
                                               TrainTrace* trace = nullptr);

// One step of the prior-art hyperbolic update: u = w + y x followed by
// u / min{1, sqrt([u,u])}. The step is undefined when [u,u] <= 0; the
// result then carries degenerate = true and next = u unnormalized.
struct WeberStep {
  Vector u;
  double u_self = 0;
  bool degenerate = false;
  Vector next;
};

WeberStep weber_step(const Vector& w, const Vector& x, int y);

// Runs the prior-art algorithm under its own sign convention: it scores
// with -[w,x], so a point counts as a mistake when sgn(-[w,x]) != y.
// Degenerate normalizations are counted and skipped.
struct WeberTrainResult {
  Vector w;
  long updates = 0;
  long degenerate_events = 0;
  bool converged = false;

  int predict_one(const Vector& x) const;
};

WeberTrainResult train_weber(const Matrix& points, const IntVector& labels,
                             long max_updates);

}  // namespace spaceform
