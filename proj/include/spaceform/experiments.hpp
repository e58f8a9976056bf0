#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spaceform/datagen.hpp"
#include "spaceform/perceptron.hpp"

namespace spaceform {

// Convergence grid: margin data in a product signature, product-kernel
// perceptron against the flattened-ambient Euclidean perceptron, with the
// theoretical update bound per cell. Emits CSV, SVG, and a report into
// outdir; returns everything it wrote so tests can assert in memory.
struct ConvergenceGridConfig {
  Signature sig{std::vector<SpaceForm>{SpaceForm::euclidean(2),
                                       SpaceForm::sphere(2, 1),
                                       SpaceForm::hyperbolic(2, -1)}};
  std::vector<Index> n_values = {100, 200, 300};
  std::vector<double> eps_values = {0.01, 0.05, 0.1, 0.2};
  std::uint64_t seed = 0;
  double scale = 1.0;
  long euclidean_cap = 5000;  // the flat baseline need not terminate
  int max_passes = 1000;
  std::string outdir = ".";
};

struct ConvergenceCell {
  Index n = 0;
  double eps = 0;
  std::uint64_t cell_seed = 0;
  long attempts = 0;
  double bound = 0;
  long product_updates = 0;
  bool product_converged = false;
  double product_final_f1 = 0;
  long euclid_updates = 0;
  bool euclid_converged = false;
  double euclid_final_f1 = 0;
  std::vector<std::pair<long, double>> product_curve;
  std::vector<std::pair<long, double>> euclid_curve;
};

struct ConvergenceGridResult {
  std::vector<ConvergenceCell> cells;
  std::vector<std::string> files;
};

ConvergenceGridResult run_convergence_grid(const ConvergenceGridConfig& cfg);

// Margin sweep on one hyperbolic dataset: the convergent perceptron against
// the prior normalized-update rule, each run twice, once under the proven
// quadratic update budget and once under the O(1/sinh eps) budget that the
// prior analysis claimed.
struct HyperbolicSweepConfig {
  std::uint64_t seed = 0;
  Index n = 5000;
  int eps_count = 100;
  double eps_min = 0.1;
  double eps_max = 1.0;
  double scale = 2.0;
  std::string outdir = ".";
};

struct HyperbolicSweepRow {
  int budget_kind = 0;  // 0: quadratic bound, 1: 1/sinh budget
  double eps = 0;
  Index n_points = 0;
  long budget = 0;
  long ours_updates = 0;
  bool ours_converged = false;
  double ours_accuracy = 0;
  long weber_updates = 0;
  bool weber_converged = false;
  long weber_degenerate_events = 0;
  double weber_accuracy = 0;
};

struct HyperbolicSweepResult {
  double w_star_norm = 0;
  std::vector<HyperbolicSweepRow> rows;
  std::vector<std::string> files;
};

HyperbolicSweepResult run_hyperbolic_sweep(const HyperbolicSweepConfig& cfg);

}  // namespace spaceform
