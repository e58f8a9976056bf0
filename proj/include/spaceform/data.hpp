#pragma once

// Labeled point sets on a product signature. Points are rows of a dense
// matrix in concatenated ambient coordinates; slicing a block is a cheap
// Eigen view.

#include <cstdint>
#include <vector>

#include "spaceform/product.hpp"

namespace spaceform {

struct LabeledData {
  Signature sig;
  Matrix points;     // N x sig.ambient()
  IntVector labels;  // N

  Index size() const { return points.rows(); }

  // Shape plus per-row manifold membership; errors name row and block.
  void validate() const;

  // True when labels are drawn from {-1, +1}.
  bool binary() const;
};

LabeledData subset(const LabeledData& d, const std::vector<Index>& rows);

struct SplitIndices {
  std::vector<Index> train, test;
};

// Seeded Fisher-Yates split; train gets round(n * train_fraction) rows.
SplitIndices split_indices(Index n, double train_fraction,
                           std::uint64_t seed);

// Reinterprets all ambient coordinates as a single Euclidean block with
// unit weight. This is the flattened-ambient view the Euclidean baselines
// train on.
LabeledData flatten_euclidean(const LabeledData& d);

// Equal-dimension Euclidean view: log map at the canonical base point of
// each block, stacked into one E^(sum of intrinsic dims) block. Curved
// blocks contribute their intrinsic dimension (the leading tangent
// coordinate vanishes at the base point and is dropped), so unlike
// flatten_euclidean this view is lossy: it forgets the metric's warp.
LabeledData flatten_tangent(const LabeledData& d);

// Per-hyperbolic-block max row norm, in block order. Distinct from the
// curvature radius: this is the Euclidean norm bound the kernels scale by.
std::vector<double> hyperbolic_radii(const LabeledData& d);

// Max Euclidean norm of the pooled Euclidean coordinates (0 if none).
double euclidean_radius(const LabeledData& d);

}  // namespace spaceform
