#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spaceform/data.hpp"
#include "spaceform/svm.hpp"

namespace spaceform {

// Shattering bounds for linear classifiers on a product of space forms.
// Lower: dim(M)+1 points are always shatterable. Upper: largest N with
// N/log2(N) <= sum(d_k+1), Euclidean dims pooled into a single block.
long vc_lower_bound(const Signature& sig);
long vc_upper_bound(const Signature& sig);

struct SearchSpaceSize {
  unsigned long long full = 0;    // sum over K of 3^K K^d
  unsigned long long greedy = 0;  // 3^(d/2)
};

// Number of candidate signatures for an even embedding dimension d, and the
// reduction achieved by the greedy two-dimensional-block search.
SearchSpaceSize signature_search_space_size(int d);

// Supplies a labeled dataset embedded in the candidate signature. The same
// seed is passed for every candidate of one search so runs are comparable
// and the trace is reproducible.
using CandidateProvider =
    std::function<LabeledData(const Signature&, std::uint64_t)>;

struct SearchConfig {
  double improvement_threshold = 0.01;
  int max_blocks = 3;
  enum class Trainer { perceptron, svm };
  Trainer trainer = Trainer::perceptron;
  int perceptron_passes = 100;
  SvmParams svm;
  double train_fraction = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SearchStep {
  Signature sig;
  double accuracy = 0;
  bool chosen = false;
};

struct SearchResult {
  Signature best;
  double best_accuracy = 0;
  std::vector<SearchStep> trace;  // every candidate evaluation in order
};

// Bottom-up greedy search over products of two-dimensional blocks with unit
// curvature magnitudes. Starts from the best single block, then keeps
// appending whichever of E2/S2/H2 improves held-out macro F1 the most,
// stopping when the improvement falls below the threshold. Ties keep the
// earliest candidate in E2, S2, H2 order.
SearchResult greedy_signature_search(const CandidateProvider& provider,
                                     const SearchConfig& config);

// Provider that regenerates margin-separable synthetic data in each
// candidate signature; n, epsilon, and scale come from the base config.
CandidateProvider make_regen_provider(Index n, double epsilon, double scale);

// Provider that slices matching coordinate blocks out of one fixed dataset:
// each candidate block claims the first unclaimed source block of the same
// kind and dimension, and labels carry over.
CandidateProvider make_slice_provider(LabeledData source);

}  // namespace spaceform
