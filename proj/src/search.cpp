#include "spaceform/search.hpp"

#include <cmath>
#include <limits>

#include "spaceform/datagen.hpp"
#include "spaceform/metrics.hpp"

namespace spaceform {

long vc_lower_bound(const Signature& sig) {
  sig.validate();
  return sig.dim() + 1;
}

long vc_upper_bound(const Signature& sig) {
  sig.validate();
  long pooled_e = 0;
  long budget = 0;
  for (const auto& b : sig.blocks) {
    if (b.kind == Kind::euclidean) {
      pooled_e += b.dim;
      continue;
    }
    if (b.dim < 2)
      throw ParameterError(
          "vc upper bound: non-Euclidean blocks need dimension >= 2");
    budget += b.dim + 1;
  }
  if (pooled_e > 0) budget += pooled_e + 1;

  // n/log2(n) dips below its n=2 value before growing, so the scan may not
  // stop at the first failure while n <= 4.
  long best = 0;
  for (long n = 2; n < 100000000; ++n) {
    if (double(n) / std::log2(double(n)) <=
        double(budget) * (1 + 1e-12))
      best = n;
    else if (n > 4)
      return best;
  }
  throw DomainError("vc upper bound: enumeration exceeded 1e8");
}

SearchSpaceSize signature_search_space_size(int d) {
  if (d < 2 || d % 2 != 0)
    throw ParameterError("search space size: need even d >= 2");
  SearchSpaceSize out;
  const auto checked_pow = [](unsigned long long base, int exp) {
    unsigned long long r = 1;
    for (int i = 0; i < exp; ++i)
      if (__builtin_mul_overflow(r, base, &r))
        throw DomainError("search space size: overflow");
    return r;
  };
  for (int k = 1; k <= d / 2; ++k) {
    unsigned long long term = checked_pow(3, k);
    if (__builtin_mul_overflow(term, checked_pow(k, d), &term) ||
        __builtin_add_overflow(out.full, term, &out.full))
      throw DomainError("search space size: overflow");
  }
  out.greedy = checked_pow(3, d / 2);
  return out;
}

void SearchConfig::validate() const {
  if (!(improvement_threshold >= 0))
    throw ParameterError("search: improvement threshold must be >= 0");
  if (max_blocks < 1) throw ParameterError("search: max_blocks must be >= 1");
  if (!(train_fraction > 0 && train_fraction < 1))
    throw ParameterError("search: train fraction must be in (0,1)");
  if (perceptron_passes < 1)
    throw ParameterError("search: perceptron passes must be >= 1");
}

namespace {

double evaluate_candidate(const Signature& sig,
                          const CandidateProvider& provider,
                          const SearchConfig& config) {
  LabeledData data = provider(sig, config.seed);
  if (!(data.sig == sig))
    throw DataError("search: provider returned a mismatched signature");
  const auto split = split_indices(data.size(), config.train_fraction,
                                   config.seed);
  if (split.train.empty() || split.test.empty())
    throw DataError("search: degenerate train/test split");
  const LabeledData train = subset(data, split.train);
  const LabeledData test = subset(data, split.test);

  // Kernel radii come from the full candidate dataset, not the train fold:
  // the kernels are only defined for points inside their norm bound, and
  // the held-out fold must be scorable.
  const std::vector<double> radii = hyperbolic_radii(data);

  IntVector preds(test.size());
  if (config.trainer == SearchConfig::Trainer::perceptron) {
    PerceptronConfig pc;
    pc.max_passes = config.perceptron_passes;
    pc.radii = radii;
    const PerceptronModel model = train_product_perceptron(train, pc);
    for (Index i = 0; i < test.size(); ++i)
      preds(i) = model.predict_one(test.points.row(i).transpose());
  } else {
    const KernelSet kernels = build_kernel_matrices(train, radii);
    const SvmSolution sol = solve_svm(kernels, train.labels, config.svm);
    const SvmModel model = make_svm_model(train, kernels, sol);
    for (Index i = 0; i < test.size(); ++i)
      preds(i) = model.predict_one(test.points.row(i).transpose());
  }
  return macro_f1(preds, test.labels);
}

}  // namespace

SearchResult greedy_signature_search(const CandidateProvider& provider,
                                     const SearchConfig& config) {
  config.validate();
  const std::vector<SpaceForm> bases = {SpaceForm::euclidean(2),
                                        SpaceForm::sphere(2, 1),
                                        SpaceForm::hyperbolic(2, -1)};
  std::vector<SpaceForm> chosen;
  SearchResult res;
  double current_acc = -std::numeric_limits<double>::infinity();

  for (int step = 0; step < config.max_blocks; ++step) {
    double best_acc = -std::numeric_limits<double>::infinity();
    std::size_t best_trace = 0;
    bool found = false;
    for (const auto& base : bases) {
      std::vector<SpaceForm> blocks = chosen;
      blocks.push_back(base);
      const Signature cand(std::move(blocks));
      double acc = 0;
      try {
        acc = evaluate_candidate(cand, provider, config);
      } catch (const DataError&) {
        // A provider may be unable to embed this candidate (a slice source
        // can run out of matching blocks); such candidates are skipped, not
        // recorded.
        continue;
      }
      res.trace.push_back({cand, acc, false});
      if (acc > best_acc) {
        best_acc = acc;
        best_trace = res.trace.size() - 1;
        found = true;
      }
    }
    if (!found && step == 0)
      throw DataError("search: no single-block candidate could be evaluated");
    if (!found) break;
    if (step > 0 && best_acc - current_acc < config.improvement_threshold)
      break;
    res.trace[best_trace].chosen = true;
    chosen = res.trace[best_trace].sig.blocks;
    current_acc = best_acc;
  }

  res.best = Signature(chosen);
  res.best_accuracy = current_acc;
  return res;
}

CandidateProvider make_regen_provider(Index n, double epsilon, double scale) {
  return [n, epsilon, scale](const Signature& sig, std::uint64_t seed) {
    GenConfig config;
    config.sig = sig;
    config.n = n;
    config.epsilon = epsilon;
    config.scale = scale;
    config.seed = seed;
    return generate_margin_dataset(config).data;
  };
}

CandidateProvider make_slice_provider(LabeledData source) {
  source.validate();
  return [source](const Signature& sig, std::uint64_t) {
    std::vector<bool> used(source.sig.size(), false);
    Matrix points(source.size(), sig.ambient());
    for (std::size_t k = 0; k < sig.size(); ++k) {
      bool matched = false;
      for (std::size_t j = 0; j < source.sig.size(); ++j) {
        if (used[j] || !(source.sig.blocks[j] == sig.blocks[k])) continue;
        points.middleCols(sig.offset(k), sig.blocks[k].ambient()) =
            source.points.middleCols(source.sig.offset(j),
                                     source.sig.blocks[j].ambient());
        used[j] = matched = true;
        break;
      }
      if (!matched)
        throw DataError(
            std::string("slice provider: no unused source block matches ") +
            kind_name(sig.blocks[k].kind) +
            std::to_string(sig.blocks[k].dim));
    }
    return LabeledData{sig, std::move(points), source.labels};
  };
}

}  // namespace spaceform
