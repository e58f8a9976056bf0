#pragma once

// Scoring and probability calibration shared by the evaluation flows.

#include <functional>
#include <vector>

#include "spaceform/data.hpp"

namespace spaceform {

struct ClassMetrics {
  int cls = 0;
  long tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
};

// The class universe is the distinct set of ground-truth labels; a class
// the predictor never emits scores precision 0, and 0/0 ratios are 0.
std::vector<ClassMetrics> per_class_metrics(const IntVector& preds,
                                            const IntVector& labels);

double macro_f1(const IntVector& preds, const IntVector& labels);

// P(y = +1 | s) = 1 / (1 + exp(A s + B)); A < 0 when larger scores mean
// the positive class. Fit by Newton on the regularized-target likelihood.
struct PlattScaler {
  double A = 0, B = 0;
  double operator()(double score) const;
};

PlattScaler fit_platt(const Vector& scores, const IntVector& labels);

// A binary trainer maps (+1/-1)-labeled data to a real-valued scorer.
using BinaryTrainer =
    std::function<std::function<double(const Vector&)>(const LabeledData&)>;

struct OneVsRest {
  std::vector<int> classes;  // ascending
  std::vector<std::function<double(const Vector&)>> scorers;
  std::vector<PlattScaler> calibration;

  Vector probabilities(const Vector& x) const;
  // MAP class; exact probability ties resolve to the lowest class.
  int predict_one(const Vector& x) const;
  IntVector predict(const Matrix& points) const;
};

OneVsRest one_vs_rest_train(const LabeledData& data,
                            const BinaryTrainer& trainer);

}  // namespace spaceform
