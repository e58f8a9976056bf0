#include "spaceform/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spaceform {

std::vector<ClassMetrics> per_class_metrics(const IntVector& preds,
                                            const IntVector& labels) {
  if (preds.size() != labels.size())
    throw DimensionError("metrics: prediction/label count mismatch");
  if (labels.size() == 0) throw ParameterError("metrics: empty label set");
  std::set<int> universe;
  for (Index i = 0; i < labels.size(); ++i) universe.insert(labels(i));
  std::vector<ClassMetrics> out;
  for (int cls : universe) {
    ClassMetrics m;
    m.cls = cls;
    for (Index i = 0; i < labels.size(); ++i) {
      const bool p = preds(i) == cls, t = labels(i) == cls;
      if (p && t) ++m.tp;
      else if (p) ++m.fp;
      else if (t) ++m.fn;
    }
    m.precision = m.tp + m.fp > 0 ? double(m.tp) / double(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn > 0 ? double(m.tp) / double(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    out.push_back(m);
  }
  return out;
}

double macro_f1(const IntVector& preds, const IntVector& labels) {
  const auto per = per_class_metrics(preds, labels);
  double acc = 0;
  for (const auto& m : per) acc += m.f1;
  return acc / double(per.size());
}

double PlattScaler::operator()(double score) const {
  const double f = A * score + B;
  // sigma(-f), evaluated on the safe side of the exponential
  if (f >= 0) {
    const double e = std::exp(-f);
    return e / (1 + e);
  }
  return 1 / (1 + std::exp(f));
}

PlattScaler fit_platt(const Vector& scores, const IntVector& labels) {
  const Index n = scores.size();
  if (labels.size() != n) throw DimensionError("platt: size mismatch");
  long pos = 0, neg = 0;
  for (Index i = 0; i < n; ++i) {
    if (labels(i) == 1) ++pos;
    else if (labels(i) == -1) ++neg;
    else throw ParameterError("platt: labels must be +1/-1");
  }
  if (pos == 0 || neg == 0)
    throw ParameterError("platt: need both classes to calibrate");

  const double hi = (double(pos) + 1) / (double(pos) + 2);
  const double lo = 1 / (double(neg) + 2);
  Vector target(n);
  for (Index i = 0; i < n; ++i) target(i) = labels(i) == 1 ? hi : lo;

  // Negative log likelihood of p_i = sigma(-(A s_i + B)) against soft
  // targets, stable for large |f|.
  const auto nll = [&](double A, double B) {
    double acc = 0;
    for (Index i = 0; i < n; ++i) {
      const double f = A * scores(i) + B;
      if (f >= 0)
        acc += target(i) * f + std::log1p(std::exp(-f));
      else
        acc += (target(i) - 1) * f + std::log1p(std::exp(f));
    }
    return acc;
  };

  double A = 0, B = std::log((double(neg) + 1) / (double(pos) + 1));
  double value = nll(A, B);
  for (int iter = 0; iter < 100; ++iter) {
    double gA = 0, gB = 0, hAA = 1e-12, hAB = 0, hBB = 1e-12;
    for (Index i = 0; i < n; ++i) {
      const double s = scores(i);
      const double f = A * s + B;
      const double p = f >= 0 ? std::exp(-f) / (1 + std::exp(-f))
                              : 1 / (1 + std::exp(f));
      const double d = target(i) - p;
      const double w = std::max(p * (1 - p), 0.0);
      gA += d * s;
      gB += d;
      hAA += w * s * s;
      hAB += w * s;
      hBB += w;
    }
    if (std::max(std::abs(gA), std::abs(gB)) < 1e-10) break;
    const double det = hAA * hBB - hAB * hAB;
    double dA = -(hBB * gA - hAB * gB) / det;
    double dB = -(hAA * gB - hAB * gA) / det;
    // Backtrack until the likelihood improves; the problem is convex so a
    // fraction of the Newton step always does.
    double step = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      const double cand = nll(A + step * dA, B + step * dB);
      if (cand <= value + 1e-15) {
        A += step * dA;
        B += step * dB;
        value = cand;
        moved = true;
        break;
      }
      step /= 2;
    }
    if (!moved) break;
  }
  return PlattScaler{A, B};
}

Vector OneVsRest::probabilities(const Vector& x) const {
  Vector p(Index(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c)
    p(Index(c)) = calibration[c](scorers[c](x));
  return p;
}

int OneVsRest::predict_one(const Vector& x) const {
  const Vector p = probabilities(x);
  Index best = 0;
  for (Index c = 1; c < p.size(); ++c)
    if (p(c) > p(best)) best = c;  // strict: ties keep the lowest class
  return classes[std::size_t(best)];
}

IntVector OneVsRest::predict(const Matrix& points) const {
  IntVector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i)
    out(i) = predict_one(points.row(i).transpose());
  return out;
}

OneVsRest one_vs_rest_train(const LabeledData& data,
                            const BinaryTrainer& trainer) {
  if (data.size() == 0) throw ParameterError("one_vs_rest: empty data");
  std::set<int> universe;
  for (Index i = 0; i < data.labels.size(); ++i)
    universe.insert(data.labels(i));
  if (universe.size() < 2)
    throw ParameterError("one_vs_rest: need at least two classes");

  OneVsRest model;
  model.classes.assign(universe.begin(), universe.end());
  for (int cls : model.classes) {
    LabeledData bin = data;
    for (Index i = 0; i < bin.labels.size(); ++i)
      bin.labels(i) = data.labels(i) == cls ? 1 : -1;
    auto scorer = trainer(bin);
    Vector scores(bin.size());
    for (Index i = 0; i < bin.size(); ++i)
      scores(i) = scorer(bin.points.row(i).transpose());
    model.calibration.push_back(fit_platt(scores, bin.labels));
    model.scorers.push_back(std::move(scorer));
  }
  return model;
}

}  // namespace spaceform
