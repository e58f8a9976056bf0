#include "spaceform/perceptron.hpp"

#include <cmath>
#include <limits>

namespace spaceform {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_binary_labels(const IntVector& y) {
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 1 && y(i) != -1)
      throw ParameterError("labels must be +1/-1");
}

int sign3(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Macro F1 of sgn(scores) against labels without temporaries; the class
// universe is whatever appears in y.
double binary_macro_f1(const Vector& scores, const IntVector& y) {
  long tp_p = 0, fp_p = 0, fn_p = 0, tp_n = 0, fp_n = 0, fn_n = 0;
  bool has_p = false, has_n = false;
  for (Index i = 0; i < y.size(); ++i) {
    const int pred = scores(i) > 0 ? 1 : -1;
    if (y(i) == 1) {
      has_p = true;
      if (pred == 1) ++tp_p; else { ++fn_p; ++fp_n; }
    } else {
      has_n = true;
      if (pred == -1) ++tp_n; else { ++fn_n; ++fp_p; }
    }
  }
  const auto f1 = [](long tp, long fp, long fn) {
    const double den = 2.0 * double(tp) + double(fp) + double(fn);
    return den > 0 ? 2.0 * double(tp) / den : 0.0;
  };
  double acc = 0;
  int cls = 0;
  if (has_p) { acc += f1(tp_p, fp_p, fn_p); ++cls; }
  if (has_n) { acc += f1(tp_n, fp_n, fn_n); ++cls; }
  return cls ? acc / cls : 0.0;
}

struct TraceRecorder {
  TrainTrace* out;
  long stride = 1;

  void push(long k, double f1) {
    if (!out || k % stride) return;
    out->f1_by_update.emplace_back(k, f1);
    if (out->f1_by_update.size() >= 4096) {
      stride *= 2;
      std::vector<std::pair<long, double>> kept;
      for (const auto& r : out->f1_by_update)
        if (r.first % stride == 0) kept.push_back(r);
      out->f1_by_update.swap(kept);
    }
  }

  void finish(long k, double f1) {
    if (!out) return;
    if (out->f1_by_update.empty() || out->f1_by_update.back().first != k)
      out->f1_by_update.emplace_back(k, f1);
  }
};

}  // namespace

ProductKernel::ProductKernel(Signature s, std::vector<double> r)
    : sig(std::move(s)), radii(std::move(r)) {
  sig.validate();
  std::size_t h = 0;
  for (const auto& b : sig.blocks)
    if (b.kind == Kind::hyperbolic) ++h;
  if (radii.size() != h)
    throw DimensionError("kernel: one radius per hyperbolic block");
  for (double R : radii)
    if (!(R > 0)) throw ParameterError("kernel: radii must be positive");
}

double kernel_eval(const ProductKernel& kernel, const Vector& x,
                   const Vector& y) {
  if (x.size() != kernel.sig.ambient() || y.size() != kernel.sig.ambient())
    throw DimensionError("kernel_eval: wrong ambient size");
  return kernel(x, y);
}

double PerceptronModel::decision(const Vector& x) const {
  const ProductKernel kern(sig, radii);
  double acc = 0;
  for (Index j = 0; j < support.rows(); ++j)
    acc += coefficients(j) * kern(x, support.row(j).transpose());
  return acc;
}

int PerceptronModel::predict_one(const Vector& x) const {
  return decision(x) > 0 ? 1 : -1;
}

double PerceptronModel::margin_certificate(const LabeledData& data) const {
  double worst = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < data.size(); ++i)
    worst = std::min(worst, double(data.labels(i)) *
                                decision(data.points.row(i).transpose()));
  return worst;
}

PerceptronModel train_product_perceptron(const LabeledData& data,
                                         const PerceptronConfig& config,
                                         TrainTrace* trace) {
  const Index n = data.size();
  if (n == 0) throw ParameterError("perceptron: empty dataset");
  data.validate();
  check_binary_labels(data.labels);
  if (config.max_passes < 1)
    throw ParameterError("perceptron: max_passes must be >= 1");

  std::vector<double> radii = hyperbolic_radii(data);
  if (!config.radii.empty()) {
    if (config.radii.size() != radii.size())
      throw DimensionError("perceptron: one radius per hyperbolic block");
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (config.radii[k] < radii[k])
        throw DomainError(
            "perceptron: supplied hyperbolic radius is below the data bound");
      radii[k] = config.radii[k];
    }
  }
  const ProductKernel kern(data.sig, radii);

  // Decision values are maintained incrementally: an update at row m adds
  // y_m K(., x_m), i.e. y_m times column m of the Gram matrix. The Gram
  // matrix is materialized at moderate sizes, computed by column above.
  const bool use_gram = n <= 2048;
  Matrix gram;
  if (use_gram) {
    gram.resize(n, n);
    for (Index i = 0; i < n; ++i) {
      const auto xi = data.points.row(i).transpose();
      for (Index j = i; j < n; ++j) {
        gram(i, j) = kern(xi, data.points.row(j).transpose());
        gram(j, i) = gram(i, j);
      }
    }
  }

  PerceptronModel model;
  model.sig = data.sig;
  model.radii = radii;

  Vector d = Vector::Zero(n);
  Vector column(n);
  TraceRecorder rec{config.record_trace || trace ? trace : nullptr};
  bool converged = false;
  int pass = 0;
  while (pass < config.max_passes) {
    ++pass;
    long mistakes = 0;
    for (Index m = 0; m < n; ++m) {
      if (sign3(d(m)) == data.labels(m)) continue;
      ++mistakes;
      const int y = data.labels(m);
      model.updates.emplace_back(m, y);
      if (use_gram) {
        d += double(y) * gram.col(m);
      } else {
        const auto xm = data.points.row(m).transpose();
        for (Index i = 0; i < n; ++i)
          column(i) = kern(data.points.row(i).transpose(), xm);
        d += double(y) * column;
      }
      rec.push(long(model.updates.size()), binary_macro_f1(d, data.labels));
    }
    if (config.single_pass) {
      converged = mistakes == 0;
      break;
    }
    if (mistakes == 0) {
      converged = true;
      break;
    }
  }
  model.converged = converged;
  model.passes = pass;
  rec.finish(long(model.updates.size()), binary_macro_f1(d, data.labels));

  // Consolidate the update list into per-row net coefficients.
  std::vector<Index> slot(std::size_t(n), -1);
  for (const auto& [row, y] : model.updates) {
    if (slot[std::size_t(row)] < 0) {
      slot[std::size_t(row)] = Index(model.support_rows.size());
      model.support_rows.push_back(row);
    }
  }
  model.support.resize(Index(model.support_rows.size()), data.points.cols());
  model.coefficients = Vector::Zero(Index(model.support_rows.size()));
  for (std::size_t j = 0; j < model.support_rows.size(); ++j)
    model.support.row(Index(j)) = data.points.row(model.support_rows[j]);
  for (const auto& [row, y] : model.updates)
    model.coefficients(slot[std::size_t(row)]) += y;
  return model;
}

double theoretical_update_bound(const ClassifierParams& w_star,
                                const std::vector<double>& radii,
                                double r_euclidean, double eps) {
  if (!(eps > 0)) throw ParameterError("update bound: eps must be positive");
  if (!(r_euclidean >= 0))
    throw ParameterError("update bound: negative Euclidean radius");
  const Signature& sig = w_star.sig;
  if (w_star.weights.size() != sig.size())
    throw DimensionError("update bound: malformed params");

  double alpha_sum = 0;
  std::size_t h_total = 0;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    if (sig.blocks[k].kind == Kind::euclidean) continue;
    alpha_sum += sig.alphas(Index(k));
    if (sig.blocks[k].kind == Kind::hyperbolic) ++h_total;
  }
  if (radii.size() != h_total)
    throw DimensionError("update bound: one radius per hyperbolic block");

  const double B = 1 + r_euclidean * r_euclidean + alpha_sum * kPi / 2;

  double phi = w_star.bias * w_star.bias;
  std::size_t h = 0;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const Vector& w = w_star.weights[k];
    const double a = sig.alphas(Index(k));
    switch (sig.blocks[k].kind) {
      case Kind::euclidean:
        phi += w.squaredNorm();
        break;
      case Kind::spherical:
        phi += a * std::asin(std::min(
                       1.0, w.squaredNorm() / sig.blocks[k].curvature));
        break;
      case Kind::hyperbolic: {
        const double R = radii[h++];
        if (!(R > 0)) throw ParameterError("update bound: radius <= 0");
        // The teacher's feature norm saturates at asin(1) once R |w_H|
        // reaches 1; beyond that the expansion diverges and the bound is
        // reported at the saturation value.
        phi += a * std::asin(std::min(1.0, R * R * w.squaredNorm()));
        break;
      }
    }
  }
  return B * phi / (eps * eps);
}

double hyperbolic_update_bound(double radius, double w_star_norm,
                               double eps) {
  if (!(eps > 0))
    throw ParameterError("hyperbolic bound: eps must be positive");
  if (!(radius > 0) || !(w_star_norm > 0))
    throw ParameterError("hyperbolic bound: radius and |w*| must be positive");
  const double q = radius * w_star_norm / std::sinh(eps);
  return q * q;
}

double HyperbolicPerceptron::decision(const Vector& x) const {
  return std::asinh(lorentz_product(w, x));
}

int HyperbolicPerceptron::predict_one(const Vector& x) const {
  return lorentz_product(w, x) > 0 ? 1 : -1;
}

HyperbolicPerceptron train_hyperbolic_perceptron(const SpaceForm& form,
                                                 const Matrix& points,
                                                 const IntVector& labels,
                                                 long max_updates) {
  if (form.kind != Kind::hyperbolic)
    throw ParameterError("hyperbolic perceptron: not a hyperbolic form");
  const Index n = points.rows();
  if (n == 0) throw ParameterError("hyperbolic perceptron: empty dataset");
  if (labels.size() != n)
    throw DimensionError("hyperbolic perceptron: label count");
  check_binary_labels(labels);
  for (Index i = 0; i < n; ++i)
    check_point(form, points.row(i).transpose(),
                ("hyperbolic perceptron row " + std::to_string(i)).c_str());
  if (max_updates <= 0) max_updates = std::numeric_limits<long>::max();

  HyperbolicPerceptron state;
  state.w = Vector::Zero(points.cols());
  while (true) {
    ++state.passes;
    long mistakes = 0;
    for (Index m = 0; m < n; ++m) {
      const auto x = points.row(m).transpose();
      if (sign3(lorentz_product(state.w, x)) == labels(m)) continue;
      // The budget caps updates made, so a run that spends exactly the
      // budget still gets its clean verification pass.
      if (state.updates >= max_updates) return state;
      ++mistakes;
      ++state.updates;
      // w += y H x
      state.w(0) -= labels(m) * x(0);
      state.w.tail(x.size() - 1) += double(labels(m)) * x.tail(x.size() - 1);
    }
    if (mistakes == 0) {
      state.converged = true;
      return state;
    }
  }
}

EuclideanPerceptron train_euclidean_perceptron(const Matrix& points,
                                               const IntVector& labels,
                                               long max_updates,
                                               TrainTrace* trace) {
  const Index n = points.rows();
  if (n == 0) throw ParameterError("euclidean perceptron: empty dataset");
  if (labels.size() != n)
    throw DimensionError("euclidean perceptron: label count");
  check_binary_labels(labels);
  if (max_updates <= 0) max_updates = std::numeric_limits<long>::max();

  EuclideanPerceptron state;
  state.w = Vector::Zero(points.cols());
  Vector d = Vector::Zero(n);
  TraceRecorder rec{trace};
  bool done = false;
  while (!done) {
    long mistakes = 0;
    for (Index m = 0; m < n; ++m) {
      const auto x = points.row(m).transpose();
      if (sign3(state.w.dot(x) + state.b) == labels(m)) continue;
      if (state.updates >= max_updates) { done = true; break; }
      ++mistakes;
      ++state.updates;
      state.w += double(labels(m)) * x;
      state.b += labels(m);
      if (rec.out) {
        d = points * state.w;
        d.array() += state.b;
        rec.push(state.updates, binary_macro_f1(d, labels));
      }
    }
    if (!done && mistakes == 0) {
      state.converged = true;
      done = true;
    }
  }
  d = points * state.w;
  d.array() += state.b;
  rec.finish(state.updates, binary_macro_f1(d, labels));
  return state;
}

WeberStep weber_step(const Vector& w, const Vector& x, int y) {
  if (y != 1 && y != -1) throw ParameterError("weber_step: y not in ±1");
  if (w.size() != x.size()) throw DimensionError("weber_step: sizes");
  WeberStep s;
  s.u = w + double(y) * x;
  s.u_self = lorentz_product(s.u, s.u);
  if (s.u_self <= 0) {
    // min{1, sqrt([u,u])} is 0 or imaginary: the normalization is
    // undefined. Hand back u so callers can decide how to proceed.
    s.degenerate = true;
    s.next = s.u;
    return s;
  }
  s.next = s.u / std::min(1.0, std::sqrt(s.u_self));
  return s;
}

int WeberTrainResult::predict_one(const Vector& x) const {
  return -lorentz_product(w, x) > 0 ? 1 : -1;
}

WeberTrainResult train_weber(const Matrix& points, const IntVector& labels,
                             long max_updates) {
  const Index n = points.rows();
  if (n == 0) throw ParameterError("weber: empty dataset");
  if (labels.size() != n) throw DimensionError("weber: label count");
  check_binary_labels(labels);
  if (max_updates <= 0) max_updates = std::numeric_limits<long>::max();

  WeberTrainResult state;
  state.w = Vector::Zero(points.cols());
  while (true) {
    long mistakes = 0;
    for (Index m = 0; m < n; ++m) {
      const auto x = points.row(m).transpose();
      if (sign3(-lorentz_product(state.w, x)) == labels(m)) continue;
      if (state.updates >= max_updates) return state;
      ++mistakes;
      ++state.updates;
      const WeberStep s = weber_step(state.w, x, labels(m));
      if (s.degenerate) {
        ++state.degenerate_events;
        state.w = s.u;
      } else {
        state.w = s.next;
      }
    }
    if (mistakes == 0) {
      state.converged = true;
      return state;
    }
  }
}

}  // namespace spaceform
