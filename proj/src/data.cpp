#include "spaceform/data.hpp"

#include <cmath>

#include "spaceform/rng.hpp"

namespace spaceform {

void LabeledData::validate() const {
  sig.validate();
  if (points.cols() != sig.ambient())
    throw DataError("dataset: " + std::to_string(points.cols()) +
                    " columns, signature needs " +
                    std::to_string(sig.ambient()));
  if (labels.size() != points.rows())
    throw DataError("dataset: label count does not match point count");
  for (Index i = 0; i < points.rows(); ++i) {
    for (std::size_t k = 0; k < sig.size(); ++k) {
      const auto xk = sig.block(k, points.row(i).transpose());
      if (!is_on_manifold(sig.blocks[k], xk))
        throw DataError("dataset row " + std::to_string(i) + ": " +
                        kind_name(sig.blocks[k].kind) + " block " +
                        std::to_string(k) + " is off the manifold");
    }
  }
}

bool LabeledData::binary() const {
  for (Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 1 && labels(i) != -1) return false;
  return true;
}

LabeledData subset(const LabeledData& d, const std::vector<Index>& rows) {
  LabeledData out;
  out.sig = d.sig;
  out.points.resize(Index(rows.size()), d.points.cols());
  out.labels.resize(Index(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.points.row(Index(i)) = d.points.row(rows[i]);
    out.labels(Index(i)) = d.labels(rows[i]);
  }
  return out;
}

SplitIndices split_indices(Index n, double train_fraction,
                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ParameterError("split: train fraction must be in (0,1)");
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto cut =
      static_cast<std::size_t>(std::lround(double(n) * train_fraction));
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + long(cut));
  s.test.assign(order.begin() + long(cut), order.end());
  return s;
}

LabeledData flatten_euclidean(const LabeledData& d) {
  LabeledData out;
  out.sig = Signature({SpaceForm::euclidean(d.sig.ambient())});
  out.points = d.points;
  out.labels = d.labels;
  return out;
}

LabeledData flatten_tangent(const LabeledData& d) {
  Index dim = 0;
  for (const auto& b : d.sig.blocks) dim += b.dim;
  Vector base(d.sig.ambient());
  for (std::size_t k = 0; k < d.sig.size(); ++k) {
    const auto& b = d.sig.blocks[k];
    Vector v = Vector::Zero(b.ambient());
    if (b.kind != Kind::euclidean)
      v(0) = 1.0 / std::sqrt(std::abs(b.curvature));
    d.sig.block(k, base) = v;
  }
  LabeledData out;
  out.sig = Signature({SpaceForm::euclidean(dim)});
  out.points.resize(d.points.rows(), dim);
  out.labels = d.labels;
  for (Index i = 0; i < d.points.rows(); ++i) {
    const Vector t = product_log(d.sig, base, d.points.row(i).transpose());
    Index at = 0;
    for (std::size_t k = 0; k < d.sig.size(); ++k) {
      const auto& b = d.sig.blocks[k];
      const auto tk = d.sig.block(k, t);
      // At the canonical base the tangent plane is {v : v_0 = 0} for both
      // curved kinds, so the tail carries the intrinsic coordinates.
      const Index off = b.kind == Kind::euclidean ? 0 : 1;
      out.points.row(i).segment(at, b.dim) = tk.segment(off, b.dim).transpose();
      at += b.dim;
    }
  }
  return out;
}

std::vector<double> hyperbolic_radii(const LabeledData& d) {
  std::vector<double> radii;
  for (std::size_t k = 0; k < d.sig.size(); ++k) {
    if (d.sig.blocks[k].kind != Kind::hyperbolic) continue;
    double r = 0;
    for (Index i = 0; i < d.points.rows(); ++i)
      r = std::max(r,
                   d.sig.block(k, d.points.row(i).transpose()).norm());
    radii.push_back(r);
  }
  return radii;
}

double euclidean_radius(const LabeledData& d) {
  double r = 0;
  for (Index i = 0; i < d.points.rows(); ++i) {
    double acc = 0;
    for (std::size_t k = 0; k < d.sig.size(); ++k) {
      if (d.sig.blocks[k].kind != Kind::euclidean) continue;
      acc += d.sig.block(k, d.points.row(i).transpose()).squaredNorm();
    }
    r = std::max(r, std::sqrt(acc));
  }
  return r;
}

}  // namespace spaceform
