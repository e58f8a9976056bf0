#include "spaceform/classify.hpp"

#include <cmath>

namespace spaceform {

namespace {

void check_spherical_weight(const Vector& w, double curvature) {
  if (!(curvature > 0)) throw ParameterError("spherical weight: C <= 0");
  const double ww = w.dot(w);
  if (std::abs(ww - curvature) > tol::weights * curvature)
    throw ParameterError("spherical weight: <w,w> != C");
}

void check_hyperbolic_weight(const Vector& w, double curvature) {
  if (!(curvature < 0)) throw ParameterError("hyperbolic weight: C >= 0");
  const double ww = lorentz_product(w, w);
  if (!(ww > 0))
    throw ParameterError("hyperbolic weight: w must be time-like");
  if (std::abs(ww + curvature) > tol::weights * (-curvature))
    throw ParameterError("hyperbolic weight: [w,w] != -C");
}

}  // namespace

double spherical_decision(const Vector& w, const Vector& x, double curvature) {
  if (w.size() != x.size()) throw DimensionError("spherical_decision: sizes");
  check_spherical_weight(w, curvature);
  return std::asin(clamp_unit(w.dot(x)));
}

double hyperbolic_decision(const Vector& w, const Vector& x,
                           double curvature) {
  if (w.size() != x.size()) throw DimensionError("hyperbolic_decision: sizes");
  check_hyperbolic_weight(w, curvature);
  return std::asinh(lorentz_product(w, x));
}

double spherical_boundary_distance(const Vector& w, const Vector& x,
                                   double curvature) {
  return std::abs(spherical_decision(w, x, curvature)) / std::sqrt(curvature);
}

double hyperbolic_boundary_distance(const Vector& w, const Vector& x,
                                    double curvature) {
  return std::abs(hyperbolic_decision(w, x, curvature)) /
         std::sqrt(-curvature);
}

Vector spherical_base_point(const Vector& w, const Vector& x,
                            double curvature) {
  if (w.size() != x.size()) throw DimensionError("spherical_base_point");
  check_spherical_weight(w, curvature);
  const Vector proj = x - (x.dot(w) / w.dot(w)) * w;
  const double n = proj.norm();
  if (n < 1e-12)
    throw SingularityError("spherical_base_point: x on the pole set of w");
  return proj / (std::sqrt(curvature) * n);
}

Vector hyperbolic_base_point(const Vector& w, const Vector& x,
                             double curvature) {
  if (w.size() != x.size()) throw DimensionError("hyperbolic_base_point");
  check_hyperbolic_weight(w, curvature);
  const Vector proj = x - (lorentz_product(x, w) / lorentz_product(w, w)) * w;
  // w is time-like, so its complement carries a hyperbolic position vector:
  // [proj,proj] < 0 away from the degenerate set.
  const double pp = -lorentz_product(proj, proj);
  if (pp < 1e-24)
    throw SingularityError("hyperbolic_base_point: degenerate projection");
  return proj / (std::sqrt(-curvature) * std::sqrt(pp));
}

void ClassifierParams::validate() const {
  sig.validate();
  if (weights.size() != sig.size())
    throw DimensionError("params: one weight block per signature block");
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const SpaceForm& f = sig.blocks[k];
    if (weights[k].size() != f.ambient())
      throw DimensionError("params: weight block " + std::to_string(k) +
                           " has wrong ambient size");
    switch (f.kind) {
      case Kind::euclidean: {
        // alpha_E is absorbed: |w_E| must equal the block weight.
        const double a = sig.alphas(Index(k));
        if (std::abs(weights[k].norm() - a) > tol::weights * a)
          throw ParameterError("params: euclidean block norm != alpha");
        break;
      }
      case Kind::spherical:
        check_spherical_weight(weights[k], f.curvature);
        break;
      case Kind::hyperbolic:
        check_hyperbolic_weight(weights[k], f.curvature);
        break;
    }
  }
}

Vector ClassifierParams::concatenated() const {
  Vector out(sig.ambient());
  for (std::size_t k = 0; k < sig.size(); ++k) sig.block(k, out) = weights[k];
  return out;
}

double product_decision(const ClassifierParams& params, const Vector& x) {
  const Signature& sig = params.sig;
  if (params.weights.size() != sig.size())
    throw DimensionError("product_decision: params/signature mismatch");
  if (x.size() != sig.ambient())
    throw DimensionError("product_decision: point has wrong ambient size");
  double acc = params.bias;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const auto xk = sig.block(k, x);
    const Vector& wk = params.weights[k];
    if (wk.size() != xk.size())
      throw DimensionError("product_decision: weight block size");
    const double a = sig.alphas(Index(k));
    switch (sig.blocks[k].kind) {
      case Kind::euclidean: acc += wk.dot(xk); break;
      case Kind::spherical: acc += a * std::asin(clamp_unit(wk.dot(xk))); break;
      case Kind::hyperbolic:
        acc += a * std::asinh(lorentz_product(wk, xk));
        break;
    }
  }
  return acc;
}

int predict(const ClassifierParams& params, const Vector& x) {
  return product_decision(params, x) > 0 ? 1 : -1;
}

double margin_surrogate(const ClassifierParams& params, const Vector& x,
                        int y) {
  if (y != 1 && y != -1) throw ParameterError("margin_surrogate: y not in ±1");
  return y * product_decision(params, x);
}

}  // namespace spaceform
