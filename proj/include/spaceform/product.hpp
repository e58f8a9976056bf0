#pragma once

// Products of space forms. A Signature is an ordered list of factor blocks
// plus one positive weight per block; points and tangents are stored as a
// single ambient coordinate vector, sliced by block offset. All operators
// act blockwise, so any number of blocks of any kind is supported.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "spaceform/geometry.hpp"

namespace spaceform {

struct Signature {
  std::vector<SpaceForm> blocks;
  Vector alphas;  // metric weights, one per block, all > 0

  Signature() = default;
  Signature(std::vector<SpaceForm> b, Vector a)
      : blocks(std::move(b)), alphas(std::move(a)) {
    validate();
  }
  // Unit weights.
  explicit Signature(std::vector<SpaceForm> b)
      : blocks(std::move(b)), alphas(Vector::Ones(Index(blocks.size()))) {
    validate();
  }

  void validate() const {
    if (blocks.empty()) throw ParameterError("signature: no blocks");
    if (alphas.size() != Index(blocks.size()))
      throw DimensionError("signature: one alpha per block required");
    for (const auto& b : blocks) b.validate();
    for (Index k = 0; k < alphas.size(); ++k)
      if (!(alphas(k) > 0))
        throw ParameterError("signature: alphas must be positive");
  }

  std::size_t size() const { return blocks.size(); }

  int ambient() const {
    int n = 0;
    for (const auto& b : blocks) n += b.ambient();
    return n;
  }

  // Intrinsic manifold dimension, sum of block dims.
  int dim() const {
    int n = 0;
    for (const auto& b : blocks) n += b.dim;
    return n;
  }

  int offset(std::size_t k) const {
    int n = 0;
    for (std::size_t i = 0; i < k; ++i) n += blocks[i].ambient();
    return n;
  }

  // Block slice of a concatenated ambient vector.
  template <typename D>
  auto block(std::size_t k, Eigen::MatrixBase<D>& x) const {
    return x.segment(offset(k), blocks[k].ambient());
  }
  template <typename D>
  auto block(std::size_t k, const Eigen::MatrixBase<D>& x) const {
    return x.segment(offset(k), blocks[k].ambient());
  }

  // Compact text form, e.g. "E2xS2xH2".
  std::string str() const;
};

bool operator==(const Signature& a, const Signature& b);

// Parses "E2xS2xH2" style strings; spherical blocks default to curvature
// +1, hyperbolic to -1, weights to 1.
Signature parse_signature(const std::string& text);

template <typename D>
void check_product_point(const Signature& sig, const Eigen::MatrixBase<D>& x,
                         const char* who = "point") {
  if (x.size() != sig.ambient())
    throw DimensionError(std::string(who) + ": expected " +
                         std::to_string(sig.ambient()) + " coordinates, got " +
                         std::to_string(static_cast<long>(x.size())));
  for (std::size_t k = 0; k < sig.size(); ++k)
    check_point(sig.blocks[k], sig.block(k, x),
                (std::string(who) + " block " + std::to_string(k)).c_str());
}

// d(x,y) = sqrt(sum_k alpha_k^2 d_k(x_k,y_k)^2).
double product_distance(const Signature& sig, const Vector& x,
                        const Vector& y);

// Blockwise exponential; v is a concatenated tangent vector at p.
Vector product_exp(const Signature& sig, const Vector& p, const Vector& v);

// Blockwise logarithm.
Vector product_log(const Signature& sig, const Vector& p, const Vector& x);

// g_p(u,v) = sum_k alpha_k g_k(u_k, v_k).
double product_metric(const Signature& sig, const Vector& u, const Vector& v);

}  // namespace spaceform
