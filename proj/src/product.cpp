#include "spaceform/product.hpp"

#include <cctype>
#include <cmath>

namespace spaceform {

std::string Signature::str() const {
  std::string out;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (k) out += 'x';
    switch (blocks[k].kind) {
      case Kind::euclidean: out += 'E'; break;
      case Kind::spherical: out += 'S'; break;
      case Kind::hyperbolic: out += 'H'; break;
    }
    out += std::to_string(blocks[k].dim);
  }
  return out;
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t k = 0; k < a.blocks.size(); ++k)
    if (!(a.blocks[k] == b.blocks[k])) return false;
  return a.alphas.size() == b.alphas.size() && a.alphas == b.alphas;
}

Signature parse_signature(const std::string& text) {
  std::vector<SpaceForm> blocks;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i++];
    Kind kind;
    if (c == 'E' || c == 'e') kind = Kind::euclidean;
    else if (c == 'S' || c == 's') kind = Kind::spherical;
    else if (c == 'H' || c == 'h') kind = Kind::hyperbolic;
    else throw ParseError("signature: unknown block kind '" +
                          std::string(1, c) + "' in \"" + text + "\"");
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
      ++j;
    if (j == i) throw ParseError("signature: missing dimension in \"" + text +
                                 "\"");
    const int dim = std::stoi(text.substr(i, j - i));
    i = j;
    if (i < text.size()) {
      if (text[i] != 'x' && text[i] != 'X')
        throw ParseError("signature: expected 'x' separator in \"" + text +
                         "\"");
      ++i;
      if (i == text.size())
        throw ParseError("signature: trailing separator in \"" + text + "\"");
    }
    switch (kind) {
      case Kind::euclidean: blocks.push_back(SpaceForm::euclidean(dim)); break;
      case Kind::spherical: blocks.push_back(SpaceForm::sphere(dim)); break;
      case Kind::hyperbolic:
        blocks.push_back(SpaceForm::hyperbolic(dim));
        break;
    }
  }
  if (blocks.empty()) throw ParseError("signature: empty");
  return Signature(std::move(blocks));
}

double product_distance(const Signature& sig, const Vector& x,
                        const Vector& y) {
  if (x.size() != sig.ambient() || y.size() != sig.ambient())
    throw DimensionError("product_distance: size mismatch");
  double acc = 0;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const double dk = distance(sig.blocks[k], sig.block(k, x), sig.block(k, y));
    const double a = sig.alphas(Index(k));
    acc += a * a * dk * dk;
  }
  return std::sqrt(acc);
}

Vector product_exp(const Signature& sig, const Vector& p, const Vector& v) {
  if (p.size() != sig.ambient() || v.size() != sig.ambient())
    throw DimensionError("product_exp: size mismatch");
  Vector out(sig.ambient());
  for (std::size_t k = 0; k < sig.size(); ++k)
    sig.block(k, out) = exp_map(sig.blocks[k], sig.block(k, p),
                                sig.block(k, v));
  return out;
}

Vector product_log(const Signature& sig, const Vector& p, const Vector& x) {
  if (p.size() != sig.ambient() || x.size() != sig.ambient())
    throw DimensionError("product_log: size mismatch");
  Vector out(sig.ambient());
  for (std::size_t k = 0; k < sig.size(); ++k)
    sig.block(k, out) = log_map(sig.blocks[k], sig.block(k, p),
                                sig.block(k, x));
  return out;
}

double product_metric(const Signature& sig, const Vector& u, const Vector& v) {
  if (u.size() != sig.ambient() || v.size() != sig.ambient())
    throw DimensionError("product_metric: size mismatch");
  double acc = 0;
  for (std::size_t k = 0; k < sig.size(); ++k)
    acc += sig.alphas(Index(k)) *
           metric(sig.blocks[k], sig.block(k, u), sig.block(k, v));
  return acc;
}

}  // namespace spaceform
