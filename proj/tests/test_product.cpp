#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spaceform/product.hpp"
#include "spaceform/rng.hpp"

using namespace spaceform;

namespace {

Signature esh() { return parse_signature("E2xS2xH2"); }

Vector random_block_point(const SpaceForm& f, Rng& rng) {
  switch (f.kind) {
    case Kind::euclidean:
      return rng.normal_vector(f.dim);
    case Kind::spherical: {
      Vector z = rng.normal_vector(f.ambient());
      while (z.norm() < 1e-6) z = rng.normal_vector(f.ambient());
      return project_to_sphere(z, f.curvature);
    }
    case Kind::hyperbolic:
      return lift_to_hyperboloid(rng.normal_vector(f.dim), f.curvature);
  }
  return Vector();
}

Vector random_product_point(const Signature& sig, Rng& rng) {
  Vector x(sig.ambient());
  for (std::size_t k = 0; k < sig.size(); ++k)
    sig.block(k, x) = random_block_point(sig.blocks[k], rng);
  return x;
}

// Pairs with every spherical block clear of the cut locus, so log is
// well-conditioned and the roundtrip tolerance meaningful.
std::pair<Vector, Vector> random_pair(const Signature& sig, Rng& rng) {
  const Vector x = random_product_point(sig, rng);
  for (int tries = 0; tries < 1000; ++tries) {
    Vector y = random_product_point(sig, rng);
    bool ok = true;
    for (std::size_t k = 0; k < sig.size(); ++k) {
      const auto& b = sig.blocks[k];
      if (b.kind != Kind::spherical) continue;
      const double cut = 3.14159265358979323846 / std::sqrt(b.curvature);
      if (distance(b, Vector(sig.block(k, x)), Vector(sig.block(k, y))) >
          0.9 * cut)
        ok = false;
    }
    if (ok) return {x, y};
  }
  REQUIRE(false);
  return {x, x};
}

}  // namespace

TEST_CASE("signature parse and compact form roundtrip") {
  const Signature sig = esh();
  REQUIRE(sig.size() == 3);
  CHECK(sig.blocks[0].kind == Kind::euclidean);
  CHECK(sig.blocks[1].kind == Kind::spherical);
  CHECK(sig.blocks[2].kind == Kind::hyperbolic);
  CHECK(sig.blocks[0].dim == 2);
  CHECK(sig.blocks[1].curvature == 1.0);
  CHECK(sig.blocks[2].curvature == -1.0);
  CHECK(sig.alphas == Vector::Ones(3));
  CHECK(sig.str() == "E2xS2xH2");
  CHECK(parse_signature("e2xs2xh2").str() == "E2xS2xH2");
  CHECK(parse_signature(sig.str()) == sig);

  // Repeated kinds are a legal signature, not one-of-each.
  const Signature twin = parse_signature("S2xS3");
  CHECK(twin.size() == 2);
  CHECK(twin.str() == "S2xS3");
  CHECK(twin.ambient() == 7);
}

TEST_CASE("signature parse rejects malformed text") {
  CHECK_THROWS_AS(parse_signature(""), ParseError);
  CHECK_THROWS_AS(parse_signature("Q2"), ParseError);
  CHECK_THROWS_AS(parse_signature("E"), ParseError);
  CHECK_THROWS_AS(parse_signature("E2x"), ParseError);
  CHECK_THROWS_AS(parse_signature("E2yS2"), ParseError);
  // Dimension bounds come from the space-form invariants.
  CHECK_THROWS_AS(parse_signature("S1"), ParameterError);
  CHECK_THROWS_AS(parse_signature("E0"), ParameterError);
}

TEST_CASE("signature validation") {
  CHECK_THROWS_AS(Signature(std::vector<SpaceForm>{}), ParameterError);

  std::vector<SpaceForm> blocks{SpaceForm::euclidean(2),
                                SpaceForm::sphere(2)};
  CHECK_THROWS_AS(Signature(blocks, Vector::Ones(3)), DimensionError);
  Vector bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(Signature(blocks, bad), ParameterError);
  bad << 1.0, -0.5;
  CHECK_THROWS_AS(Signature(blocks, bad), ParameterError);
}

TEST_CASE("layout arithmetic") {
  const Signature sig = esh();
  CHECK(sig.ambient() == 8);  // 2 + 3 + 3
  CHECK(sig.dim() == 6);
  CHECK(sig.offset(0) == 0);
  CHECK(sig.offset(1) == 2);
  CHECK(sig.offset(2) == 5);

  Vector x(8);
  x << 0, 1, 2, 3, 4, 5, 6, 7;
  CHECK(Vector(sig.block(1, x))(0) == 2.0);
  CHECK(Vector(sig.block(2, x))(2) == 7.0);
  sig.block(0, x).setZero();
  CHECK(x(0) == 0.0);
  CHECK(x(2) == 2.0);
}

TEST_CASE("product distance closed cases") {
  // Pythagoras across blocks: distances (3,4,0) at unit weights give 5.
  const Signature sig = parse_signature("E2xE2xE2");
  Vector x = Vector::Zero(6), y = Vector::Zero(6);
  y(0) = 3;
  y(2) = 4;
  CHECK(product_distance(sig, x, y) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(product_distance(sig, x, x) == 0.0);
  CHECK(product_distance(sig, y, x) ==
        doctest::Approx(product_distance(sig, x, y)).epsilon(1e-15));

  // Weighted: alphas (2,1), block distances (1,1) give sqrt(5).
  Vector alphas(2);
  alphas << 2.0, 1.0;
  const Signature weighted(
      {SpaceForm::euclidean(2), SpaceForm::euclidean(2)}, alphas);
  Vector a = Vector::Zero(4), b = Vector::Zero(4);
  b(0) = 1;
  b(2) = 1;
  CHECK(product_distance(weighted, a, b) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("product distance matches blockwise recomputation") {
  Vector alphas(3);
  alphas << 0.7, 1.3, 2.1;
  const Signature sig({SpaceForm::euclidean(2), SpaceForm::sphere(2),
                       SpaceForm::hyperbolic(2, -0.5)},
                      alphas);
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const Vector x = random_product_point(sig, rng);
    const Vector y = random_product_point(sig, rng);
    double sq = 0;
    for (std::size_t k = 0; k < sig.size(); ++k) {
      const double dk = distance(sig.blocks[k], Vector(sig.block(k, x)),
                                 Vector(sig.block(k, y)));
      sq += alphas(Index(k)) * alphas(Index(k)) * dk * dk;
    }
    CHECK(product_distance(sig, x, y) ==
          doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
  }
}

TEST_CASE("product exp/log roundtrip") {
  const Signature sig = esh();
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const auto [x, y] = random_pair(sig, rng);
    const Vector v = product_log(sig, x, y);
    const Vector back = product_exp(sig, x, v);
    REQUIRE((back - y).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("product exp of zero tangent and single-block degeneracy") {
  const Signature sig = esh();
  Rng rng(7);
  const Vector p = random_product_point(sig, rng);
  CHECK((product_exp(sig, p, Vector::Zero(8)) - p).norm() == 0.0);
  // log at the base point only vanishes to projection roundoff.
  CHECK(product_log(sig, p, p).norm() <= 1e-12);

  // One-block product delegates to the geometry ops verbatim.
  const Signature solo({SpaceForm::hyperbolic(3)});
  const SpaceForm form = SpaceForm::hyperbolic(3);
  const Vector q = random_block_point(form, rng);
  const Vector r = random_block_point(form, rng);
  CHECK((product_log(solo, q, r) - log_map(form, q, r)).norm() == 0.0);
  const Vector v = log_map(form, q, r);
  CHECK((product_exp(solo, q, v) - exp_map(form, q, v)).norm() == 0.0);
  CHECK(product_distance(solo, q, r) ==
        doctest::Approx(distance(form, q, r)).epsilon(1e-15));
}

TEST_CASE("triangle inequality on random triples") {
  const Signature sig = esh();
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_product_point(sig, rng);
    const Vector y = random_product_point(sig, rng);
    const Vector z = random_product_point(sig, rng);
    CHECK(product_distance(sig, x, z) <=
          product_distance(sig, x, y) + product_distance(sig, y, z) + 1e-10);
  }
}

TEST_CASE("product metric") {
  const Signature sig = esh();
  Rng rng(13);
  const Vector p = random_product_point(sig, rng);
  CHECK(product_metric(sig, Vector::Zero(8), Vector::Zero(8)) == 0.0);

  // Direct-sum structure: disjoint block supports never interact.
  Vector u = Vector::Zero(8), v = Vector::Zero(8);
  u(0) = 2.5;
  v(3) = 1.0;
  v(2) = 0.0;
  CHECK(product_metric(sig, u, v) == 0.0);

  const Signature solo({SpaceForm::euclidean(4)});
  const Vector a = rng.normal_vector(4), b = rng.normal_vector(4);
  CHECK(product_metric(solo, a, b) ==
        doctest::Approx(a.dot(b)).epsilon(1e-15));

  // Weighted sum against blockwise evaluation.
  Vector alphas(3);
  alphas << 0.5, 2.0, 3.0;
  const Signature weighted({SpaceForm::euclidean(2), SpaceForm::sphere(2),
                            SpaceForm::hyperbolic(2)},
                           alphas);
  const Vector s = rng.normal_vector(8), w = rng.normal_vector(8);
  double acc = 0;
  for (std::size_t k = 0; k < weighted.size(); ++k)
    acc += alphas(Index(k)) *
           metric(weighted.blocks[k], Vector(weighted.block(k, s)),
                  Vector(weighted.block(k, w)));
  CHECK(product_metric(weighted, s, w) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("product point checks name the failing block") {
  const Signature sig = esh();
  Rng rng(41);
  const Vector good = random_product_point(sig, rng);
  CHECK_NOTHROW(check_product_point(sig, good));

  CHECK_THROWS_AS(check_product_point(sig, Vector::Zero(7)), DimensionError);

  Vector bad = good;
  bad(3) += 0.1;  // spherical block off the sphere
  try {
    check_product_point(sig, bad);
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("block 1") != std::string::npos);
  }
}
