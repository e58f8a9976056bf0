#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spaceform/geometry.hpp"
#include "spaceform/rng.hpp"

using namespace spaceform;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Random on-manifold point via the same primitives the library exposes;
// randomness here only feeds property checks.
Vector random_point(const SpaceForm& f, Rng& rng) {
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

}  // namespace

TEST_CASE("lorentz product sign convention") {
  CHECK(lorentz_product(vec3(1, 0, 0), vec3(1, 0, 0)) == -1.0);
  CHECK(lorentz_product(vec3(std::sqrt(2.0), 1, 0), vec3(0, 1, 0)) == 1.0);
  CHECK(lorentz_product(vec3(std::sqrt(2.0), 1, 0),
                        vec3(std::sqrt(2.0), 1, 0)) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  Vector two(2);
  two << 1, 1;
  CHECK_THROWS_AS(lorentz_product(two, vec3(1, 0, 0)), DimensionError);
}

TEST_CASE("lorentz product is symmetric and bilinear") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Vector u = rng.normal_vector(4), v = rng.normal_vector(4),
                 w = rng.normal_vector(4);
    const double a = rng.normal();
    CHECK(lorentz_product(u, v) ==
          doctest::Approx(lorentz_product(v, u)).epsilon(1e-12));
    CHECK(lorentz_product(u + a * w, v) ==
          doctest::Approx(lorentz_product(u, v) + a * lorentz_product(w, v))
              .epsilon(1e-12));
  }
}

TEST_CASE("distance closed forms") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  CHECK(distance(s2, vec3(1, 0, 0), vec3(0, 1, 0)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-14));

  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  CHECK(distance(h2, vec3(1, 0, 0), vec3(1, 0, 0)) == 0.0);
  CHECK(distance(h2, vec3(1, 0, 0), vec3(std::sqrt(2.0), 1, 0)) ==
        doctest::Approx(std::acosh(std::sqrt(2.0))).epsilon(1e-12));

  const SpaceForm e3 = SpaceForm::euclidean(3);
  CHECK(distance(e3, vec3(1, 2, 3), vec3(1, 2, 3)) == 0.0);
  CHECK(distance(e3, vec3(0, 0, 0), vec3(3, 4, 0)) == doctest::Approx(5.0));
}

TEST_CASE("exp map quarter circle and hyperbolic step") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  const Vector p = vec3(1, 0, 0);
  const Vector e2q = vec3(0, M_PI / 2, 0);
  const Vector q = exp_map(s2, p, e2q);
  CHECK(q(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q(1) == doctest::Approx(1.0).epsilon(1e-12));

  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  const Vector v = vec3(0, std::asinh(1.0), 0);
  const Vector x = exp_map(h2, vec3(1, 0, 0), v);
  CHECK(x(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x(2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exp of zero tangent is the base point exactly") {
  Rng rng(3);
  for (const SpaceForm& f :
       {SpaceForm::sphere(3, 0.25), SpaceForm::hyperbolic(3, -0.25),
        SpaceForm::euclidean(3)}) {
    const Vector p = random_point(f, rng);
    const Vector z = Vector::Zero(f.ambient());
    CHECK((exp_map(f, p, z) - p).norm() == 0.0);
  }
}

TEST_CASE("log map inverts exp on the book examples") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  const Vector v = log_map(s2, vec3(1, 0, 0), vec3(0, 1, 0));
  CHECK(v(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(M_PI / 2).epsilon(1e-12));

  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  const Vector u =
      log_map(h2, vec3(1, 0, 0), vec3(std::sqrt(2.0), 1, 0));
  CHECK(u(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(u(1) == doctest::Approx(std::asinh(1.0)).epsilon(1e-12));

  CHECK(log_map(h2, vec3(1, 0, 0), vec3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("antipodal spherical log is a singularity") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  CHECK_THROWS_AS(log_map(s2, vec3(1, 0, 0), vec3(-1, 0, 0)),
                  SingularityError);
}

TEST_CASE("roundtrip exp(log) across curvatures and dims") {
  Rng rng(77);
  for (const double mag : {1.0, 0.25})
    for (int d = 2; d <= 5; ++d) {
      const SpaceForm forms[] = {SpaceForm::sphere(d, mag),
                                 SpaceForm::hyperbolic(d, -mag)};
      for (const SpaceForm& f : forms)
        for (int t = 0; t < 200; ++t) {
          const Vector p = random_point(f, rng);
          Vector x = random_point(f, rng);
          // Stay away from the spherical cut locus.
          if (f.kind == Kind::spherical)
            while (distance(f, p, x) >
                   0.9 * M_PI / std::sqrt(f.curvature))
              x = random_point(f, rng);
          const Vector v = log_map(f, p, x);
          const Vector back = exp_map(f, p, v);
          CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
          CHECK(std::abs(manifold_residual(f, back)) < 1e-10);
          // Tangent norm equals the geodesic distance.
          CHECK(tangent_norm(f, v) ==
                doctest::Approx(distance(f, p, x)).epsilon(1e-8));
        }
    }
}

TEST_CASE("distance of exp equals tangent norm below injectivity radius") {
  Rng rng(5);
  const SpaceForm s3 = SpaceForm::sphere(3, 0.25);
  const SpaceForm h3 = SpaceForm::hyperbolic(3, -1.0);
  for (int t = 0; t < 100; ++t) {
    for (const SpaceForm& f : {s3, h3}) {
      const Vector p = random_point(f, rng);
      Vector v = tangent_project(f, p, rng.normal_vector(f.ambient()));
      const double n = tangent_norm(f, v);
      if (n < 1e-9) continue;
      double target = 0.5;
      if (f.kind == Kind::spherical)
        target = 0.9 * M_PI / std::sqrt(f.curvature) / 2;
      v *= target / n;
      CHECK(distance(f, p, exp_map(f, p, v)) ==
            doctest::Approx(target).epsilon(1e-9));
    }
  }
}

TEST_CASE("metric against distance") {
  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  CHECK(metric(h2, vec3(0, 1, 0), vec3(0, 1, 0)) == 1.0);
  const Vector p = vec3(std::sqrt(2.0), 1, 0);
  const Vector v = log_map(h2, p, vec3(1, 0, 0));
  CHECK(metric(h2, v, v) ==
        doctest::Approx(std::pow(std::acosh(std::sqrt(2.0)), 2))
            .epsilon(1e-10));

  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  CHECK(metric(s2, vec3(0, 1, 0), vec3(0, 0, 1)) == 0.0);
}

TEST_CASE("projection helpers") {
  CHECK((project_to_sphere(vec3(2, 0, 0), 1.0) - vec3(1, 0, 0)).norm() ==
        0.0);
  CHECK((project_to_sphere(vec3(0, 3, 0), 4.0) - vec3(0, 0.5, 0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(project_to_sphere(vec3(0, 0, 0), 1.0), DomainError);

  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const double c = 0.3 + rng.uniform();
    const Vector x = project_to_sphere(rng.normal_vector(4), c);
    CHECK(x.dot(x) == doctest::Approx(1.0 / c).epsilon(1e-12));
  }

  Vector z0(2);
  z0 << 0, 0;
  CHECK((lift_to_hyperboloid(z0, -1.0) - vec3(1, 0, 0)).norm() == 0.0);
  Vector z1(2);
  z1 << 1, 0;
  CHECK((lift_to_hyperboloid(z1, -1.0) - vec3(std::sqrt(2.0), 1, 0))
            .norm() == doctest::Approx(0.0).epsilon(1e-15));
  for (int t = 0; t < 20; ++t) {
    const double c = -(0.3 + rng.uniform());
    const Vector x = lift_to_hyperboloid(rng.normal_vector(3, 2.0), c);
    CHECK(lorentz_product(x, x) ==
          doctest::Approx(1.0 / c).epsilon(1e-12));
    CHECK(x(0) > 0);
  }
}

TEST_CASE("membership checks reject off-manifold points") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  CHECK_THROWS_AS(check_point(s2, vec3(1.1, 0, 0)), DomainError);
  CHECK_NOTHROW(check_point(s2, vec3(1, 0, 0)));

  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  CHECK_THROWS_AS(check_point(h2, vec3(-1, 0, 0)), DomainError);  // lower sheet
  Vector bad = vec3(1, 0, 0);
  bad(0) += 1e-4;
  CHECK_THROWS_AS(check_point(h2, bad), DomainError);
  CHECK_THROWS_AS(check_point(h2, vec3(1, 0, 0).head(2)), DimensionError);
}

TEST_CASE("series fallback region stays smooth") {
  const SpaceForm s2 = SpaceForm::sphere(2, 1.0);
  const Vector p = vec3(1, 0, 0);
  const Vector tiny = vec3(0, 1e-9, 0);
  const Vector q = exp_map(s2, p, tiny);
  const Vector back = log_map(s2, p, q);
  CHECK((back - tiny).norm() < 1e-15);

  const SpaceForm h2 = SpaceForm::hyperbolic(2, -1.0);
  const Vector qh = exp_map(h2, p, tiny);
  CHECK((log_map(h2, p, qh) - tiny).norm() < 1e-15);
}

TEST_CASE("space form validation") {
  CHECK_THROWS_AS(SpaceForm::sphere(2, -1.0), ParameterError);
  CHECK_THROWS_AS(SpaceForm::hyperbolic(2, 1.0), ParameterError);
  CHECK_THROWS_AS(SpaceForm::sphere(1, 1.0), ParameterError);  // dim >= 2
  CHECK_THROWS_AS(SpaceForm::euclidean(0), ParameterError);
  CHECK_NOTHROW(SpaceForm::euclidean(1));
}
