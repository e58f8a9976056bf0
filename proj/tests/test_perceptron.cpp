#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spaceform/datagen.hpp"
#include "spaceform/metrics.hpp"
#include "spaceform/perceptron.hpp"
#include "spaceform/rng.hpp"

using namespace spaceform;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector cat(const Vector& a, const Vector& b, const Vector& c) {
  Vector out(a.size() + b.size() + c.size());
  out << a, b, c;
  return out;
}

// Independent rewrite of the composite kernel used as a cross-check. The
// arcsine arguments are unit by construction up to roundoff; a plain clamp
// keeps the oracle finite on diagonal entries.
double kernel_oracle(const Signature& sig, const std::vector<double>& radii,
                     const Vector& x, const Vector& y) {
  const auto unit = [](double v) { return std::min(1.0, std::max(-1.0, v)); };
  double acc = 1.0;
  std::size_t h = 0;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const Vector xk = sig.block(k, x), yk = sig.block(k, y);
    const double a = sig.alphas(Index(k));
    if (sig.blocks[k].kind == Kind::euclidean) {
      acc += xk.dot(yk);
    } else if (sig.blocks[k].kind == Kind::spherical) {
      acc += a * std::asin(unit(sig.blocks[k].curvature * xk.dot(yk)));
    } else {
      const double R = radii[h++];
      acc += a * std::asin(unit(xk.dot(yk) / (R * R)));
    }
  }
  return acc;
}

LabeledData margin_data(std::uint64_t seed, Index n, double eps,
                        std::vector<double>* radii_out = nullptr,
                        double* bound_out = nullptr) {
  GenConfig cfg;
  cfg.sig = parse_signature("E2xS2xH2");
  cfg.n = n;
  cfg.epsilon = eps;
  cfg.seed = seed;
  const GenResult gen = generate_margin_dataset(cfg);
  if (radii_out) *radii_out = gen.radii;
  if (bound_out) *bound_out = gen.theoretical_bound;
  return gen.data;
}

}  // namespace

TEST_CASE("composite kernel frozen values") {
  const Signature sig = parse_signature("E2xS2xH2");
  // x = x', zero Euclidean part, |x_H| = R: both arcsines saturate.
  const Vector x =
      cat(vec2(0, 0), vec3(1, 0, 0), vec3(std::sqrt(2.0), 1, 0));
  const double R = std::sqrt(3.0);
  const ProductKernel kern(sig, {R});
  CHECK(kernel_eval(kern, x, x) ==
        doctest::Approx(1.0 + kPi).epsilon(1e-12));

  // Orthogonal parts in every block leave only the constant.
  const Vector a = cat(vec2(1, 0), vec3(1, 0, 0), vec3(0, 1, 0));
  const Vector b = cat(vec2(0, 1), vec3(0, 1, 0), vec3(0, 0, 1));
  const ProductKernel unit(sig, {1.0});
  CHECK(kernel_eval(unit, a, b) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(kernel_eval(unit, a, Vector::Zero(5)), DimensionError);
  CHECK_THROWS_AS(ProductKernel(sig, {}), DimensionError);
  CHECK_THROWS_AS(ProductKernel(sig, {-1.0}), ParameterError);
}

TEST_CASE("composite kernel matches an independent rewrite") {
  const LabeledData data = margin_data(17, 40, 0.1);
  const std::vector<double> radii = hyperbolic_radii(data);
  const ProductKernel kern(data.sig, radii);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      const Vector x = data.points.row(i).transpose();
      const Vector y = data.points.row(j).transpose();
      CHECK(kernel_eval(kern, x, y) ==
            doctest::Approx(kernel_oracle(data.sig, radii, x, y))
                .epsilon(1e-12));
      CHECK(kernel_eval(kern, x, y) ==
            doctest::Approx(kernel_eval(kern, y, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("product perceptron on margin data") {
  std::vector<double> radii;
  double bound = 0;
  const LabeledData data = margin_data(3, 60, 0.2, &radii, &bound);

  PerceptronConfig config;
  TrainTrace trace;
  config.record_trace = true;
  const PerceptronModel model = train_product_perceptron(data, config, &trace);

  CHECK(model.converged);
  CHECK(model.updates.size() >= 1);  // g_0 = 0 forces the first update
  CHECK(double(model.updates.size()) <= bound);
  CHECK(model.margin_certificate(data) > 0);

  IntVector preds(data.size());
  for (Index i = 0; i < data.size(); ++i)
    preds(i) = model.predict_one(data.points.row(i).transpose());
  CHECK(macro_f1(preds, data.labels) == 1.0);

  REQUIRE(!trace.f1_by_update.empty());
  CHECK(trace.f1_by_update.back().first == long(model.updates.size()));
  CHECK(trace.f1_by_update.back().second == 1.0);
}

TEST_CASE("product perceptron degenerate inputs") {
  const LabeledData one = subset(margin_data(5, 8, 0.2), {0});
  const PerceptronModel model = train_product_perceptron(one, {});
  CHECK(model.converged);
  CHECK(model.updates.size() == 1);
  CHECK(model.predict_one(one.points.row(0).transpose()) == one.labels(0));

  LabeledData empty = one;
  empty.points.resize(0, one.points.cols());
  empty.labels.resize(0);
  CHECK_THROWS_AS(train_product_perceptron(empty, {}), ParameterError);

  // A supplied radius below the data bound is a contract violation, not a
  // clamping opportunity.
  PerceptronConfig starved;
  starved.radii = {1e-6};
  CHECK_THROWS_AS(train_product_perceptron(one, starved), DomainError);
}

TEST_CASE("product perceptron is deterministic") {
  const LabeledData data = margin_data(7, 50, 0.1);
  const PerceptronModel a = train_product_perceptron(data, {});
  const PerceptronModel b = train_product_perceptron(data, {});
  REQUIRE(a.updates.size() == b.updates.size());
  for (std::size_t i = 0; i < a.updates.size(); ++i) {
    CHECK(a.updates[i].first == b.updates[i].first);
    CHECK(a.updates[i].second == b.updates[i].second);
  }
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.passes == b.passes);
}

TEST_CASE("single pass mode stops after one pass") {
  const LabeledData data = margin_data(9, 40, 0.05);
  PerceptronConfig config;
  config.single_pass = true;
  const PerceptronModel model = train_product_perceptron(data, config);
  CHECK(model.passes == 1);
}

TEST_CASE("update bound formula") {
  const Signature sig = parse_signature("E2xS2xH2");
  const ClassifierParams w_star(sig, 0.0,
                                {vec2(1, 0), vec3(1, 0, 0), vec3(0, 1, 0)});
  // alpha = 1 everywhere, R_E = 1, R |w_H| = 1: B = 2 + pi, Phi = 1 + pi.
  const double want = (2 + kPi) * (1 + kPi);
  CHECK(theoretical_update_bound(w_star, {1.0}, 1.0, 1.0) ==
        doctest::Approx(want).epsilon(1e-12));
  CHECK(theoretical_update_bound(w_star, {1.0}, 1.0, 0.1) ==
        doctest::Approx(want / 0.01).epsilon(1e-12));
  // Doubling eps quarters the bound.
  CHECK(theoretical_update_bound(w_star, {1.0}, 1.0, 0.2) ==
        doctest::Approx(theoretical_update_bound(w_star, {1.0}, 1.0, 0.1) / 4)
            .epsilon(1e-12));
  CHECK_THROWS_AS(theoretical_update_bound(w_star, {1.0}, 1.0, 0.0),
                  ParameterError);
  CHECK_THROWS_AS(theoretical_update_bound(w_star, {}, 1.0, 0.1),
                  DimensionError);
}

TEST_CASE("hyperbolic bound formula") {
  CHECK(hyperbolic_update_bound(1.0, 1.0, std::asinh(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const double s = std::sinh(0.1);
  CHECK(hyperbolic_update_bound(1.0, 2.0, 0.1) ==
        doctest::Approx(4.0 / (s * s)).epsilon(1e-12));
  // Small eps behaves like 1/eps^2.
  CHECK(hyperbolic_update_bound(1.0, 1.0, 1e-6) ==
        doctest::Approx(1e12).epsilon(1e-6));
  CHECK_THROWS_AS(hyperbolic_update_bound(1.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("hyperbolic perceptron single point step") {
  const SpaceForm form = SpaceForm::hyperbolic(2);
  Matrix pts(1, 3);
  pts.row(0) = vec3(std::sqrt(2.0), 1, 0);
  IntVector y(1);
  y << 1;
  const HyperbolicPerceptron model =
      train_hyperbolic_perceptron(form, pts, y);
  CHECK(model.converged);
  CHECK(model.updates == 1);
  CHECK((model.w - vec3(-std::sqrt(2.0), 1, 0)).norm() == 0.0);
  CHECK(lorentz_product(model.w, Vector(pts.row(0).transpose())) ==
        doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("hyperbolic perceptron forced two-update trajectory") {
  const SpaceForm form = SpaceForm::hyperbolic(2);
  Matrix pts(2, 3);
  pts.row(0) = vec3(std::sqrt(2.0), 1, 0);
  pts.row(1) = vec3(std::sqrt(2.0), 0, 1);
  IntVector y(2);
  y << 1, -1;
  const HyperbolicPerceptron model =
      train_hyperbolic_perceptron(form, pts, y);
  // Update 1: w = Hx1 = (-sqrt2,1,0); x2 then scores +2, a mistake for
  // y=-1; update 2: w = (0,1,-1). Both points are then correct.
  CHECK(model.converged);
  CHECK(model.updates == 2);
  CHECK((model.w - vec3(0, 1, -1)).norm() == 0.0);

  // The budget is checked before the update, so spending it exactly still
  // earns the clean verification pass.
  const HyperbolicPerceptron exact =
      train_hyperbolic_perceptron(form, pts, y, 2);
  CHECK(exact.converged);
  CHECK(exact.updates == 2);
  const HyperbolicPerceptron starved =
      train_hyperbolic_perceptron(form, pts, y, 1);
  CHECK(!starved.converged);
  CHECK(starved.updates == 1);
}

TEST_CASE("hyperbolic perceptron label flip negates the trajectory") {
  const SpaceForm form = SpaceForm::hyperbolic(2);
  Rng rng(19);
  const Index n = 30;
  Matrix pts(n, 3);
  for (Index i = 0; i < n; ++i)
    pts.row(i) = lift_to_hyperboloid(rng.normal_vector(2), -1.0);
  const Vector w_ref = vec3(0.3, 1.2, -0.4);  // [w,w] = 1.51 > 0
  IntVector y(n), neg(n);
  for (Index i = 0; i < n; ++i) {
    const double m = lorentz_product(w_ref, Vector(pts.row(i).transpose()));
    y(i) = m > 0 ? 1 : -1;
    neg(i) = -y(i);
  }
  const HyperbolicPerceptron a = train_hyperbolic_perceptron(form, pts, y);
  const HyperbolicPerceptron b = train_hyperbolic_perceptron(form, pts, neg);
  CHECK(a.updates == b.updates);
  CHECK((a.w + b.w).norm() == 0.0);

  // Termination certificate: every margin strictly positive.
  REQUIRE(a.converged);
  for (Index i = 0; i < n; ++i)
    CHECK(y(i) * a.decision(pts.row(i).transpose()) > 0);
}

TEST_CASE("hyperbolic perceptron stays within its bound on margin data") {
  Rng rng(29);
  const SpaceForm form = SpaceForm::hyperbolic(2);
  for (int trial = 0; trial < 20; ++trial) {
    Vector g = rng.normal_vector(3);
    while (lorentz_product(g, g) < 1e-3) g = rng.normal_vector(3);
    const Vector w_star = g / std::sqrt(lorentz_product(g, g));
    const double eps = 0.1 + 0.4 * rng.uniform();
    const double cut = std::sinh(eps);

    std::vector<Vector> kept;
    Rng pool(1000 + std::uint64_t(trial));
    while (kept.size() < 40) {
      const Vector x = lift_to_hyperboloid(pool.normal_vector(2), -1.0);
      if (std::abs(lorentz_product(w_star, x)) >= cut) kept.push_back(x);
    }
    Matrix pts(Index(kept.size()), 3);
    IntVector y(Index(kept.size()));
    double radius = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      pts.row(Index(i)) = kept[i];
      y(Index(i)) = lorentz_product(w_star, kept[i]) > 0 ? 1 : -1;
      radius = std::max(radius, kept[i].norm());
    }
    const double bound = hyperbolic_update_bound(radius, w_star.norm(), eps);
    const HyperbolicPerceptron model =
        train_hyperbolic_perceptron(form, pts, y);
    CHECK(model.converged);
    CHECK(double(model.updates) <= bound);
  }
}

TEST_CASE("weber step frozen counterexamples") {
  const double s2 = std::sqrt(2.0);
  const Vector x = vec3(s2, 1, 0);

  // The crafted separable instance where [u,u] lands exactly on zero.
  const Vector w0 = vec3((3 - s2) / 4, (3 * s2 - 1) / 4, 0);
  const WeberStep tangent = weber_step(w0, x, 1);
  CHECK(tangent.degenerate);
  CHECK(std::abs(tangent.u_self) <= 1e-12);

  // From w = 0 the first update hands back a manifold point, whose
  // self-product is 1/C = -1: the normalization would be complex.
  const WeberStep first = weber_step(Vector(Vector::Zero(3)), x, 1);
  CHECK(first.degenerate);
  CHECK(first.u_self == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK((first.u - x).norm() == 0.0);

  // [u,u] = 4: min{1,2} clamps at 1 and the update is unnormalized.
  const Vector w1 = vec3(0, std::sqrt(5.0), 0);
  const Vector apex = vec3(1, 0, 0);
  const WeberStep big = weber_step(w1, apex, 1);
  CHECK(!big.degenerate);
  CHECK(big.u_self == doctest::Approx(4.0).epsilon(1e-12));
  CHECK((big.next - big.u).norm() == 0.0);

  // [u,u] in (0,1) rescales up to the unit shell.
  const Vector w2 = vec3(0, 1.2, 0);
  const WeberStep small = weber_step(w2, apex, 1);
  CHECK(!small.degenerate);
  CHECK(small.u_self == doctest::Approx(0.44).epsilon(1e-12));
  CHECK(lorentz_product(small.next, small.next) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(weber_step(w0, x, 0), ParameterError);
}

TEST_CASE("weber trainer semantics") {
  Rng rng(37);
  const Index n = 25;
  Matrix pts(n, 3);
  for (Index i = 0; i < n; ++i)
    pts.row(i) = lift_to_hyperboloid(rng.normal_vector(2), -1.0);
  const Vector w_ref = vec3(0.1, -1.3, 0.2);
  IntVector y(n);
  for (Index i = 0; i < n; ++i)
    y(i) = -lorentz_product(w_ref, Vector(pts.row(i).transpose())) > 0 ? 1
                                                                       : -1;

  const WeberTrainResult r = train_weber(pts, y, 20000);
  // The first update from w = 0 is always degenerate.
  CHECK(r.degenerate_events >= 1);
  CHECK(r.updates >= 1);

  // predict_one scores with -[w,x] per the original sign convention.
  for (Index i = 0; i < std::min<Index>(n, 5); ++i) {
    const Vector x = pts.row(i).transpose();
    const int want = -lorentz_product(r.w, x) > 0 ? 1 : -1;
    CHECK(r.predict_one(x) == want);
  }

  const WeberTrainResult again = train_weber(pts, y, 20000);
  CHECK((r.w - again.w).norm() == 0.0);
  CHECK(r.updates == again.updates);
  CHECK(r.degenerate_events == again.degenerate_events);

  const WeberTrainResult capped = train_weber(pts, y, 3);
  CHECK(capped.updates <= 3);
}

TEST_CASE("euclidean baseline perceptron") {
  Matrix pts(4, 2);
  pts << 1, 1, 2, 0.5, -1, -1, -2, -0.3;
  IntVector y(4);
  y << 1, 1, -1, -1;
  TrainTrace trace;
  const EuclideanPerceptron model =
      train_euclidean_perceptron(pts, y, 0, &trace);
  CHECK(model.converged);
  CHECK(model.updates >= 1);
  for (Index i = 0; i < 4; ++i)
    CHECK(y(i) * model.decision(pts.row(i).transpose()) > 0);
  REQUIRE(!trace.f1_by_update.empty());
  CHECK(trace.f1_by_update.back().second == 1.0);
}
