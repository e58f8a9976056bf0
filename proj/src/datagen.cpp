#include "spaceform/datagen.hpp"

#include "spaceform/perceptron.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

namespace spaceform {

namespace {

Vector sample_block_weight(const SpaceForm& form, double alpha, Rng& rng) {
  switch (form.kind) {
    case Kind::euclidean: {
      for (;;) {
        Vector g = rng.normal_vector(form.dim);
        const double n = g.norm();
        if (n > 1e-12) return (alpha / n) * g;
      }
    }
    case Kind::spherical: {
      for (;;) {
        Vector g = rng.normal_vector(form.ambient());
        const double n = g.norm();
        if (n > 1e-12) return (std::sqrt(form.curvature) / n) * g;
      }
    }
    case Kind::hyperbolic: {
      // Need a positive Lorentz self-product so the normalization
      // [w,w] = -C exists.
      for (;;) {
        Vector g = rng.normal_vector(form.ambient());
        const double s = lorentz_product(g, g);
        if (s > 1e-8) return std::sqrt(-form.curvature / s) * g;
      }
    }
  }
  throw ParameterError("sample_block_weight: unknown kind");
}

Vector sample_block_point(const SpaceForm& form, double scale, Rng& rng) {
  switch (form.kind) {
    case Kind::euclidean:
      return rng.normal_vector(form.dim, scale);
    case Kind::spherical: {
      for (;;) {
        Vector g = rng.normal_vector(form.ambient(), scale);
        if (g.norm() > 1e-12) return project_to_sphere(g, form.curvature);
      }
    }
    case Kind::hyperbolic:
      return lift_to_hyperboloid(rng.normal_vector(form.dim, scale),
                                 form.curvature);
  }
  throw ParameterError("sample_block_point: unknown kind");
}

ClassifierParams sample_w_star_impl(const Signature& sig, Rng& rng) {
  ClassifierParams params;
  params.sig = sig;
  params.bias = 0;
  for (std::size_t k = 0; k < sig.size(); ++k)
    params.weights.push_back(
        sample_block_weight(sig.blocks[k], sig.alphas(Index(k)), rng));
  return params;
}

}  // namespace

void GenConfig::validate() const {
  sig.validate();
  if (n < 1) throw ParameterError("datagen: need n >= 1");
  if (!(epsilon > 0)) throw ParameterError("datagen: need epsilon > 0");
  if (!(scale > 0)) throw ParameterError("datagen: need scale > 0");
  if (w_star) {
    if (!(w_star->sig == sig))
      throw ParameterError("datagen: fixed w* signature mismatch");
    w_star->validate();
  }
}

ClassifierParams sample_w_star(const Signature& sig, std::uint64_t seed) {
  sig.validate();
  Rng rng(seed);
  return sample_w_star_impl(sig, rng);
}

GenResult generate_margin_dataset(const GenConfig& config) {
  config.validate();
  Rng rng(config.seed);
  GenResult out;
  out.w_star = config.w_star ? *config.w_star
                             : sample_w_star_impl(config.sig, rng);

  const Index ambient = config.sig.ambient();
  Matrix points(config.n, ambient);
  IntVector labels(config.n);
  Vector x(ambient);

  Index accepted = 0;
  long window_attempts = 0, window_accepts = 0;
  while (accepted < config.n) {
    ++out.attempts;
    ++window_attempts;
    Index off = 0;
    for (std::size_t k = 0; k < config.sig.size(); ++k) {
      const auto& form = config.sig.blocks[k];
      x.segment(off, form.ambient()) =
          sample_block_point(form, config.scale, rng);
      off += form.ambient();
    }
    const double f = product_decision(out.w_star, x);
    if (std::abs(f) >= config.epsilon) {
      points.row(accepted) = x;
      labels(accepted) = f > 0 ? 1 : -1;
      ++accepted;
      ++window_accepts;
    }
    if (window_attempts == 10000) {
      if (window_accepts < 10)
        throw GenerationStallError(
            "datagen stalled: " + std::to_string(window_accepts) +
            " of 10000 attempts cleared the margin " +
            std::to_string(config.epsilon) + " (accepted " +
            std::to_string(accepted) + "/" + std::to_string(config.n) + ")");
      window_attempts = window_accepts = 0;
    }
  }

  out.data = LabeledData{config.sig, std::move(points), std::move(labels)};
  out.radii = hyperbolic_radii(out.data);
  std::size_t h = 0;
  for (std::size_t k = 0; k < config.sig.size(); ++k) {
    if (config.sig.blocks[k].kind != Kind::hyperbolic) continue;
    const double wnorm = out.w_star.weights[k].norm();
    out.teacher_radii.push_back(1.0 / wnorm);
    if (out.radii[h] * wnorm > 1) out.precondition_saturated = true;
    ++h;
  }
  out.theoretical_bound = theoretical_update_bound(
      out.w_star, out.radii, euclidean_radius(out.data), config.epsilon);
  return out;
}

Matrix shatter_points_hyperbolic(Index d) {
  if (d < 2) throw ParameterError("hyperbolic shattering: need d >= 2");
  Matrix pts = Matrix::Zero(d + 1, d + 1);
  pts(0, 0) = 1;  // lift of z = 0
  for (Index n = 1; n <= d; ++n) {
    pts(n, 0) = std::sqrt(2.0);  // lift of z = e_{n-1}
    pts(n, n) = 1;
  }
  return pts;
}

Vector solve_shatter_weights(const IntVector& labels, double k) {
  const Index m = labels.size();
  if (m < 3) throw ParameterError("shatter weights: need d+1 >= 3 labels");
  if (!(k > std::sqrt(2.0) + 1))
    throw ParameterError("shatter weights: need k > sqrt(2) + 1");
  for (Index i = 0; i < m; ++i)
    if (labels(i) != 1 && labels(i) != -1)
      throw ParameterError("shatter weights: labels must be +1/-1");

  const double t1 = labels(0);
  Vector w(m);
  w(0) = -t1;
  for (Index i = 1; i < m; ++i) w(i) = -std::sqrt(2.0) * t1 + k * labels(i);
  return w;
}

ProductShatter shatter_points_product(const Signature& sig) {
  sig.validate();
  if (sig.size() != 3 || sig.blocks[0].kind != Kind::euclidean ||
      sig.blocks[1].kind != Kind::spherical ||
      sig.blocks[2].kind != Kind::hyperbolic)
    throw ParameterError(
        "product shattering: signature must be one Euclidean, one spherical, "
        "one hyperbolic block in that order");

  const Index de = sig.blocks[0].dim;
  const Index ds = sig.blocks[1].dim;
  const Index dh = sig.blocks[2].dim;
  const double cs = sig.blocks[1].curvature;
  const double ch = sig.blocks[2].curvature;
  const Index n = de + ds + dh + 1;

  // Shared block values: the Euclidean anchor is the origin, the spherical
  // anchor the last pole, the hyperbolic anchor the apex.
  const Vector e_anchor = Vector::Zero(de);
  Vector s_anchor = Vector::Zero(ds + 1);
  s_anchor(ds) = 1 / std::sqrt(cs);
  Vector h_anchor = Vector::Zero(dh + 1);
  h_anchor(0) = 1 / std::sqrt(-ch);

  const Index se = sig.offset(0), ss = sig.offset(1), sh = sig.offset(2);
  ProductShatter out;
  out.sig = sig;
  out.points.resize(n, sig.ambient());
  for (Index i = 0; i < n; ++i) {
    out.points.row(i).segment(se, de) = e_anchor;
    out.points.row(i).segment(ss, ds + 1) = s_anchor;
    out.points.row(i).segment(sh, dh + 1) = h_anchor;
  }
  for (Index i = 0; i < de; ++i) out.points(i, se + i) = 1;
  for (Index i = 0; i < ds; ++i) {
    // (e_i + pole)/sqrt(2), scaled onto the sphere of curvature cs
    out.points(de + i, ss + i) = 1 / std::sqrt(2 * cs);
    out.points(de + i, ss + ds) = 1 / std::sqrt(2 * cs);
  }
  for (Index i = 0; i < dh; ++i) {
    // lift of e_i, scaled onto the hyperboloid of curvature ch
    out.points(de + ds + i, sh) = std::sqrt(2.0) / std::sqrt(-ch);
    out.points(de + ds + i, sh + 1 + i) = 1 / std::sqrt(-ch);
  }
  return out;
}

ClassifierParams ProductShatter::witness(const IntVector& labels,
                                         double eps) const {
  const Index de = sig.blocks[0].dim;
  const Index ds = sig.blocks[1].dim;
  const Index dh = sig.blocks[2].dim;
  const Index n = de + ds + dh + 1;
  if (labels.size() != n)
    throw DimensionError("shattering witness: need dim+1 labels");
  if (!(eps > 0))
    throw ParameterError("shattering witness: need eps > 0");
  for (Index i = 0; i < n; ++i)
    if (labels(i) != 1 && labels(i) != -1)
      throw ParameterError("shattering witness: labels must be +1/-1");

  const Index ss = sig.offset(1), sh = sig.offset(2);
  const auto solve_block = [](const Matrix& a, const Vector& rhs,
                              const char* what) {
    const Vector w = a.colPivHouseholderQr().solve(rhs);
    if ((a * w - rhs).cwiseAbs().maxCoeff() > 1e-8)
      throw SolverError(std::string("shattering witness: singular ") + what +
                        " interpolation system");
    return w;
  };

  // Euclidean: w' x_n + b = t_n at the unit points and 0 at the origin,
  // so b = 0 and w picks up t directly.
  Vector we = Vector::Zero(de);
  for (Index i = 0; i < de; ++i) we(i) = labels(i);

  // Spherical: <w, x_n> = sin(t_n) at the tilted points, 0 at the pole.
  Matrix a(ds + 1, ds + 1);
  Vector rhs(ds + 1);
  for (Index i = 0; i < ds; ++i) {
    a.row(i) = points.row(de + i).segment(ss, ds + 1);
    rhs(i) = std::sin(double(labels(de + i)));
  }
  a.row(ds) = points.row(n - 1).segment(ss, ds + 1);
  rhs(ds) = 0;
  Vector ws = solve_block(a, rhs, "spherical");

  // Hyperbolic: [w, x_n] = sinh(t_n) at the lifted points, 0 at the apex;
  // each row encodes w' H x.
  Matrix ah(dh + 1, dh + 1);
  Vector rhsh(dh + 1);
  for (Index i = 0; i < dh; ++i) {
    Vector x = points.row(de + ds + i).segment(sh, dh + 1).transpose();
    x(0) = -x(0);
    ah.row(i) = x.transpose();
    rhsh(i) = std::sinh(double(labels(de + ds + i)));
  }
  Vector xa = points.row(n - 1).segment(sh, dh + 1).transpose();
  xa(0) = -xa(0);
  ah.row(dh) = xa.transpose();
  rhsh(dh) = 0;
  Vector wh = solve_block(ah, rhsh, "hyperbolic");

  // Perturbation toward the anchors flips the shared point's label with
  // sgn(t_N) while leaving the others' limits alone.
  const double tn = labels(n - 1);
  ws += eps * tn * points.row(n - 1).segment(ss, ds + 1).transpose();
  wh -= eps * tn * points.row(n - 1).segment(sh, dh + 1).transpose();

  ClassifierParams params;
  params.sig = sig;
  params.bias = eps * tn;
  params.weights = {we, ws, wh};
  return params;
}

double find_witness_epsilon(const ProductShatter& shatter,
                            const IntVector& labels) {
  for (double eps = 1e-2; eps >= 1e-10 / 2; eps /= 10) {
    const ClassifierParams w = shatter.witness(labels, eps);
    bool ok = true;
    for (Index i = 0; i < shatter.points.rows() && ok; ++i) {
      const int pred =
          product_decision(w, shatter.points.row(i).transpose()) > 0 ? 1 : -1;
      ok = pred == labels(i);
    }
    if (ok) return eps;
  }
  return 0;
}

}  // namespace spaceform
