#include "spaceform/svm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spaceform {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const Matrix& k) {
  return k.size() ? k.cwiseAbs().maxCoeff() : 0.0;
}

void check_psd(const Matrix& k, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k, Eigen::EigenvaluesOnly);
  const double floor = -1e-8 * std::max(1.0, max_abs(k));
  if (eig.eigenvalues().minCoeff() < floor)
    throw DomainError(std::string(what) + ": matrix is not PSD");
}

// One relaxed constraint set {beta : beta' A beta <= bound}, A PSD, held in
// eigenbasis so projections are exact.
struct QuadConstraint {
  std::string name;
  Matrix vecs;
  Vector vals;  // clamped at zero
  double bound = 0;

  double quad(const Vector& b) const {
    const Vector t = vecs.transpose() * b;
    return (vals.array() * t.array().square()).sum();
  }

  // Euclidean projection onto the set: z = (I + mu A)^-1 b with mu >= 0
  // chosen by bisection so the constraint holds with equality.
  Vector project(const Vector& b) const {
    Vector t = vecs.transpose() * b;
    const auto value = [&](double mu) {
      double acc = 0;
      for (Index i = 0; i < vals.size(); ++i) {
        const double den = 1 + mu * vals(i);
        acc += vals(i) * t(i) * t(i) / (den * den);
      }
      return acc;
    };
    if (value(0) <= bound) return b;
    double lo = 0, hi = 1;
    while (value(hi) > bound) {
      hi *= 2;
      if (hi > 1e30) break;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (value(mid) > bound ? lo : hi) = mid;
    }
    const double mu = hi;
    for (Index i = 0; i < t.size(); ++i) t(i) /= 1 + mu * vals(i);
    return vecs * t;
  }
};

QuadConstraint make_constraint(std::string name, const Matrix& a,
                               double bound) {
  QuadConstraint c;
  c.name = std::move(name);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  c.vecs = eig.eigenvectors();
  c.vals = eig.eigenvalues().cwiseMax(0.0);
  c.bound = bound;
  return c;
}

// Dykstra's alternating projections onto the intersection.
Vector project_intersection(const std::vector<QuadConstraint>& sets,
                            Vector z) {
  bool inside = true;
  for (const auto& s : sets)
    if (s.quad(z) > s.bound * (1 + 1e-12)) { inside = false; break; }
  if (inside) return z;

  std::vector<Vector> corr(sets.size(), Vector::Zero(z.size()));
  for (int sweep = 0; sweep < 64; ++sweep) {
    const Vector before = z;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Vector w = z + corr[i];
      z = sets[i].project(w);
      corr[i] = w - z;
    }
    if ((z - before).cwiseAbs().maxCoeff() <
        1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff()))
      break;
  }
  return z;
}

struct MarginOpt {
  double eps = 0;
  double g = 0;
};

// max over eps >= 0 of eps - weight * sum_n max(0, eps - m_n); concave and
// piecewise linear, so it is attained at 0 or at a margin value.
MarginOpt best_eps(const Vector& m, double weight) {
  const Index n = m.size();
  std::vector<double> sorted(m.data(), m.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> prefix(std::size_t(n) + 1, 0.0);
  for (Index i = 0; i < n; ++i) prefix[std::size_t(i) + 1] = prefix[std::size_t(i)] + sorted[std::size_t(i)];

  const auto value = [&](double eps) {
    const auto cnt = std::size_t(
        std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin());
    return eps - weight * (double(cnt) * eps - prefix[cnt]);
  };

  MarginOpt best{0.0, value(0.0)};
  for (double c : sorted) {
    if (c <= 0) continue;
    const double v = value(c);
    if (v > best.g) best = {c, v};
  }
  return best;
}

}  // namespace

std::pair<Matrix, Matrix> split_indefinite(const Matrix& k) {
  if (k.rows() != k.cols())
    throw DimensionError("split_indefinite: square input required");
  if ((k - k.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, max_abs(k)))
    throw DomainError("split_indefinite: asymmetric input");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (k + k.transpose()));
  const Matrix& v = eig.eigenvectors();
  const Vector lam = eig.eigenvalues();
  const Matrix plus =
      v * lam.cwiseMax(0.0).asDiagonal() * v.transpose();
  const Matrix minus =
      v * (-lam).cwiseMax(0.0).asDiagonal() * v.transpose();
  return {plus, minus};
}

KernelSet build_kernel_matrices(const LabeledData& data,
                                std::vector<double> radii) {
  data.validate();
  const Index n = data.size();
  if (n == 0) throw ParameterError("kernel matrices: empty dataset");

  KernelSet ks;
  ks.sig = data.sig;
  ks.radii = hyperbolic_radii(data);
  if (!radii.empty()) {
    if (radii.size() != ks.radii.size())
      throw DimensionError("kernel matrices: one radius per hyperbolic block");
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (radii[k] < ks.radii[k])
        throw DomainError(
            "kernel matrices: supplied radius is below the data bound");
      ks.radii[k] = radii[k];
    }
  }

  const ProductKernel kern(data.sig, ks.radii);
  ks.margin.resize(n, n);
  ks.euclidean = Matrix::Ones(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      const double v =
          kern(data.points.row(i).transpose(), data.points.row(j).transpose());
      ks.margin(i, j) = ks.margin(j, i) = v;
    }

  for (std::size_t k = 0; k < data.sig.size(); ++k) {
    const auto& blk = data.sig.blocks[k];
    const Matrix part = data.points.middleCols(data.sig.offset(k),
                                               blk.ambient());
    switch (blk.kind) {
      case Kind::euclidean:
        ks.euclidean += part * part.transpose();
        break;
      case Kind::spherical: {
        Matrix m = blk.curvature * (part * part.transpose());
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            m(i, j) = std::asin(clamp_unit(m(i, j)));
        ks.spherical.push_back(std::move(m));
        break;
      }
      case Kind::hyperbolic: {
        const double r2 = ks.radii[ks.hyperbolic.size()] *
                          ks.radii[ks.hyperbolic.size()];
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i)
          for (Index j = i; j < n; ++j) {
            const double lp = lorentz_product(part.row(i).transpose(),
                                              part.row(j).transpose());
            m(i, j) = m(j, i) = std::asinh(lp / r2);
          }
        auto [plus, minus] = split_indefinite(m);
        ks.hyperbolic.push_back(std::move(m));
        ks.hyp_plus.push_back(std::move(plus));
        ks.hyp_minus.push_back(std::move(minus));
        break;
      }
    }
  }

  check_psd(ks.margin, "composite kernel");
  check_psd(ks.euclidean, "euclidean kernel");
  for (const auto& m : ks.spherical) check_psd(m, "spherical kernel");
  return ks;
}

SvmSolution solve_svm(const KernelSet& kernels, const IntVector& labels,
                      const SvmParams& params) {
  const Index n = kernels.size();
  if (n < 2) throw SolverError("svm: need at least two points");
  if (labels.size() != n) throw DimensionError("svm: label count");
  bool pos = false, neg = false;
  for (Index i = 0; i < n; ++i) {
    if (labels(i) == 1) pos = true;
    else if (labels(i) == -1) neg = true;
    else throw ParameterError("svm: labels must be +1/-1");
  }
  if (!pos || !neg) throw SolverError("svm: labels contain a single class");
  if (!(params.tolerance > 0) || params.max_iters < 1)
    throw ParameterError("svm: bad tolerance or max_iters");
  if (params.r == 0)
    throw ParameterError("svm: r must be positive (or negative for default)");
  if (!(params.slack_weight * double(n) > 1))
    throw ParameterError("svm: slack weight too small, objective unbounded");

  std::size_t h_blocks = 0, s_blocks = 0;
  bool has_e = false;
  double e_bound = 0;
  for (std::size_t k = 0; k < kernels.sig.size(); ++k) {
    const double a = kernels.sig.alphas(Index(k));
    switch (kernels.sig.blocks[k].kind) {
      case Kind::euclidean:
        has_e = true;
        e_bound += a * a;
        break;
      case Kind::spherical: ++s_blocks; break;
      case Kind::hyperbolic: ++h_blocks; break;
    }
  }
  if (kernels.spherical.size() != s_blocks ||
      kernels.hyperbolic.size() != h_blocks ||
      kernels.hyp_plus.size() != h_blocks ||
      kernels.hyp_minus.size() != h_blocks ||
      kernels.radii.size() != h_blocks ||
      kernels.margin.rows() != n || kernels.margin.cols() != n ||
      kernels.euclidean.rows() != n)
    throw DimensionError("svm: kernel set is inconsistent");

  std::vector<QuadConstraint> sets;
  if (has_e)
    sets.push_back(make_constraint(
        "euclidean", kernels.euclidean - Matrix::Ones(n, n), e_bound));
  for (std::size_t k = 0; k < s_blocks; ++k)
    sets.push_back(make_constraint("spherical[" + std::to_string(k) + "]",
                                   kernels.spherical[k], kPi / 2));
  if (params.hyperbolic_constraints) {
    std::size_t h = 0;
    for (std::size_t k = 0; k < kernels.sig.size(); ++k) {
      if (kernels.sig.blocks[k].kind != Kind::hyperbolic) continue;
      const double scale =
          std::asinh(-kernels.radii[h] * kernels.radii[h] *
                     kernels.sig.blocks[k].curvature);
      const double r = params.r < 0 ? 1e-2 * scale : params.r;
      sets.push_back(make_constraint("hyperbolic_minus[" + std::to_string(h) + "]",
                                     kernels.hyp_minus[h], r));
      sets.push_back(make_constraint("hyperbolic_plus[" + std::to_string(h) + "]",
                                     kernels.hyp_plus[h], r + scale));
      ++h;
    }
  }
  if (sets.empty())
    throw SolverError("svm: no constraint sets for this signature/mode");

  const Vector y = labels.cast<double>();

  // Warm start: a few passes of the kernel perceptron on the margin matrix,
  // then a radial shrink into the feasible region.
  Vector beta = Vector::Zero(n);
  {
    Vector d = Vector::Zero(n);
    for (int pass = 0; pass < 32; ++pass) {
      long mistakes = 0;
      for (Index m = 0; m < n; ++m) {
        const double s = d(m);
        const int sign = s > 0 ? 1 : (s < 0 ? -1 : 0);
        if (sign == labels(m)) continue;
        ++mistakes;
        beta(m) += y(m);
        d += y(m) * kernels.margin.col(m);
      }
      if (mistakes == 0) break;
    }
    double t = 1;
    for (const auto& s : sets) {
      const double q = s.quad(beta);
      if (q > s.bound) t = std::min(t, std::sqrt(s.bound / q));
    }
    beta *= t * (1 - 1e-9);
  }

  double eta0 = std::numeric_limits<double>::infinity();
  for (const auto& s : sets) {
    const double lmax = s.vals.size() ? s.vals.maxCoeff() : 0;
    if (lmax > 0) eta0 = std::min(eta0, std::sqrt(s.bound / lmax));
  }
  if (!std::isfinite(eta0)) eta0 = 1;

  SvmSolution sol;
  Vector best_beta = beta;
  double best_g = -std::numeric_limits<double>::infinity();
  double marked_g = best_g;
  long marked_iter = 0;
  bool converged = false;
  long iter = 0;
  Vector m(n), grad(n);
  for (; iter < params.max_iters; ++iter) {
    m = y.cwiseProduct(kernels.margin * beta);
    const MarginOpt opt = best_eps(m, params.slack_weight);
    if (opt.g > best_g) {
      best_g = opt.g;
      best_beta = beta;
    }
    sol.objective_trace.push_back(best_g);
    if (best_g > marked_g + params.tolerance * std::max(1.0, std::abs(marked_g))) {
      marked_g = best_g;
      marked_iter = iter;
    } else if (iter - marked_iter > 500) {
      converged = true;
      ++iter;
      break;
    }

    grad.setZero();
    long active = 0;
    for (Index i = 0; i < n; ++i)
      if (m(i) < opt.eps) {
        grad += params.slack_weight * y(i) * kernels.margin.col(i);
        ++active;
      }
    if (active == 0) {
      Index worst = 0;
      m.minCoeff(&worst);
      grad = y(worst) * kernels.margin.col(worst);
    }
    const double gn = grad.norm();
    if (gn < 1e-15) {
      converged = true;
      ++iter;
      break;
    }
    beta = project_intersection(
        sets, beta + (eta0 / std::sqrt(double(iter) + 1)) * (grad / gn));
  }

  beta = best_beta;
  m = y.cwiseProduct(kernels.margin * beta);
  MarginOpt opt = best_eps(m, params.slack_weight);

  // When every margin is positive the objective is radially increasing, so
  // scale out until the tightest constraint is exactly active.
  if (m.minCoeff() > 0) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& c : sets) {
      const double q = c.quad(beta);
      if (q > 0) s = std::min(s, std::sqrt(c.bound / q));
    }
    if (std::isfinite(s) && s > 1) {
      const Vector scaled = beta * s;
      const Vector ms = y.cwiseProduct(kernels.margin * scaled);
      const MarginOpt opts = best_eps(ms, params.slack_weight);
      if (opts.g >= opt.g) {
        beta = scaled;
        m = ms;
        opt = opts;
      }
    }
  }
  if (opt.g > best_g && !sol.objective_trace.empty())
    sol.objective_trace.push_back(opt.g);

  sol.beta = beta;
  sol.epsilon = opt.eps;
  sol.zeta = (Vector::Constant(n, opt.eps) - m).cwiseMax(0.0);
  sol.objective = opt.eps - params.slack_weight * sol.zeta.sum();
  sol.converged = converged;
  sol.iterations = iter;

  double margin_viol = 0;
  for (Index i = 0; i < n; ++i)
    margin_viol = std::max(margin_viol, opt.eps - sol.zeta(i) - m(i));
  sol.residuals.emplace_back("margin", std::max(0.0, margin_viol));
  for (const auto& c : sets)
    sol.residuals.emplace_back(c.name, std::max(0.0, c.quad(beta) - c.bound));
  return sol;
}

double SvmModel::decision(const Vector& x) const {
  const ProductKernel kern(sig, radii);
  double acc = 0;
  for (Index i = 0; i < support.rows(); ++i)
    acc += beta(i) * kern(support.row(i).transpose(), x);
  return acc;
}

int SvmModel::predict_one(const Vector& x) const {
  return decision(x) > 0 ? 1 : -1;
}

SvmModel make_svm_model(const LabeledData& train, const KernelSet& kernels,
                        const SvmSolution& solution) {
  if (solution.beta.size() != train.size())
    throw DimensionError("svm model: beta does not match training set");
  SvmModel model;
  model.sig = kernels.sig;
  model.radii = kernels.radii;
  model.support = train.points;
  model.beta = solution.beta;
  model.epsilon = solution.epsilon;
  return model;
}

}  // namespace spaceform
