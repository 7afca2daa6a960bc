#include "syndatum/erm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "syndatum/config.hpp"

namespace syndatum {

bool CoefficientBox::contains(const Vector& beta) const {
  return (beta.array() >= lower.array()).all() && (beta.array() <= upper.array()).all();
}

Vector CoefficientBox::project(const Vector& beta) const { return beta.cwiseMax(lower).cwiseMin(upper); }

Matrix CoefficientBox::corners() const {
  const Eigen::Index q = lower.size();
  Matrix out(Eigen::Index{1} << q, q);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index j = 0; j < q; ++j) out(r, j) = (r >> j) & 1 ? upper[j] : lower[j];
  }
  return out;
}

BasisFunctionClass::BasisFunctionClass(std::string name, ClassKind kind, Eigen::Index q, BasisMap map,
                                       std::optional<CoefficientBox> box, double ridge,
                                       std::vector<double> breakpoints)
    : name_(std::move(name)), kind_(kind), q_(q), map_(std::move(map)), box_(std::move(box)), ridge_(ridge),
      breakpoints_(std::move(breakpoints)) {
  if (q_ < 1) throw Error(ErrorCode::InvalidArgument, "class '" + name_ + "' needs at least one basis function");
  if (ridge_ < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge penalty must be >= 0");
  if (box_) {
    if (box_->lower.size() != q_ || box_->upper.size() != q_) {
      throw Error(ErrorCode::DimensionMismatch, "coefficient box of class '" + name_ + "' has the wrong size");
    }
    if (!(box_->lower.array() < box_->upper.array()).all()) {
      throw Error(ErrorCode::InvalidArgument, "coefficient box of class '" + name_ + "' needs lo < hi");
    }
  }
  if (kind_ != ClassKind::Basis && q_ != 1) {
    throw Error(ErrorCode::InvalidArgument, "sign and threshold classes use a single basis function");
  }
  if (kind_ == ClassKind::Threshold && !box_) {
    throw Error(ErrorCode::InvalidArgument, "threshold class '" + name_ + "' needs a box");
  }
}

Vector BasisFunctionClass::evaluate(const Vector& coefficients, const Matrix& x) const {
  const Matrix phi = design(x);
  switch (kind_) {
    case ClassKind::Basis: return phi * coefficients;
    case ClassKind::SignChoice: return phi.col(0) * coefficients[0];
    case ClassKind::Threshold: return phi.col(0).array() - coefficients[0];
  }
  return {};
}

namespace {

Matrix columnwise(const Matrix& x, double (*fn)(double)) { return x.unaryExpr(fn); }

double reciprocal_shift(double v) { return 1.0 / (v + 0.1); }
double square(double v) { return v * v; }
double cube(double v) { return v * v * v; }
double absolute(double v) { return std::abs(v); }
double exponential(double v) { return std::exp(v); }

// Columns of fn applied to the first coordinate, in order.
BasisMap univariate(std::vector<double (*)(double)> fns) {
  return [fns](const Matrix& x) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(fns.size()));
    for (std::size_t j = 0; j < fns.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(0).unaryExpr(fns[j]);
    return out;
  };
}

double identity_fn(double v) { return v; }

}  // namespace

BasisFunctionClass make_class(const std::string& spec, Eigen::Index p) {
  const SpecItem item = parse_spec_item(spec);
  const std::string& name = item.name;
  const auto need_1d = [&] {
    if (p != 1) throw Error(ErrorCode::ConfigError, "class '" + name + "' is defined for 1-d features only");
  };

  ClassKind kind = ClassKind::Basis;
  Eigen::Index q = 0;
  BasisMap map;
  std::vector<double> kinks;
  std::optional<std::pair<double, double>> box_range;

  if (name == "linear" || name == "logistic-linear") {
    q = p;
    map = [](const Matrix& x) { return x; };
    if (name == "logistic-linear") box_range = std::make_pair(-4.0, 4.0);
  } else if (name == "quadratic") {
    q = 2 * p;
    map = [p](const Matrix& x) {
      Matrix out(x.rows(), 2 * p);
      out << x, x.array().square().matrix();
      return out;
    };
  } else if (name == "exp2") {
    q = p;
    map = [](const Matrix& x) { return columnwise(x, exponential); };
  } else if (name == "abs") {
    q = p;
    map = [](const Matrix& x) { return columnwise(x, absolute); };
    kinks = {0.0};
  } else if (name == "constant") {
    q = 1;
    map = [](const Matrix& x) { return Matrix::Ones(x.rows(), 1).eval(); };
  } else if (name.rfind("recip-cubic-", 0) == 0) {
    need_1d();
    const std::string which = name.substr(12);
    if (which == "0") map = univariate({identity_fn, cube});
    else if (which == "1") map = univariate({reciprocal_shift, cube});
    else if (which == "2") map = univariate({square, cube});
    else if (which == "3") map = univariate({reciprocal_shift, identity_fn, square, cube});
    else throw Error(ErrorCode::ConfigError, "unknown class '" + name + "'");
    q = which == "3" ? 4 : 2;
  } else if (name == "threshold-abs") {
    need_1d();
    kind = ClassKind::Threshold;
    q = 1;
    map = univariate({absolute});
    kinks = {0.0};
    box_range = std::make_pair(0.0, 1.0);
  } else if (name == "sign-abs" || name == "sign-linear") {
    need_1d();
    kind = ClassKind::SignChoice;
    q = 1;
    map = univariate({name == "sign-abs" ? absolute : identity_fn});
    kinks = {0.0};
  } else {
    throw Error(ErrorCode::UnknownBuiltin, "unknown model class '" + name + "'");
  }

  if (item.has("box")) {
    const Vector b = item.vector("box");
    if (b.size() != 2) throw Error(ErrorCode::ConfigError, "box expects lo,hi");
    box_range = std::make_pair(b[0], b[1]);
  }
  if (item.has("B")) {
    const double b = item.number("B");
    box_range = std::isfinite(b) ? std::optional(std::make_pair(-b, b)) : std::nullopt;
  }
  std::optional<CoefficientBox> box;
  if (box_range) box = CoefficientBox{Vector::Constant(q, box_range->first), Vector::Constant(q, box_range->second)};
  return BasisFunctionClass(spec, kind, q, std::move(map), std::move(box), item.number_or("ridge", 0.0),
                            std::move(kinks));
}

FittedModel::FittedModel(std::shared_ptr<const BasisFunctionClass> cls, Vector coefficients, TaskKind task)
    : cls_(std::move(cls)), coefficients_(std::move(coefficients)), task_(task) {}

double FittedModel::predict(const Eigen::Ref<const Vector>& x) const {
  const Matrix row = x.transpose();
  return cls_->evaluate(coefficients_, row)[0];
}

std::vector<double> FittedModel::breakpoints() const {
  std::vector<double> out = cls_->breakpoints();
  if (cls_->kind() == ClassKind::Threshold) {
    out.push_back(coefficients_[0]);
    out.push_back(-coefficients_[0]);
  }
  return out;
}

double regression_objective(const Matrix& design, const Vector& t, const Vector& beta, double ridge) {
  return (design * beta - t).squaredNorm() / static_cast<double>(design.rows()) + ridge * beta.squaredNorm();
}

namespace {

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }
double sigmoid(double v) { return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); }

// Penalized least squares restricted to `free` columns with the others held at `fixed`.
std::optional<Vector> solve_least_squares(const Matrix& design, const Vector& t, double ridge, const Vector& fixed,
                                          const std::vector<Eigen::Index>& free) {
  const Eigen::Index n = design.rows();
  Vector rhs = t;
  Vector beta = fixed;
  std::vector<bool> is_free(static_cast<std::size_t>(design.cols()), false);
  for (auto j : free) is_free[static_cast<std::size_t>(j)] = true;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    if (!is_free[static_cast<std::size_t>(j)]) rhs -= design.col(j) * fixed[j];
  }
  if (free.empty()) return beta;
  const Eigen::Index k = static_cast<Eigen::Index>(free.size());
  Matrix a(n, k);
  for (Eigen::Index c = 0; c < k; ++c) a.col(c) = design.col(free[static_cast<std::size_t>(c)]);
  Vector sol;
  if (ridge > 0.0) {
    Matrix gram = a.transpose() * a / static_cast<double>(n);
    gram.diagonal().array() += ridge;
    sol = gram.ldlt().solve(a.transpose() * rhs / static_cast<double>(n));
  } else {
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    if (n < k || qr.rank() < k) return std::nullopt;
    sol = qr.solve(rhs);
    const Matrix gram = a.transpose() * a;
    sol += gram.ldlt().solve(a.transpose() * (rhs - a * sol));
  }
  for (Eigen::Index c = 0; c < k; ++c) beta[free[static_cast<std::size_t>(c)]] = sol[c];
  return beta;
}

// Projected accelerated gradient for a smooth convex objective on a box.
template <typename Grad, typename Obj>
Vector projected_fista(const CoefficientBox& box, Vector start, double lipschitz, Grad grad, Obj objective,
                       int max_iterations = 200000, double tol = 1e-10) {
  Vector x = box.project(start);
  Vector y = x;
  double momentum = 1.0;
  double fx = objective(x);
  const double step = 1.0 / std::max(lipschitz, 1e-300);
  for (int it = 0; it < max_iterations; ++it) {
    Vector next = box.project(y - step * grad(y));
    double f_next = objective(next);
    if (f_next > fx) {  // restart momentum
      momentum = 1.0;
      next = box.project(x - step * grad(x));
      f_next = objective(next);
    }
    const double change = (next - x).cwiseAbs().maxCoeff();
    const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / m_next) * (next - x);
    momentum = m_next;
    x = std::move(next);
    fx = f_next;
    if (change < tol * std::max(1.0, x.cwiseAbs().maxCoeff())) break;
  }
  return x;
}

std::shared_ptr<const BasisFunctionClass> share(const BasisFunctionClass& cls) {
  return std::make_shared<const BasisFunctionClass>(cls);
}

// Empirical soft 0-1 risk of sign(score): t where the sign is -1, 1 - t where it is +1.
double soft_zero_one(const Vector& score, const Vector& t) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < score.size(); ++i) total += score[i] >= 0.0 ? 1.0 - t[i] : t[i];
  return total / static_cast<double>(score.size());
}

FittedModel fit_threshold(const BasisFunctionClass& cls, const Matrix& x, const Vector& t) {
  const Vector a = cls.design(x).col(0);
  const Eigen::Index n = a.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a[i] < a[j]; });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index r = 0; r < n; ++r) {
    sorted[static_cast<std::size_t>(r)] = a[order[static_cast<std::size_t>(r)]];
    prefix[static_cast<std::size_t>(r) + 1] = prefix[static_cast<std::size_t>(r)] + t[order[static_cast<std::size_t>(r)]];
  }
  const double total_t = prefix.back();
  // sign(a - beta) is -1 exactly for a < beta.
  const auto risk = [&](double beta) {
    const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), beta) - sorted.begin());
    const double below = prefix[k];
    const double above = static_cast<double>(static_cast<std::size_t>(n) - k) - (total_t - below);
    return (below + above) / static_cast<double>(n);
  };
  const double lo = cls.box()->lower[0], hi = cls.box()->upper[0];
  constexpr int kGrid = 1000;
  const double h = (hi - lo) / (kGrid - 1);
  double best = lo, best_risk = risk(lo);
  for (int j = 1; j < kGrid; ++j) {
    const double b = j == kGrid - 1 ? hi : lo + j * h;
    const double r = risk(b);
    if (r < best_risk) {
      best = b;
      best_risk = r;
    }
  }
  // Golden-section refinement around the grid winner.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double left = std::max(lo, best - h), right = std::min(hi, best + h);
  double c = right - phi * (right - left), d = left + phi * (right - left);
  double rc = risk(c), rd = risk(d);
  while (right - left > 1e-4) {
    if (rc <= rd) {
      right = d;
      d = c;
      rd = rc;
      c = right - phi * (right - left);
      rc = risk(c);
    } else {
      left = c;
      c = d;
      rc = rd;
      d = left + phi * (right - left);
      rd = risk(d);
    }
  }
  if (rc < best_risk) best = c, best_risk = rc;
  if (rd < best_risk) best = d, best_risk = rd;
  return FittedModel(share(cls), Vector::Constant(1, best), TaskKind::Classification);
}

FittedModel fit_sign_choice(const BasisFunctionClass& cls, const Matrix& x, const Vector& t) {
  const Vector a = cls.design(x).col(0);
  double best = cls.candidates().front();
  double best_risk = std::numeric_limits<double>::infinity();
  for (double c : cls.candidates()) {
    const double r = soft_zero_one(a * c, t);
    if (r < best_risk) {
      best = c;
      best_risk = r;
    }
  }
  return FittedModel(share(cls), Vector::Constant(1, best), TaskKind::Classification);
}

}  // namespace

double logistic_soft_objective(const Matrix& design, const Vector& t, const Vector& beta, double ridge) {
  const Vector s = design * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += t[i] * softplus(-s[i]) + (1.0 - t[i]) * softplus(s[i]);
  return total / static_cast<double>(s.size()) + ridge * beta.squaredNorm();
}

FittedModel fit_regression_targets(const BasisFunctionClass& cls, const Matrix& x, const Vector& t) {
  if (cls.kind() != ClassKind::Basis) {
    throw Error(ErrorCode::TaskMismatch, "class '" + cls.name() + "' is a classification-only class");
  }
  if (x.rows() == 0) throw Error(ErrorCode::EmptyOriginal, "cannot fit on an empty dataset");
  const Matrix phi = cls.design(x);
  const Eigen::Index q = cls.q();
  const double ridge = cls.ridge();
  std::vector<Eigen::Index> all(static_cast<std::size_t>(q));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const auto unconstrained = solve_least_squares(phi, t, ridge, Vector::Zero(q), all);
  if (unconstrained && (!cls.box() || cls.box()->contains(*unconstrained))) {
    return FittedModel(share(cls), *unconstrained, TaskKind::Regression);
  }
  if (!cls.box()) {
    throw Error(ErrorCode::SingularDesign, "Gram matrix of class '" + cls.name() + "' is singular");
  }
  const CoefficientBox& box = *cls.box();
  Vector best;
  if (q <= 4) {
    // Each coordinate free, at its lower bound, or at its upper bound; the best
    // feasible candidate is the constrained optimum of the convex quadratic.
    double best_obj = std::numeric_limits<double>::infinity();
    int patterns = 1;
    for (Eigen::Index j = 0; j < q; ++j) patterns *= 3;
    for (int code = 0; code < patterns; ++code) {
      Vector fixed = Vector::Zero(q);
      std::vector<Eigen::Index> free;
      int c = code;
      for (Eigen::Index j = 0; j < q; ++j, c /= 3) {
        if (c % 3 == 0) free.push_back(j);
        else fixed[j] = c % 3 == 1 ? box.lower[j] : box.upper[j];
      }
      const auto cand = solve_least_squares(phi, t, ridge, fixed, free);
      if (!cand) continue;
      const double slack = 1e-12 * std::max(1.0, cand->cwiseAbs().maxCoeff());
      if (((cand->array() < box.lower.array() - slack) || (cand->array() > box.upper.array() + slack)).any()) continue;
      const Vector projected = box.project(*cand);
      const double obj = regression_objective(phi, t, projected, ridge);
      if (obj < best_obj) {
        best_obj = obj;
        best = projected;
      }
    }
  } else {
    const double n = static_cast<double>(phi.rows());
    Matrix gram = phi.transpose() * phi / n;
    gram.diagonal().array() += ridge;
    const Vector b = phi.transpose() * t / n;
    const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
    best = projected_fista(
        box, unconstrained.value_or(Vector::Zero(q)), lipschitz, [&](const Vector& beta) { return Vector(2.0 * (gram * beta - b)); },
        [&](const Vector& beta) { return regression_objective(phi, t, beta, ridge); });
  }
  return FittedModel(share(cls), best, TaskKind::Regression);
}

FittedModel fit_classification_soft(const BasisFunctionClass& cls, const Matrix& x, const Vector& t) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyOriginal, "cannot fit on an empty dataset");
  if (cls.kind() == ClassKind::Threshold) return fit_threshold(cls, x, t);
  if (cls.kind() == ClassKind::SignChoice) return fit_sign_choice(cls, x, t);

  const Matrix phi = cls.design(x);
  const Eigen::Index q = cls.q();
  const double n = static_cast<double>(phi.rows());
  const double ridge = cls.ridge();
  const auto gradient = [&](const Vector& beta) {
    const Vector s = phi * beta;
    const Vector r = s.unaryExpr([](double v) { return sigmoid(v); }) - t;
    return Vector(phi.transpose() * r / n + 2.0 * ridge * beta);
  };
  const auto objective = [&](const Vector& beta) { return logistic_soft_objective(phi, t, beta, ridge); };

  Vector beta = Vector::Zero(q);
  double obj = objective(beta);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const Vector grad = gradient(beta);
    if (grad.cwiseAbs().maxCoeff() < 1e-9) {
      converged = true;
      break;
    }
    const Vector s = phi * beta;
    const Vector w = s.unaryExpr([](double v) {
      const double p = sigmoid(v);
      return p * (1.0 - p);
    });
    Matrix hess = phi.transpose() * w.asDiagonal() * phi / n;
    hess.diagonal().array() += 2.0 * ridge;
    Vector dir = -hess.ldlt().solve(grad);
    if (!dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;
    double step = 1.0;
    bool moved = false;
    bool stalled = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const Vector cand = beta + step * dir;
      const double c = objective(cand);
      if (c <= obj) {
        moved = c < obj || (cand - beta).cwiseAbs().maxCoeff() > 0.0;
        stalled = obj - c <= 1e-14 * std::max(1.0, std::abs(obj));
        beta = cand;
        obj = c;
        break;
      }
    }
    if (moved && stalled && grad.cwiseAbs().maxCoeff() < 1e-6) {
      converged = true;
      break;
    }
    if (!moved) {
      converged = grad.cwiseAbs().maxCoeff() < 1e-6;
      break;
    }
    if (beta.cwiseAbs().maxCoeff() > 1e6) break;  // separable: no finite minimizer
  }
  if (converged && (!cls.box() || cls.box()->contains(beta))) {
    return FittedModel(share(cls), beta, TaskKind::Classification);
  }
  if (!cls.box()) {
    throw Error(ErrorCode::NonConvergence, "logistic fit of class '" + cls.name() + "' did not converge");
  }
  const Matrix gram = phi.transpose() * phi / n;
  const double lipschitz = 0.25 * Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff() + 2.0 * ridge;
  Vector sol = projected_fista(*cls.box(), beta, lipschitz, gradient, objective);
  return FittedModel(share(cls), sol, TaskKind::Classification);
}

FittedModel fit_regression(const BasisFunctionClass& cls, const Dataset& data) {
  if (data.task() != TaskKind::Regression) throw Error(ErrorCode::TaskMismatch, "fit_regression on classification data");
  return fit_regression_targets(cls, data.features(), data.responses());
}

FittedModel fit_classification(const BasisFunctionClass& cls, const Dataset& data) {
  if (data.task() != TaskKind::Classification) {
    throw Error(ErrorCode::TaskMismatch, "fit_classification on regression data");
  }
  return fit_classification_soft(cls, data.features(), (data.responses().array() + 1.0).matrix() * 0.5);
}

FittedModel population_optimum(const BasisFunctionClass& cls, const DensityModel& density, const PointFunction& truth,
                               TaskKind task, Eigen::Index m, const SeedSpec& seed) {
  const Matrix x = density.sample(m, seed);
  Vector t(m);
  for (Eigen::Index i = 0; i < m; ++i) t[i] = truth(x.row(i).transpose());
  if (task == TaskKind::Regression) return fit_regression_targets(cls, x, t);
  return fit_classification_soft(cls, x, t.cwiseMax(0.0).cwiseMin(1.0));
}

}  // namespace syndatum
