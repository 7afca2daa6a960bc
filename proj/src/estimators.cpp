#include "syndatum/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "syndatum/config.hpp"

namespace syndatum {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Oracle: return "oracle";
    case EstimatorKind::OLS: return "ols";
    case EstimatorKind::LogisticMLE: return "logistic";
    case EstimatorKind::KNN: return "knn";
    case EstimatorKind::RandomForest: return "rf";
    case EstimatorKind::MLP: return "mlp";
  }
  return "unknown";
}

EstimatorSpec EstimatorSpec::oracle(Truth truth) {
  EstimatorSpec s;
  s.kind = EstimatorKind::Oracle;
  s.truth = std::move(truth);
  return s;
}

EstimatorSpec EstimatorSpec::ols() {
  EstimatorSpec s;
  s.kind = EstimatorKind::OLS;
  return s;
}

EstimatorSpec EstimatorSpec::logistic(double box) {
  EstimatorSpec s;
  s.kind = EstimatorKind::LogisticMLE;
  s.box = box;
  return s;
}

EstimatorSpec EstimatorSpec::knn(std::optional<int> k) {
  EstimatorSpec s;
  s.kind = EstimatorKind::KNN;
  s.k = k;
  return s;
}

EstimatorSpec EstimatorSpec::random_forest(std::optional<int> trees, std::optional<int> depth) {
  EstimatorSpec s;
  s.kind = EstimatorKind::RandomForest;
  s.trees = trees;
  s.depth = depth;
  return s;
}

EstimatorSpec EstimatorSpec::mlp_default() {
  EstimatorSpec s;
  s.kind = EstimatorKind::MLP;
  return s;
}

std::string EstimatorSpec::name() const { return std::string(to_string(kind)); }

void EstimatorSpec::validate() const {
  const auto positive = [](const std::optional<int>& v, const char* what) {
    if (v && *v <= 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " override must be a positive integer");
  };
  positive(k, "k");
  positive(trees, "trees");
  if (depth && *depth < 0) throw Error(ErrorCode::InvalidArgument, "depth override must be >= 0");
  if (kind == EstimatorKind::Oracle && !truth) throw Error(ErrorCode::InvalidArgument, "oracle estimator needs a truth");
  if (kind == EstimatorKind::LogisticMLE && !(box > 0.0)) throw Error(ErrorCode::InvalidArgument, "logistic box B must be > 0");
  if (layers < 1 || hidden < 1) throw Error(ErrorCode::InvalidArgument, "MLP layers and hidden units must be positive");
}

EstimatorSpec parse_estimator(const std::string& text, const std::optional<Truth>& truth) {
  const auto item = parse_spec_item(text);
  const auto opt_int = [&](const char* key) -> std::optional<int> {
    if (const auto v = item.optional_integer(key)) return static_cast<int>(*v);
    return std::nullopt;
  };
  EstimatorSpec spec;
  if (item.name == "oracle") {
    if (!truth) throw Error(ErrorCode::ConfigError, "oracle estimator requires a scenario truth");
    spec = EstimatorSpec::oracle(*truth);
  } else if (item.name == "ols") {
    spec = EstimatorSpec::ols();
  } else if (item.name == "logistic") {
    spec = EstimatorSpec::logistic(item.number_or("B", std::numeric_limits<double>::infinity()));
  } else if (item.name == "knn") {
    spec = EstimatorSpec::knn(opt_int("k"));
  } else if (item.name == "rf") {
    spec = EstimatorSpec::random_forest(opt_int("trees"), opt_int("depth"));
  } else if (item.name == "mlp") {
    spec = EstimatorSpec::mlp_default();
    if (const auto v = opt_int("epochs")) spec.mlp.epochs = *v;
    if (const auto v = opt_int("batch")) spec.mlp.batch_size = *v;
    if (const auto v = opt_int("layers")) spec.layers = *v;
    if (const auto v = opt_int("hidden")) spec.hidden = *v;
    spec.mlp.learning_rate = item.number_or("lr", spec.mlp.learning_rate);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown estimator '" + item.name + "'");
  }
  spec.validate();
  return spec;
}

int default_knn_k(Eigen::Index n, Eigen::Index p) {
  const double k = std::round(std::pow(static_cast<double>(n), 2.0 / (2.0 + static_cast<double>(p))));
  return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(std::max<Eigen::Index>(n, 1))));
}

int default_forest_trees(Eigen::Index n) {
  return std::max(1, static_cast<int>(std::round(1.5 * std::sqrt(static_cast<double>(n)))));
}

int default_forest_depth(Eigen::Index n) {
  return std::max(0, static_cast<int>(std::floor(std::log(static_cast<double>(std::max<Eigen::Index>(n, 1))))));
}

Vector detail::Predictor::predict_batch(const Matrix& x) const {
  Vector out(x.rows());
  Vector row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out[i] = predict(row);
  }
  return out;
}

FittedEstimator::FittedEstimator(EstimatorKind kind, TaskKind task, std::shared_ptr<const detail::Predictor> impl,
                                 Eigen::Index training_n, Vector params, std::string label)
    : kind_(kind), task_(task), impl_(std::move(impl)), training_n_(training_n), params_(std::move(params)),
      label_(label.empty() ? std::string(to_string(kind)) : std::move(label)) {}

double FittedEstimator::predict_mean(const Eigen::Ref<const Vector>& x) const {
  if (task_ != TaskKind::Regression) throw Error(ErrorCode::TaskMismatch, "predict_mean on a classification estimator");
  return impl_->predict(x);
}

double FittedEstimator::predict_prob(const Eigen::Ref<const Vector>& x) const {
  if (task_ != TaskKind::Classification) throw Error(ErrorCode::TaskMismatch, "predict_prob on a regression estimator");
  return std::clamp(impl_->predict(x), 0.0, 1.0);
}

Vector FittedEstimator::predict_batch(const Matrix& x) const {
  Vector v = impl_->predict_batch(x);
  if (task_ == TaskKind::Classification) v = v.cwiseMax(0.0).cwiseMin(1.0);
  return v;
}

PointFunction FittedEstimator::as_function() const {
  auto impl = impl_;
  if (task_ == TaskKind::Classification) {
    return [impl](const Eigen::Ref<const Vector>& x) { return std::clamp(impl->predict(x), 0.0, 1.0); };
  }
  return [impl](const Eigen::Ref<const Vector>& x) { return impl->predict(x); };
}

double predict_mean(const FittedEstimator& est, const Eigen::Ref<const Vector>& x) { return est.predict_mean(x); }
double predict_prob(const FittedEstimator& est, const Eigen::Ref<const Vector>& x) { return est.predict_prob(x); }

namespace {

class OraclePredictor final : public detail::Predictor {
 public:
  explicit OraclePredictor(Truth truth) : truth_(std::move(truth)) {}
  double predict(const Eigen::Ref<const Vector>& x) const override { return truth_(x); }

 private:
  Truth truth_;
};

class LinearPredictor final : public detail::Predictor {
 public:
  LinearPredictor(Vector beta, bool logistic) : beta_(std::move(beta)), logistic_(logistic) {}
  double predict(const Eigen::Ref<const Vector>& x) const override {
    const double s = x.dot(beta_);
    return logistic_ ? 1.0 / (1.0 + std::exp(-s)) : s;
  }
  Vector predict_batch(const Matrix& x) const override {
    Vector s = x * beta_;
    if (logistic_) s = s.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    return s;
  }

 private:
  Vector beta_;
  bool logistic_;
};

class KnnPredictor final : public detail::Predictor {
 public:
  KnnPredictor(Matrix x, Vector y, int k) : x_(std::move(x)), y_(std::move(y)), k_(k) {
    if (x_.cols() == 1) {
      order_.resize(static_cast<std::size_t>(x_.rows()));
      std::iota(order_.begin(), order_.end(), Eigen::Index{0});
      std::sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) { return x_(a, 0) < x_(b, 0); });
      sorted_.resize(order_.size());
      for (std::size_t i = 0; i < order_.size(); ++i) sorted_[i] = x_(order_[i], 0);
    }
  }

  double predict(const Eigen::Ref<const Vector>& q) const override {
    std::vector<std::pair<double, Eigen::Index>> dist;
    if (x_.cols() == 1) {
      dist = window_1d(q[0]);
    } else {
      const Eigen::Index n = x_.rows();
      dist.resize(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = {(x_.row(i).transpose() - q).squaredNorm(), i};
    }
    const auto kth = dist.begin() + (k_ - 1);
    // Lexicographic (distance, index) order breaks ties toward the lowest training index.
    std::nth_element(dist.begin(), kth, dist.end());
    double sum = 0.0;
    for (auto it = dist.begin(); it <= kth; ++it) sum += y_[it->second];
    return sum / k_;
  }

 private:
  // Every point within the k-th smallest distance of q, so ties resolve as in the brute-force scan.
  std::vector<std::pair<double, Eigen::Index>> window_1d(double q) const {
    const auto sq = [q](double v) { return (v - q) * (v - q); };
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sorted_.size());
    std::ptrdiff_t hi = std::lower_bound(sorted_.begin(), sorted_.end(), q) - sorted_.begin();
    std::ptrdiff_t lo = hi - 1;
    double radius = 0.0;
    for (int taken = 0; taken < k_; ++taken) {
      if (hi < n && (lo < 0 || sq(sorted_[hi]) <= sq(sorted_[lo]))) {
        radius = sq(sorted_[hi++]);
      } else {
        radius = sq(sorted_[lo--]);
      }
    }
    while (lo >= 0 && sq(sorted_[lo]) <= radius) --lo;
    while (hi < n && sq(sorted_[hi]) <= radius) ++hi;
    std::vector<std::pair<double, Eigen::Index>> out;
    out.reserve(static_cast<std::size_t>(hi - lo - 1));
    for (std::ptrdiff_t i = lo + 1; i < hi; ++i) out.emplace_back(sq(sorted_[i]), order_[i]);
    return out;
  }

  Matrix x_;
  Vector y_;
  int k_;
  std::vector<Eigen::Index> order_;
  std::vector<double> sorted_;
};

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

class RegressionTree {
 public:
  RegressionTree(const Matrix& x, const Vector& y, std::vector<Eigen::Index> rows, int max_depth) : x_(x), y_(y) {
    build(std::move(rows), max_depth);
  }

  std::vector<TreeNode> release() { return std::move(nodes_); }

 private:
  int build(std::vector<Eigen::Index> rows, int depth_left) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto r : rows) sum += y_[r];
    const double n = static_cast<double>(rows.size());
    nodes_[id].value = sum / n;
    if (depth_left <= 0 || rows.size() < 2) return id;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = sum * sum / n + 1e-12 * std::abs(sum * sum / n) + 1e-15;
    std::vector<Eigen::Index> sorted = rows;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double xa = x_(a, f), xb = x_(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left_sum += y_[sorted[i]];
        const double xv = x_(sorted[i], f), xn = x_(sorted[i + 1], f);
        if (xv == xn) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double right_sum = sum - left_sum;
        // Maximizing this is equivalent to minimizing the children's total squared error.
        const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (xv + xn);
        }
      }
    }
    if (best_feature < 0) return id;
    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (x_(r, best_feature) <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int l = build(std::move(left), depth_left - 1);
    const int r = build(std::move(right), depth_left - 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  const Matrix& x_;
  const Vector& y_;
  std::vector<TreeNode> nodes_;
};

class ForestPredictor final : public detail::Predictor {
 public:
  explicit ForestPredictor(std::vector<std::vector<TreeNode>> trees) : trees_(std::move(trees)) {}

  double predict(const Eigen::Ref<const Vector>& x) const override {
    double sum = 0.0;
    for (const auto& tree : trees_) {
      int node = 0;
      while (tree[node].feature >= 0) {
        node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left : tree[node].right;
      }
      sum += tree[node].value;
    }
    return sum / static_cast<double>(trees_.size());
  }

 private:
  std::vector<std::vector<TreeNode>> trees_;
};

class MlpPredictor final : public detail::Predictor {
 public:
  MlpPredictor(Mlp net, Vector x_mean, Vector x_scale, double y_mean, double y_scale)
      : net_(std::move(net)), x_mean_(std::move(x_mean)), x_scale_(std::move(x_scale)), y_mean_(y_mean), y_scale_(y_scale) {}

  double predict(const Eigen::Ref<const Vector>& x) const override {
    Matrix row = ((x - x_mean_).cwiseQuotient(x_scale_)).transpose();
    return y_mean_ + y_scale_ * net_.forward(row)[0];
  }
  Vector predict_batch(const Matrix& x) const override {
    Matrix z = (x.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array();
    return (net_.forward(z).array() * y_scale_ + y_mean_).matrix();
  }

 private:
  Mlp net_;
  Vector x_mean_, x_scale_;
  double y_mean_, y_scale_;
};

void require_task(const Dataset& data, TaskKind task, const char* who) {
  if (data.task() != task) {
    throw Error(ErrorCode::TaskMismatch, std::string(who) + " requires a " + std::string(to_string(task)) + " dataset");
  }
}

// Regression targets as-is; classification labels mapped to 0/1 so averages estimate eta.
Vector estimation_targets(const Dataset& data) {
  if (data.task() == TaskKind::Regression) return data.responses();
  return (data.responses().array() + 1.0).matrix() * 0.5;
}

FittedEstimator fit_ols(const Dataset& data) {
  require_task(data, TaskKind::Regression, "OLS");
  const Matrix& x = data.features();
  const Vector& y = data.responses();
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (x.rows() < x.cols() || qr.rank() < x.cols()) {
    throw Error(ErrorCode::SingularDesign, "X^T X is singular (rank " + std::to_string(qr.rank()) + " < " +
                                               std::to_string(x.cols()) + ")");
  }
  Vector beta = qr.solve(y);
  // One step of iterative refinement on the normal equations.
  const Matrix gram = x.transpose() * x;
  const Vector rhs = x.transpose() * y;
  beta += gram.ldlt().solve(rhs - gram * beta);
  auto impl = std::make_shared<LinearPredictor>(beta, false);
  return FittedEstimator(EstimatorKind::OLS, TaskKind::Regression, impl, data.n(), beta);
}

FittedEstimator fit_logistic(const EstimatorSpec& spec, const Dataset& data) {
  require_task(data, TaskKind::Classification, "logistic MLE");
  auto fit = logistic_newton(data.features(), data.responses());
  Vector beta = fit.coefficients;
  const bool clipped = std::isfinite(spec.box) && beta.cwiseAbs().maxCoeff() > spec.box;
  if (!fit.converged && !clipped) {
    throw Error(ErrorCode::NonConvergence, "logistic Newton did not reach the gradient tolerance in " +
                                               std::to_string(fit.iterations) + " iterations");
  }
  if (std::isfinite(spec.box)) beta = beta.cwiseMax(-spec.box).cwiseMin(spec.box);
  auto impl = std::make_shared<LinearPredictor>(beta, true);
  return FittedEstimator(EstimatorKind::LogisticMLE, TaskKind::Classification, impl, data.n(), beta);
}

FittedEstimator fit_knn(const EstimatorSpec& spec, const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::EmptyOriginal, "KNN needs training data");
  const int k = std::min<int>(spec.k.value_or(default_knn_k(data.n(), data.p())), static_cast<int>(data.n()));
  auto impl = std::make_shared<KnnPredictor>(data.features(), estimation_targets(data), k);
  return FittedEstimator(EstimatorKind::KNN, data.task(), impl, data.n(), Vector::Constant(1, k));
}

FittedEstimator fit_forest(const EstimatorSpec& spec, const Dataset& data, const SeedSpec& seed) {
  if (data.empty()) throw Error(ErrorCode::EmptyOriginal, "random forest needs training data");
  const int trees = spec.trees.value_or(default_forest_trees(data.n()));
  const int depth = spec.depth.value_or(default_forest_depth(data.n()));
  const Matrix& x = data.features();
  const Vector y = estimation_targets(data);
  std::vector<std::vector<TreeNode>> forest;
  forest.reserve(static_cast<std::size_t>(trees));
  for (int t = 0; t < trees; ++t) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.n()));
    if (trees == 1) {
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    } else {
      Rng rng(seed.derive(static_cast<std::uint64_t>(t)));
      for (auto& r : rows) r = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(data.n())));
    }
    forest.push_back(RegressionTree(x, y, std::move(rows), depth).release());
  }
  auto impl = std::make_shared<ForestPredictor>(std::move(forest));
  return FittedEstimator(EstimatorKind::RandomForest, data.task(), impl, data.n(), Vector{{double(trees), double(depth)}});
}

FittedEstimator fit_mlp(const EstimatorSpec& spec, const Dataset& data, const SeedSpec& seed) {
  if (data.empty()) throw Error(ErrorCode::EmptyOriginal, "MLP needs training data");
  const Matrix& x = data.features();
  const Vector y = estimation_targets(data);
  const Vector x_mean = x.colwise().mean().transpose();
  Vector x_scale = ((x.rowwise() - x_mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
  x_scale = x_scale.unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
  const double y_mean = y.mean();
  double y_scale = std::sqrt((y.array() - y_mean).square().mean());
  if (!(y_scale > 0.0)) y_scale = 1.0;
  const Matrix xs = (x.rowwise() - x_mean.transpose()).array().rowwise() / x_scale.transpose().array();
  const Vector ys = (y.array() - y_mean) / y_scale;
  Mlp net(x.cols(), spec.layers, spec.hidden);
  net.initialize(seed.derive(1));
  net.train(xs, ys, spec.mlp, seed.derive(2));
  auto impl = std::make_shared<MlpPredictor>(std::move(net), x_mean, x_scale, y_mean, y_scale);
  return FittedEstimator(EstimatorKind::MLP, data.task(), impl, data.n());
}

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

FittedEstimator oracle_estimator(const Truth& truth, TaskKind task) {
  return FittedEstimator(EstimatorKind::Oracle, task, std::make_shared<OraclePredictor>(truth), 0, {}, "oracle");
}

double logistic_objective(const Matrix& x, const Vector& z, const Vector& beta) {
  const Vector margin = (x * beta).cwiseProduct(z);
  double total = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) total += softplus(-margin[i]);
  return total / static_cast<double>(x.rows());
}

LogisticFit logistic_newton(const Matrix& x, const Vector& z, int max_iterations, double grad_tol) {
  const Eigen::Index n = x.rows(), p = x.cols();
  LogisticFit fit;
  fit.coefficients = Vector::Zero(p);
  double obj = logistic_objective(x, z, fit.coefficients);
  fit.objective_trace.push_back(obj);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector margin = (x * fit.coefficients).cwiseProduct(z);
    Vector grad = Vector::Zero(p);
    Matrix hess = Matrix::Zero(p, p);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(margin[i]));  // sigma(-m)
      grad -= z[i] * s * x.row(i).transpose();
      w[i] = s * (1.0 - s);
    }
    grad /= static_cast<double>(n);
    if (grad.cwiseAbs().maxCoeff() < grad_tol) {
      fit.converged = true;
      fit.iterations = it;
      return fit;
    }
    hess = x.transpose() * w.asDiagonal() * x / static_cast<double>(n);
    Vector direction;
    Eigen::LDLT<Matrix> ldlt(hess);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) direction = -ldlt.solve(grad);
    if (direction.size() != p || !direction.allFinite() || direction.dot(grad) >= 0.0) direction = -grad;
    double step = 1.0;
    Vector candidate;
    double cand_obj = obj;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = fit.coefficients + step * direction;
      cand_obj = logistic_objective(x, z, candidate);
      if (cand_obj <= obj) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    fit.iterations = it + 1;
    if (!improved) {
      // No descent possible at machine precision: stationary for practical purposes.
      fit.converged = grad.cwiseAbs().maxCoeff() < 1e-6;
      return fit;
    }
    const bool stalled = obj - cand_obj <= 1e-14 * std::max(1.0, std::abs(obj));
    fit.coefficients = candidate;
    obj = cand_obj;
    fit.objective_trace.push_back(obj);
    // Rounding can keep the gradient just above grad_tol at the optimum.
    if (stalled && grad.cwiseAbs().maxCoeff() < 1e-6) {
      fit.converged = true;
      return fit;
    }
    if (fit.coefficients.cwiseAbs().maxCoeff() > 1e8) return fit;  // diverging on separable data
  }
  return fit;
}

FittedEstimator fit_estimator(const EstimatorSpec& spec, const Dataset& data, const SeedSpec& seed) {
  spec.validate();
  switch (spec.kind) {
    case EstimatorKind::Oracle: return oracle_estimator(*spec.truth, data.task());
    case EstimatorKind::OLS: return fit_ols(data);
    case EstimatorKind::LogisticMLE: return fit_logistic(spec, data);
    case EstimatorKind::KNN: return fit_knn(spec, data);
    case EstimatorKind::RandomForest: return fit_forest(spec, data, seed);
    case EstimatorKind::MLP: return fit_mlp(spec, data, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator kind");
}

}  // namespace syndatum
