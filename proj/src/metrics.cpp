#include "syndatum/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "syndatum/quadrature.hpp"

namespace syndatum {

std::string_view to_string(LossKind loss) noexcept { return loss == LossKind::Squared ? "squared" : "zero-one"; }
std::string_view to_string(RiskMethod method) noexcept {
  return method == RiskMethod::MonteCarlo ? "monte-carlo" : "quadrature";
}

double Scorer::operator()(double x) const { return batch(Matrix::Constant(1, 1, x))[0]; }

Scorer scorer(const FittedModel& model) {
  auto copy = std::make_shared<FittedModel>(model);
  return {model.model_class().name(), [copy](const Matrix& x) { return copy->predict_batch(x); },
          model.breakpoints()};
}

Scorer scorer(const FittedEstimator& est) {
  if (est.task() == TaskKind::Regression) {
    return {est.label(), [est](const Matrix& x) { return est.predict_batch(x); }, {}};
  }
  return {est.label() + "-plugin", [est](const Matrix& x) { return Vector(est.predict_batch(x).array() - 0.5); }, {}};
}

Scorer bayes_scorer(const Truth& truth, TaskKind task) {
  const double shift = task == TaskKind::Classification ? 0.5 : 0.0;
  return {truth.name,
          [truth, shift](const Matrix& x) {
            Vector out(x.rows());
            for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = truth(x.row(i).transpose()) - shift;
            return out;
          },
          truth.breakpoints};
}

Scorer function_scorer(std::string label, PointFunction fn, std::vector<double> breakpoints) {
  return {std::move(label),
          [fn](const Matrix& x) {
            Vector out(x.rows());
            for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = fn(x.row(i).transpose());
            return out;
          },
          std::move(breakpoints)};
}

TestSample TestSample::draw(const Population& population, Eigen::Index n, const SeedSpec& seed) {
  TestSample s;
  s.x = population.density.sample(n, seed);
  s.truth.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.truth[i] = population.truth(s.x.row(i).transpose());
  s.noise_variance = population.noise_variance;
  s.task = population.task;
  return s;
}

namespace {

double point_loss(double score, double truth, double noise_variance, LossKind loss, bool excess) {
  if (loss == LossKind::Squared) {
    const double d = score - truth;
    return d * d + (excess ? 0.0 : noise_variance);
  }
  const double eta = std::clamp(truth, 0.0, 1.0);
  if (excess) {
    const bool disagree = (score >= 0.0) != (eta - 0.5 >= 0.0);
    return disagree ? std::abs(2.0 * eta - 1.0) : 0.0;
  }
  return score >= 0.0 ? 1.0 - eta : eta;
}

RiskEstimate quadrature_risk(const Scorer& model, const Population& population, LossKind loss, bool excess) {
  if (population.density.dim() != 1) {
    throw Error(ErrorCode::UnsupportedQuadrature, "quadrature risk is only available for 1-d features");
  }
  const DensityModel& density = population.density;
  const double a = density.support().lower[0], b = density.support().upper[0];
  const auto truth = [&](double x) { return population.truth(Vector::Constant(1, x)); };
  std::vector<double> points = density.breakpoints1();
  points.insert(points.end(), population.truth.breakpoints.begin(), population.truth.breakpoints.end());
  points.insert(points.end(), model.breakpoints.begin(), model.breakpoints.end());
  if (loss == LossKind::ZeroOne) {
    // The integrand jumps where the predicted sign or the Bayes sign changes.
    const auto s1 = quad::switch_points([&](double x) { return model(x) >= 0.0; }, a, b);
    const auto s2 = quad::switch_points([&](double x) { return truth(x) >= 0.5; }, a, b);
    points.insert(points.end(), s1.begin(), s1.end());
    points.insert(points.end(), s2.begin(), s2.end());
  }
  const auto cuts = quad::partition(a, b, points);
  const double value = quad::integrate(
      [&](double x) {
        const double w = density.pdf1(x);
        if (w == 0.0) return 0.0;
        return w * point_loss(model(x), truth(x), population.noise_variance, loss, excess);
      },
      a, b, cuts, 1e-12);
  return {value, 0.0, RiskMethod::Quadrature1D, loss, 0};
}

RiskEstimate risk_impl(const Scorer& model, const Population& population, LossKind loss, const RiskConfig& config,
                       bool excess) {
  if (config.method == RiskMethod::Quadrature1D) return quadrature_risk(model, population, loss, excess);
  if (config.n_test < 2) throw Error(ErrorCode::InvalidArgument, "n_test must be >= 2");
  const TestSample sample = TestSample::draw(population, config.n_test, config.seed);
  return summarize_losses(pointwise_loss(model.batch(sample.x), sample, loss, excess), loss);
}

}  // namespace

Vector pointwise_loss(const Vector& score, const TestSample& sample, LossKind loss, bool excess) {
  Vector out(score.size());
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    out[i] = point_loss(score[i], sample.truth[i], sample.noise_variance, loss, excess);
  }
  return out;
}

RiskEstimate summarize_losses(const Vector& losses, LossKind loss) {
  const double n = static_cast<double>(losses.size());
  const double mean = losses.mean();
  const double var = losses.size() > 1 ? (losses.array() - mean).square().sum() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), RiskMethod::MonteCarlo, loss, losses.size()};
}

RiskEstimate estimate_risk(const Scorer& model, const Population& population, LossKind loss, const RiskConfig& config) {
  return risk_impl(model, population, loss, config, false);
}

RiskEstimate excess_risk(const Scorer& model, const Population& population, LossKind loss, const RiskConfig& config) {
  return risk_impl(model, population, loss, config, true);
}

UtilityReport utility_metric(const Scorer& synthetic_model, const Scorer& original_model, const Population& population,
                             const RiskConfig& config) {
  UtilityReport report;
  report.task = population.task;
  const LossKind loss = loss_for(population.task);
  if (config.method == RiskMethod::Quadrature1D) {
    report.risk_synthetic = quadrature_risk(synthetic_model, population, loss, false);
    report.risk_original = quadrature_risk(original_model, population, loss, false);
  } else {
    const TestSample sample = TestSample::draw(population, config.n_test, config.seed);
    const Vector ls = pointwise_loss(synthetic_model.batch(sample.x), sample, loss, false);
    const Vector lo = pointwise_loss(original_model.batch(sample.x), sample, loss, false);
    report.risk_synthetic = summarize_losses(ls, loss);
    report.risk_original = summarize_losses(lo, loss);
    report.combined_std_error = summarize_losses(ls - lo, loss).std_error;
  }
  report.utility = std::abs(report.risk_synthetic.value - report.risk_original.value);
  return report;
}

UtilityReport utility_metric(const FittedModel& synthetic_model, const FittedModel& original_model,
                             const Population& population, const RiskConfig& config) {
  if (synthetic_model.task() != original_model.task() || synthetic_model.task() != population.task) {
    throw Error(ErrorCode::TaskMismatch, "utility_metric needs models and population on the same task");
  }
  return utility_metric(scorer(synthetic_model), scorer(original_model), population, config);
}

ComparisonReport evaluate_comparison(const BasisFunctionClass& class1, const BasisFunctionClass& class2,
                                     const ComparisonSetup& setup, const RiskConfig& config, const SeedSpec& seed) {
  const TaskKind task = setup.real.task;
  const auto real_fn = setup.real.truth.fn;
  // Both classes see the same optimization draw under each distribution.
  const FittedModel f1 = population_optimum(class1, setup.real.density, real_fn, task, setup.optimum_samples, seed.derive(1));
  const FittedModel f2 = population_optimum(class2, setup.real.density, real_fn, task, setup.optimum_samples, seed.derive(1));
  const FittedModel g1 =
      population_optimum(class1, setup.synthetic_density, setup.synthetic_truth, task, setup.optimum_samples, seed.derive(2));
  const FittedModel g2 =
      population_optimum(class2, setup.synthetic_density, setup.synthetic_truth, task, setup.optimum_samples, seed.derive(2));

  ComparisonReport report;
  const std::array<const FittedModel*, 4> models{&f1, &f2, &g1, &g2};
  const LossKind loss = loss_for(task);
  for (std::size_t k = 0; k < 4; ++k) report.coefficients[k] = models[k]->coefficients();
  if (config.method == RiskMethod::Quadrature1D) {
    for (std::size_t k = 0; k < 4; ++k) report.risks[k] = estimate_risk(scorer(*models[k]), setup.real, loss, config);
  } else {
    const TestSample sample = TestSample::draw(setup.real, config.n_test, config.seed);
    std::array<Vector, 4> losses;
    for (std::size_t k = 0; k < 4; ++k) {
      losses[k] = pointwise_loss(models[k]->predict_batch(sample.x), sample, loss, false);
      report.risks[k] = summarize_losses(losses[k], loss);
    }
    report.original_std_error = summarize_losses(losses[0] - losses[1], loss).std_error;
    report.synthetic_std_error = summarize_losses(losses[2] - losses[3], loss).std_error;
  }
  report.original_gap = report.risks[0].value - report.risks[1].value;
  report.synthetic_gap = report.risks[2].value - report.risks[3].value;
  const auto sign_with_band = [](double gap, double se) {
    // A tiny absolute floor keeps exact ties from being read as a sign.
    const double band = std::max(2.0 * se, 1e-12);
    return std::abs(gap) <= band ? 0 : (gap > 0.0 ? 1 : -1);
  };
  report.original_sign = sign_with_band(report.original_gap, report.original_std_error);
  report.synthetic_sign = sign_with_band(report.synthetic_gap, report.synthetic_std_error);
  report.consistent = report.original_sign != 0 && report.original_sign == report.synthetic_sign;
  return report;
}

ComparisonReport compare_models(const BasisFunctionClass& class1, const BasisFunctionClass& class2,
                                const ComparisonSetup& setup, const RiskConfig& config, const SeedSpec& seed) {
  ComparisonReport report = evaluate_comparison(class1, class2, setup, config, seed);
  if (report.indeterminate()) {
    throw Error(ErrorCode::Indeterminate, "risk gap inside the 2-standard-error dead band");
  }
  return report;
}

}  // namespace syndatum
