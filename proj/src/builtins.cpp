#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "syndatum/harness.hpp"

namespace syndatum {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240607;

std::string alpha_label(double alpha) {
  std::ostringstream ss;
  ss << "alpha=" << alpha;
  return ss.str();
}

struct Scaler {
  int scale;
  Eigen::Index n(Eigen::Index v) const { return std::max<Eigen::Index>(1, v / scale); }
  int reps(int v) const { return std::max(1, v / scale); }
};

void apply(ScenarioConfig& c, const BuiltinOptions& o, int reps, const Scaler& s) {
  c.master_seed = o.seed.value_or(kDefaultSeed);
  c.replications = o.replications.value_or(s.reps(reps));
}

std::vector<Eigen::Index> doubling(Eigen::Index base, int from, int to, const Scaler& s) {
  std::vector<Eigen::Index> out;
  for (int i = from; i <= to; ++i) out.push_back(s.n(base << i));
  return out;
}

ScenarioConfig fig34(bool uniform_synthetic, const BuiltinOptions& o, const Scaler& s) {
  ScenarioConfig c;
  c.name = uniform_synthetic ? "fig4" : "fig3";
  c.task = TaskKind::Regression;
  const BoxSupport box = BoxSupport::cube(2, -2.0, 2.0);
  c.real_density = DensityModel::truncated_normal(box, Vector::Ones(2), Vector::Ones(2));
  c.synth_density = uniform_synthetic ? DensityModel::uniform_box(box) : c.real_density;
  c.truth = truths::exp_difference();
  c.noise = NoiseModel::gaussian(1.0);
  c.estimators = {EstimatorSpec::knn(), EstimatorSpec::random_forest(), EstimatorSpec::mlp_default(),
                  EstimatorSpec::oracle(c.truth)};
  c.model_classes = {"linear", "quadratic", "exp2"};
  c.n_grid = doubling(1000, 1, 5, s);
  c.n_test = s.n(50000);
  c.outputs = {OutputKind::Utility};
  apply(c, o, 100, s);
  return c;
}

std::vector<ScenarioConfig> fig5(const BuiltinOptions& o, const Scaler& s) {
  std::vector<ScenarioConfig> out;
  for (int i = 0; i <= 5; ++i) {
    const double alpha = 0.1 * i;
    ScenarioConfig c;
    c.name = "fig5";
    c.param = alpha_label(alpha);
    c.real_density = DensityModel::uniform_box(BoxSupport::interval(0.0, 2.0));
    c.synth_density = DensityModel::linear_tilt(alpha);
    c.truth = truths::reciprocal_cubic((Vector(4) << 1.0, -2.0, -2.0, 1.0).finished());
    c.noise = NoiseModel::none();
    c.synthetic_noise = NoiseModel::none();
    c.estimators = {EstimatorSpec::oracle(c.truth)};
    c.model_classes = {"recip-cubic-0", "recip-cubic-1", "recip-cubic-2", "recip-cubic-3"};
    c.n_grid = {s.n(10000)};
    c.n_test = s.n(50000);
    c.outputs = {OutputKind::Risks};
    apply(c, o, 100, s);
    out.push_back(std::move(c));
  }
  return out;
}

ScenarioConfig figS1(bool logistic, const BuiltinOptions& o, const Scaler& s) {
  ScenarioConfig c;
  c.name = logistic ? "figS1-logistic" : "figS1-linear";
  const BoxSupport box = BoxSupport::cube(4, -4.0, 4.0);
  c.real_density = DensityModel::truncated_normal(box, Vector::Zero(4), Vector::Ones(4));
  c.synth_density = DensityModel::uniform_box(box);
  const Vector beta = (Vector(4) << 1.0, -1.0, 0.5, -0.5).finished();
  if (logistic) {
    c.task = TaskKind::Classification;
    c.truth = truths::logistic(beta);
    c.estimators = {EstimatorSpec::logistic(4.0)};
    c.model_classes = {"logistic-linear B=4"};
  } else {
    c.task = TaskKind::Regression;
    c.truth = truths::linear(beta);
    c.noise = NoiseModel::gaussian(1.0);
    c.synthetic_noise = NoiseModel::gaussian(1.0);
    c.estimators = {EstimatorSpec::ols()};
    c.model_classes = {"linear"};
  }
  c.n_grid = doubling(100, 1, 4, Scaler{1});
  for (auto& n : c.n_grid) n = s.n(n);
  c.n_test = s.n(50000);
  apply(c, o, 500, s);
  return c;
}

ScenarioConfig population_toy(const std::string& name, double alpha, const BuiltinOptions& o) {
  ScenarioConfig c;
  c.name = name;
  c.param = alpha_label(alpha);
  c.n_grid = {1000};
  c.n_test = 2;
  c.mode = TrainingMode::PopulationOptima;
  c.risk_method = RiskMethod::Quadrature1D;
  c.master_seed = o.seed.value_or(kDefaultSeed);
  c.replications = 1;
  return c;
}

std::vector<ScenarioConfig> toy51(const BuiltinOptions& o) {
  std::vector<ScenarioConfig> out;
  for (double alpha : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    ScenarioConfig c = population_toy("toy-5.1", alpha, o);
    c.real_density = DensityModel::uniform_box(BoxSupport::interval(-1.0, 1.0));
    c.synth_density = DensityModel::two_block(alpha);
    c.truth = truths::abs_value();
    c.estimators = {EstimatorSpec::oracle(c.truth)};
    c.model_classes = {"linear", "abs"};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ScenarioConfig> toyS1(const BuiltinOptions& o) {
  std::vector<ScenarioConfig> out;
  for (double alpha : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    ScenarioConfig c = population_toy("toy-S.1", alpha, o);
    c.task = TaskKind::Classification;
    c.real_density = DensityModel::two_block(1.0 - alpha);
    c.synth_density = DensityModel::two_block(alpha);
    c.truth = truths::positive_indicator();
    c.estimators = {EstimatorSpec::oracle(c.truth)};
    c.model_classes = {"sign-abs", "sign-linear"};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ScenarioConfig> toy61(const BuiltinOptions& o) {
  ScenarioConfig reg = population_toy("toy-6.1", 5.0 / 6.0, o);
  reg.real_density = DensityModel::two_block(1.0 / 6.0);
  reg.synth_density = DensityModel::two_block(5.0 / 6.0);
  reg.truth = truths::identity();
  reg.estimators = {EstimatorSpec::oracle(reg.truth)};
  reg.model_classes = {"constant box=-0.5,0.5", "constant box=-0.25,0.25"};
  reg.outputs = {OutputKind::Comparison};

  ScenarioConfig cls = population_toy("toy-6.1", 0.75, o);
  cls.task = TaskKind::Classification;
  cls.real_density = DensityModel::two_block(0.75);
  cls.synth_density = DensityModel::two_block(0.25);
  cls.truth = truths::positive_indicator();
  cls.estimators = {EstimatorSpec::oracle(cls.truth)};
  cls.model_classes = {"threshold-abs box=0,0.5", "threshold-abs box=0.25,1/3"};
  cls.outputs = {OutputKind::Comparison};
  return {reg, cls};
}

// The two-class comparison with optima and risks spelled out, one row per quantity.
std::vector<ResultRow> comparison_rows(const ScenarioConfig& c) {
  const Eigen::Index p = c.real_density.dim();
  const BasisFunctionClass a = make_class(c.model_classes.at(0), p);
  const BasisFunctionClass b = make_class(c.model_classes.at(1), p);
  const ComparisonSetup setup{c.real_population(), c.synth_density.value_or(c.real_density), c.truth.fn,
                              c.optimum_samples};
  const SeedSpec seed{c.master_seed, 0};
  const ComparisonReport rep = evaluate_comparison(a, b, setup, {c.risk_method, c.n_test, seed.derive(4)}, seed.derive(5));
  std::vector<ResultRow> rows;
  const auto add = [&](const std::string& cls, const std::string& metric, double value, double se) {
    ResultRow r;
    r.scenario = c.name;
    r.param = c.param;
    r.n = c.optimum_samples;
    r.estimator = c.estimators.front().name();
    r.model_class = cls;
    r.metric = metric;
    r.value = value;
    r.std_error = se;
    rows.push_back(std::move(r));
  };
  const std::array<std::string, 2> names{c.model_classes[0], c.model_classes[1]};
  for (int k = 0; k < 2; ++k) {
    add(names[k], "optimum_real", rep.coefficients[k][0], 0.0);
    add(names[k], "optimum_synthetic", rep.coefficients[2 + k][0], 0.0);
    add(names[k], "risk_real_optimum", rep.risks[k].value, rep.risks[k].std_error);
    add(names[k], "risk_synthetic_optimum", rep.risks[2 + k].value, rep.risks[2 + k].std_error);
  }
  const std::string pair = names[0] + " vs " + names[1];
  add(pair, "gap_real", rep.original_gap, rep.original_std_error);
  add(pair, "gap_synthetic", rep.synthetic_gap, rep.synthetic_std_error);
  add(pair, "consistent", rep.consistent ? 1.0 : 0.0, 0.0);
  if (rep.indeterminate()) rows.back().error = std::string(to_string(ErrorCode::Indeterminate));
  return rows;
}

std::vector<ResultRow> fidelity_fig2_rows() {
  const DensityModel p = DensityModel::triangular(true);
  const DensityModel q = DensityModel::triangular(false);
  std::vector<ResultRow> rows;
  for (double C : default_fidelity_grid()) {
    const double tail = fidelity_tail_probability(p, q, C);
    std::ostringstream label;
    label << "C=" << std::setprecision(10) << C;
    for (const auto& [metric, value] : {std::pair<std::string, double>{"tail", tail}, {"bound", 2.0 / C}}) {
      ResultRow r;
      r.scenario = "fidelity-fig2";
      r.param = label.str();
      r.estimator = "none";
      r.model_class = "none";
      r.metric = metric;
      r.value = value;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"fig3", "fig4", "fig5", "figS1-linear", "figS1-logistic",
                                                 "toy-5.1", "toy-S.1", "toy-6.1", "fidelity-fig2"};
  return names;
}

std::vector<ScenarioConfig> builtin_scenarios(const std::string& name, const BuiltinOptions& options) {
  const int scale = options.scale;
  if (scale < 1 || (scale & (scale - 1)) != 0) throw Error(ErrorCode::ConfigError, "scale must be a power of 2");
  if (options.replications && *options.replications < 1) throw Error(ErrorCode::ConfigError, "replications must be >= 1");
  const Scaler s{scale};
  if (name == "fig3") return {fig34(false, options, s)};
  if (name == "fig4") return {fig34(true, options, s)};
  if (name == "fig5") return fig5(options, s);
  if (name == "figS1-linear") return {figS1(false, options, s)};
  if (name == "figS1-logistic") return {figS1(true, options, s)};
  if (name == "toy-5.1") return toy51(options);
  if (name == "toy-S.1") return toyS1(options);
  if (name == "toy-6.1") return toy61(options);
  if (name == "fidelity-fig2") return {};
  throw Error(ErrorCode::UnknownBuiltin, "unknown builtin '" + name + "'");
}

std::vector<ResultRow> run_builtin(const std::string& name, const BuiltinOptions& options, const RunOptions& run) {
  if (name == "fidelity-fig2") return fidelity_fig2_rows();
  auto configs = builtin_scenarios(name, options);
  if (name == "toy-6.1") {
    std::vector<ResultRow> rows;
    for (const auto& c : configs) {
      auto r = comparison_rows(c);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
  }
  return run_scenarios(configs, run);
}

}  // namespace syndatum
