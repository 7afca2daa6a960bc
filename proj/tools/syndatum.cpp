#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "syndatum/harness.hpp"
#include "syndatum/report_json.hpp"

using namespace syndatum;
using nlohmann::json;

namespace {

// Flags shared by the single-shot subcommands.
struct ScenarioFlags {
  std::string task = "regression";
  std::string real = "uniform lower=0 upper=1";
  std::string synth = "real";
  std::string truth = "identity";
  std::string noise = "none";
  std::string synthetic_noise;
  std::string estimator = "oracle";
  std::vector<std::string> classes;
  long n = 1000;
  long n_test = 50000;
  std::uint64_t seed = 1;
  std::string risk = "monte-carlo";
  long optimum_samples = 100000;

  void attach(CLI::App* app, bool want_classes, bool want_task = true) {
    if (want_task) app->add_option("--task", task, "regression|classification");
    app->add_option("--real", real, "real feature density spec");
    app->add_option("--synth", synth, "synthetic feature density spec, 'real' or 'resample'");
    app->add_option("--truth", truth, "true regression/probability function");
    app->add_option("--noise", noise, "response noise of the real data");
    app->add_option("--synthetic-noise", synthetic_noise, "noise added to synthetic responses");
    app->add_option("--estimator", estimator, "estimation model for synthetic responses");
    auto* cls = app->add_option("--class", classes, "downstream model class (repeatable)");
    if (want_classes) cls->required();
    app->add_option("--n", n, "original sample size");
    app->add_option("--n-test", n_test, "Monte Carlo test sample size");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--risk", risk, "monte-carlo|quadrature");
    app->add_option("--optimum-samples", optimum_samples, "draws used for population optima");
  }

  ScenarioConfig build() const {
    ConfigFile::Section s{{"task", task}, {"real_density", real}, {"synth_density", synth}, {"truth", truth},
                          {"noise", noise}, {"estimators", estimator}, {"n_grid", std::to_string(n)},
                          {"n_test", std::to_string(n_test)}, {"seed", std::to_string(seed)}, {"risk", risk},
                          {"optimum_samples", std::to_string(optimum_samples)},
                          {"classes", classes.empty() ? std::string("linear") : classes.front()}};
    if (!synthetic_noise.empty()) s["synthetic_noise"] = synthetic_noise;
    ScenarioConfig c = scenario_from_section("cli", s);
    c.model_classes = classes.empty() ? std::vector<std::string>{"linear"} : classes;
    c.validate();
    return c;
  }
};

struct Prepared {
  ScenarioConfig config;
  SeedSpec seed;
  Dataset original;
  SynthesisResult synth;
  DensityModel synth_density;
  Population synthetic_population;
};

Prepared prepare(const ScenarioFlags& flags) {
  ScenarioConfig c = flags.build();
  const SeedSpec seed = replication_seed(c, c.n_grid.front(), 0);
  Dataset original = draw_original(c, c.n_grid.front(), seed.derive(1));
  SynthesisResult synth = synthesize(c.synthesis(0, c.n_grid.front()), original, seed.derive(3));
  const DensityModel sd = c.synth_density.value_or(c.real_density);
  Population sp{sd, Truth{"estimate", synth.estimator.as_function(), {}},
                c.task == TaskKind::Regression ? synth.noise.variance : 0.0, c.task};
  return {std::move(c), seed, std::move(original), std::move(synth), sd, std::move(sp)};
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  for (Eigen::Index j = 0; j < d.p(); ++j) out << "x" << j + 1 << ',';
  out << "y\n";
  out << std::setprecision(12);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.p(); ++j) out << d.features()(i, j) << ',';
    out << d.responses()[i] << '\n';
  }
}

FittedModel fit_on(const BasisFunctionClass& cls, const Dataset& d) {
  return d.task() == TaskKind::Regression ? fit_regression(cls, d) : fit_classification(cls, d);
}

int cmd_synth(const ScenarioFlags& flags, const std::string& out) {
  const Prepared p = prepare(flags);
  if (out.empty() || out == "-") {
    write_dataset_csv(std::cout, p.synth.synthetic);
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + out + "'");
    write_dataset_csv(f, p.synth.synthetic);
  }
  return 0;
}

int cmd_fidelity(const std::string& real, const std::string& synth, double d) {
  const DensityModel p = parse_density(real);
  const DensityModel q = parse_density(synth);
  const double pq = chi_square_divergence(p, q);
  const double qp = chi_square_divergence(q, p);
  json j{{"chi2", json_number(pq)}, {"chi2_reverse", json_number(qp)}};
  if (p.dim() == 1) {
    j["certificate"] = to_json(certify_fidelity_level(p, q, d, default_fidelity_grid()));
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_utility(const ScenarioFlags& flags) {
  const Prepared p = prepare(flags);
  json out = json::object();
  const RiskConfig risk{p.config.risk_method, p.config.n_test, p.seed.derive(4)};
  for (const auto& name : p.config.model_classes) {
    const BasisFunctionClass cls = make_class(name, p.config.real_density.dim());
    out[name] = to_json(utility_metric(fit_on(cls, p.synth.synthetic), fit_on(cls, p.original),
                                       p.config.real_population(), risk));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_bound(const ScenarioFlags& flags, const std::string& task) {
  ScenarioFlags f = flags;
  if (task == "cls") f.task = "classification";
  if (task == "reg" || task == "lr") f.task = "regression";
  if (task == "lr" && f.classes.empty()) f.classes = {"linear"};
  const Prepared p = prepare(f);
  const ScenarioConfig& c = p.config;
  const double chi2 = c.synth_density ? chi_square_divergence(c.real_density, *c.synth_density) : 0.0;
  json out = json::object();
  if (task == "lr") {
    // Realized noise: residuals against the truth on both samples.
    const auto residual = [&](const Dataset& d, const PointFunction& mean) {
      Vector e(d.n());
      for (Eigen::Index i = 0; i < d.n(); ++i) e[i] = d.responses()[i] - mean(d.features().row(i).transpose());
      return e;
    };
    const TestSample test = TestSample::draw(c.real_population(), c.n_test, p.seed.derive(4));
    out["lr"] = to_json(lr_explicit_bound(
        p.original.features(), p.synth.synthetic.features(), residual(p.original, c.truth.fn),
        residual(p.synth.synthetic, p.synth.estimator.as_function()), c.real_density.variances(),
        p.synth_density.variances(), chi2, p.original.responses(), p.synth.synthetic.responses(),
        c.real_density.support(), test.x));
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  const RiskConfig risk{c.risk_method, c.n_test, p.seed.derive(7)};
  const BoundScenario scen{c.real_population(), p.synthetic_population};
  for (const auto& name : c.model_classes) {
    const BasisFunctionClass cls = make_class(name, c.real_density.dim());
    const FittedModel f_hat = fit_on(cls, p.original);
    const FittedModel f_tilde = fit_on(cls, p.synth.synthetic);
    const FittedModel f_star =
        population_optimum(cls, c.real_density, c.truth.fn, c.task, c.optimum_samples, p.seed.derive(5));
    const FittedModel f_tilde_star = population_optimum(cls, p.synth_density, p.synth.estimator.as_function(), c.task,
                                                        c.optimum_samples, p.seed.derive(6));
    const UtilityReport u = utility_metric(f_tilde, f_hat, c.real_population(), risk);
    json entry{{"utility", to_json(u)}};
    if (c.task == TaskKind::Regression) {
      entry["bound"] = to_json(regression_bound(
          scen, {scorer(f_hat), scorer(f_tilde), scorer(f_tilde_star), scorer(f_star)}, risk, chi2));
    } else {
      entry["bound"] = to_json(classification_bound(
          scen, {scorer(f_hat), scorer(f_tilde), scorer(f_tilde_star), scorer(f_star)}, risk, chi2));
    }
    out[name] = entry;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_compare(const ScenarioFlags& flags) {
  const Prepared p = prepare(flags);
  const ScenarioConfig& c = p.config;
  if (c.model_classes.size() != 2) throw Error(ErrorCode::ConfigError, "compare needs exactly two --class options");
  const Eigen::Index dim = c.real_density.dim();
  const ComparisonSetup setup{c.real_population(), p.synth_density, p.synth.estimator.as_function(), c.optimum_samples};
  const ComparisonReport rep = evaluate_comparison(make_class(c.model_classes[0], dim), make_class(c.model_classes[1], dim),
                                                   setup, {c.risk_method, c.n_test, p.seed.derive(4)}, p.seed.derive(5));
  std::cout << to_json(rep).dump(2) << '\n';
  return rep.indeterminate() ? 2 : 0;
}

int cmd_experiment(const std::string& builtin, const std::string& config, int scale, std::optional<std::uint64_t> seed,
                   std::optional<int> reps, const std::string& out_dir, int workers) {
  if (builtin.empty() == config.empty()) throw Error(ErrorCode::ConfigError, "give exactly one of a builtin name or --config");
  std::vector<ResultRow> rows;
  const RunOptions run{workers};
  if (!builtin.empty()) {
    rows = run_builtin(builtin, BuiltinOptions{scale, seed, reps}, run);
  } else {
    auto configs = load_scenarios(config);
    for (auto& c : configs) {
      if (seed) c.master_seed = *seed;
      if (reps) c.replications = *reps;
    }
    rows = run_scenarios(configs, run);
  }
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(std::filesystem::path(out_dir) / "rows.csv");
    if (!f) throw Error(ErrorCode::IoError, "cannot write rows.csv in '" + out_dir + "'");
    write_rows_csv(f, rows);
  }
  {
    std::ofstream f(std::filesystem::path(out_dir) / "summary.json");
    if (!f) throw Error(ErrorCode::IoError, "cannot write summary.json in '" + out_dir + "'");
    write_summary_json(f, summarize(rows, &std::cerr));
  }
  std::size_t errors = 0;
  for (const auto& r : rows) errors += !r.error.empty();
  std::cerr << rows.size() << " rows, " << errors << " with errors -> " << out_dir << '\n';
  return errors > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syndatum: utility theory toolkit for synthetic data"};
  app.require_subcommand(1);

  ScenarioFlags synth_flags, utility_flags, bound_flags, compare_flags;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "fit an estimation model and write a synthetic dataset as CSV");
  synth_flags.attach(synth, false);
  synth->add_option("--out", synth_out, "output CSV (default stdout)");

  std::string fid_real, fid_synth;
  double fid_d = 1.0;
  auto* fidelity = app.add_subcommand("fidelity", "chi-square divergences and a (V, d) fidelity certificate");
  fidelity->add_option("--real", fid_real, "real feature density spec")->required();
  fidelity->add_option("--synth", fid_synth, "synthetic feature density spec")->required();
  fidelity->add_option("--d", fid_d, "fidelity exponent d");

  auto* utility = app.add_subcommand("utility", "utility metric of synthetic versus original training");
  utility_flags.attach(utility, true);

  std::string bound_task = "reg";
  auto* bound = app.add_subcommand("bound", "utility bound decomposition as JSON");
  bound_flags.attach(bound, false, false);
  bound->add_option("--task", bound_task, "reg|cls|lr")->check(CLI::IsMember({"reg", "cls", "lr"}));

  auto* compare = app.add_subcommand("compare", "model comparison on population optima");
  compare_flags.attach(compare, true);

  std::string builtin, config_path, out_dir = "out";
  int scale = 1, workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  auto* experiment = app.add_subcommand("experiment", "run a builtin sweep or a config file");
  experiment->add_option("builtin", builtin, "builtin name")->check(CLI::IsMember(builtin_names()));
  experiment->add_option("--config", config_path, "scenario config file");
  experiment->add_option("--scale", scale, "divide n grid, replications and test size by this power of 2");
  experiment->add_option("--seed", seed, "master seed override");
  experiment->add_option("--replications", reps, "replication count override");
  experiment->add_option("--out", out_dir, "output directory");
  experiment->add_option("--workers", workers, "worker threads (SYNDATUM_WORKERS overrides)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return cmd_synth(synth_flags, synth_out);
    if (*fidelity) return cmd_fidelity(fid_real, fid_synth, fid_d);
    if (*utility) return cmd_utility(utility_flags);
    if (*bound) return cmd_bound(bound_flags, bound_task);
    if (*compare) return cmd_compare(compare_flags);
    if (*experiment) return cmd_experiment(builtin, config_path, scale, seed, reps, out_dir, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
