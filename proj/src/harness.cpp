#include "syndatum/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace syndatum {

std::string_view to_string(OutputKind kind) noexcept {
  switch (kind) {
    case OutputKind::Utility: return "utility";
    case OutputKind::Risks: return "risks";
    case OutputKind::Bound: return "bound";
    case OutputKind::Comparison: return "comparison";
    case OutputKind::Fidelity: return "fidelity";
  }
  return "unknown";
}

OutputKind parse_output(const std::string& text) {
  for (auto k : {OutputKind::Utility, OutputKind::Risks, OutputKind::Bound, OutputKind::Comparison, OutputKind::Fidelity}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown output '" + text + "'");
}

std::vector<std::string> metric_names(OutputKind kind) {
  switch (kind) {
    case OutputKind::Utility: return {"utility"};
    case OutputKind::Risks: return {"risk_original", "risk_synthetic"};
    case OutputKind::Bound: return {"bound_total"};
    case OutputKind::Comparison: return {"rank_agreement"};
    case OutputKind::Fidelity: return {"chi2"};
  }
  return {};
}

void ScenarioConfig::validate() const {
  if (n_grid.empty()) throw Error(ErrorCode::ConfigError, name + ": n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error(ErrorCode::ConfigError, name + ": n_grid must be positive and strictly ascending");
    }
  }
  if (replications < 1) throw Error(ErrorCode::ConfigError, name + ": replications must be >= 1");
  if (estimators.empty()) throw Error(ErrorCode::ConfigError, name + ": no estimators");
  if (model_classes.empty()) throw Error(ErrorCode::ConfigError, name + ": no model classes");
  if (outputs.empty()) throw Error(ErrorCode::ConfigError, name + ": no outputs");
  if (risk_method == RiskMethod::MonteCarlo && n_test < 2) throw Error(ErrorCode::ConfigError, name + ": n_test < 2");
  if (risk_method == RiskMethod::Quadrature1D && real_density.dim() != 1) {
    throw Error(ErrorCode::UnsupportedQuadrature, name + ": quadrature risk needs 1-d features");
  }
  if (synth_density && synth_density->dim() != real_density.dim()) {
    throw Error(ErrorCode::DimensionMismatch, name + ": real and synthetic densities differ in dimension");
  }
  for (const auto& e : estimators) e.validate();
  for (const auto& c : model_classes) make_class(c, real_density.dim());
  if (noise.variance < 0.0) throw Error(ErrorCode::InvalidVariance, name + ": negative noise variance");
}

Population ScenarioConfig::real_population() const {
  return {real_density, truth, task == TaskKind::Regression ? noise.variance : 0.0, task};
}

SynthesisConfig ScenarioConfig::synthesis(std::size_t estimator, Eigen::Index n) const {
  SynthesisConfig s{synth_density ? FeatureGeneratorSpec::from_density(*synth_density) : FeatureGeneratorSpec::resample(),
                    estimators.at(estimator), synthetic_n > 0 ? synthetic_n : n, synthetic_noise};
  return s;
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("SYNDATUM_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, requested);
}

SeedSpec replication_seed(const ScenarioConfig& config, Eigen::Index n, int replication) {
  return SeedSpec{config.master_seed, static_cast<std::uint64_t>(replication)}.derive(static_cast<std::uint64_t>(n));
}

Dataset draw_original(const ScenarioConfig& config, Eigen::Index n, const SeedSpec& seed) {
  Matrix x = config.real_density.sample(n, seed.derive(1));
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = config.truth(x.row(i).transpose());
  if (config.task == TaskKind::Regression) {
    y += sample_noise(config.noise, n, seed.derive(2));
  } else {
    Rng rng(seed.derive(2));
    for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < y[i] ? 1.0 : -1.0;
  }
  return make_dataset(std::move(x), std::move(y), config.task);
}

namespace {

// Seed tags inside one replication.
enum : std::uint64_t { kOriginal = 1, kSynthesis = 3, kTest = 4, kOptReal = 5, kOptSynth = 6, kBound = 7 };

struct Unit {
  std::size_t config;
  Eigen::Index n;
  int replication;
};

struct Context {
  const ScenarioConfig& config;
  Eigen::Index n;
  int replication;
  SeedSpec seed;
  double chi2;
};

ResultRow base_row(const Context& ctx, const std::string& estimator, const std::string& cls) {
  ResultRow r;
  r.scenario = ctx.config.name;
  r.param = ctx.config.param;
  r.n = ctx.n;
  r.replication = ctx.replication;
  r.estimator = estimator;
  r.model_class = cls;
  return r;
}

void push_error_rows(std::vector<ResultRow>& out, const Context& ctx, const std::string& estimator,
                     const std::string& cls, OutputKind kind, const std::string& error) {
  for (const auto& m : metric_names(kind)) {
    ResultRow r = base_row(ctx, estimator, cls);
    r.metric = m;
    r.error = error;
    out.push_back(std::move(r));
  }
}

// Re-raises an earlier failure under its original error name.
struct Carried : std::exception {
  std::string name;
  explicit Carried(std::string n) : name(std::move(n)) {}
  const char* what() const noexcept override { return name.c_str(); }
};

std::string error_name(const std::exception& e) {
  if (const auto* c = dynamic_cast<const Carried*>(&e)) return c->name;
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  return "InternalError";
}

FittedModel fit_on(const BasisFunctionClass& cls, const Dataset& data) {
  return data.task() == TaskKind::Regression ? fit_regression(cls, data) : fit_classification(cls, data);
}

// Ranks of the class risks; ties and gaps inside two paired standard errors
// make the rank of the classes involved indeterminate.
struct Ranking {
  std::vector<int> rank;
  std::vector<bool> indeterminate;
};

Ranking rank_classes(const std::vector<Vector>& losses, const std::vector<double>& risks, bool quadrature) {
  const std::size_t k = risks.size();
  Ranking out{std::vector<int>(k, 0), std::vector<bool>(k, false)};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double gap = risks[i] - risks[j];
      double band = 1e-12;
      if (!quadrature) band = std::max(band, 2.0 * summarize_losses(losses[i] - losses[j], LossKind::Squared).std_error);
      if (std::abs(gap) <= band) {
        out.indeterminate[i] = true;
      } else if (gap > 0.0) {
        ++out.rank[i];
      }
    }
  }
  return out;
}

std::vector<ResultRow> run_unit(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.config;
  std::vector<ResultRow> out;
  const Population real = cfg.real_population();
  const LossKind loss = loss_for(cfg.task);
  const bool quadrature = cfg.risk_method == RiskMethod::Quadrature1D;
  const Eigen::Index p = cfg.real_density.dim();

  std::vector<std::shared_ptr<BasisFunctionClass>> classes;
  for (const auto& c : cfg.model_classes) classes.push_back(std::make_shared<BasisFunctionClass>(make_class(c, p)));

  const auto needs = [&](OutputKind k) { return std::find(cfg.outputs.begin(), cfg.outputs.end(), k) != cfg.outputs.end(); };
  const bool need_real_opt = needs(OutputKind::Bound) || needs(OutputKind::Comparison) || cfg.mode == TrainingMode::PopulationOptima;

  std::optional<TestSample> test;
  if (!quadrature) test = TestSample::draw(real, cfg.n_test, ctx.seed.derive(kTest));
  RiskConfig risk{cfg.risk_method, cfg.n_test, ctx.seed.derive(kTest)};

  // Everything that depends on the original data only.
  std::optional<Dataset> original;
  std::string original_error;
  try {
    original = draw_original(cfg, ctx.n, ctx.seed.derive(kOriginal));
  } catch (const std::exception& e) {
    original_error = error_name(e);
  }
  std::vector<std::optional<FittedModel>> f_hat(classes.size()), f_star(classes.size());
  std::vector<std::string> f_hat_error(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    try {
      if (need_real_opt) {
        f_star[c] = population_optimum(*classes[c], cfg.real_density, cfg.truth.fn, cfg.task, cfg.optimum_samples,
                                       ctx.seed.derive(kOptReal));
      }
      if (cfg.mode == TrainingMode::PopulationOptima) {
        f_hat[c] = f_star[c];
      } else {
        if (!original) throw Carried(original_error);
        f_hat[c] = fit_on(*classes[c], *original);
      }
    } catch (const std::exception& e) {
      f_hat_error[c] = error_name(e);
    }
  }

  for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
    const std::string est_name = cfg.estimators[ei].name();
    std::optional<SynthesisResult> synth;
    std::string synth_error;
    try {
      if (!original) throw Carried(original_error);
      if (cfg.mode == TrainingMode::PopulationOptima) {
        // Only the fitted estimator is needed; optima replace the synthetic sample.
        FittedEstimator est = fit_estimator(cfg.estimators[ei], *original, ctx.seed.derive(kSynthesis).derive(1));
        synth.emplace(SynthesisResult{Dataset{}, std::move(est), cfg.synthetic_noise.value_or(NoiseModel::none())});
      } else {
        synth = synthesize(cfg.synthesis(ei, ctx.n), *original, ctx.seed.derive(kSynthesis));
      }
    } catch (const std::exception& e) {
      synth_error = error_name(e);
    }
    const DensityModel synth_density = cfg.synth_density.value_or(cfg.real_density);
    Truth mu_hat;
    if (synth) mu_hat = Truth{"estimate", synth->estimator.as_function(), {}};
    // Comparison ranks need all classes at once.
    std::vector<std::optional<FittedModel>> f_tilde_star(classes.size());
    std::vector<std::optional<FittedModel>> f_tilde(classes.size());
    std::vector<std::string> tilde_error(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      try {
        if (!synth) throw Carried(synth_error);
        const bool need_opt = needs(OutputKind::Bound) || needs(OutputKind::Comparison) ||
                              cfg.mode == TrainingMode::PopulationOptima;
        if (need_opt) {
          f_tilde_star[c] = population_optimum(*classes[c], synth_density, mu_hat.fn, cfg.task, cfg.optimum_samples,
                                               ctx.seed.derive(kOptSynth));
        }
        f_tilde[c] = cfg.mode == TrainingMode::PopulationOptima ? f_tilde_star[c] : fit_on(*classes[c], synth->synthetic);
      } catch (const std::exception& e) {
        tilde_error[c] = error_name(e);
      }
    }

    std::optional<Ranking> rank_real, rank_synth;
    std::string rank_error;
    if (needs(OutputKind::Comparison)) {
      try {
        std::vector<Vector> lr, ls;
        std::vector<double> rr, rs;
        for (std::size_t c = 0; c < classes.size(); ++c) {
          if (!f_star[c] || !f_tilde_star[c]) throw Error(ErrorCode::Indeterminate, "missing population optimum");
          if (quadrature) {
            rr.push_back(estimate_risk(scorer(*f_star[c]), real, loss, risk).value);
            rs.push_back(estimate_risk(scorer(*f_tilde_star[c]), real, loss, risk).value);
            lr.emplace_back();
            ls.emplace_back();
          } else {
            lr.push_back(pointwise_loss(f_star[c]->predict_batch(test->x), *test, loss, false));
            ls.push_back(pointwise_loss(f_tilde_star[c]->predict_batch(test->x), *test, loss, false));
            rr.push_back(lr.back().mean());
            rs.push_back(ls.back().mean());
          }
        }
        rank_real = rank_classes(lr, rr, quadrature);
        rank_synth = rank_classes(ls, rs, quadrature);
      } catch (const std::exception& e) {
        rank_error = error_name(e);
      }
    }

    for (std::size_t c = 0; c < classes.size(); ++c) {
      const std::string& cls_name = cfg.model_classes[c];
      for (OutputKind kind : cfg.outputs) {
        try {
          if (kind == OutputKind::Fidelity) {
            ResultRow r = base_row(ctx, est_name, cls_name);
            r.metric = "chi2";
            r.value = ctx.chi2;
            out.push_back(std::move(r));
            continue;
          }
          if (kind == OutputKind::Comparison) {
            if (!rank_real) throw Carried(rank_error);
            ResultRow r = base_row(ctx, est_name, cls_name);
            r.metric = "rank_agreement";
            if (rank_real->indeterminate[c] || rank_synth->indeterminate[c]) {
              r.error = std::string(to_string(ErrorCode::Indeterminate));
            } else {
              r.value = rank_real->rank[c] == rank_synth->rank[c] ? 1.0 : 0.0;
            }
            out.push_back(std::move(r));
            continue;
          }
          if (!f_hat[c]) throw Carried(f_hat_error[c]);
          if (!f_tilde[c]) throw Carried(tilde_error[c]);
          if (kind == OutputKind::Utility || kind == OutputKind::Risks) {
            UtilityReport u;
            if (quadrature) {
              u = utility_metric(*f_tilde[c], *f_hat[c], real, risk);
            } else {
              const Vector ls = pointwise_loss(f_tilde[c]->predict_batch(test->x), *test, loss, false);
              const Vector lo = pointwise_loss(f_hat[c]->predict_batch(test->x), *test, loss, false);
              u.risk_synthetic = summarize_losses(ls, loss);
              u.risk_original = summarize_losses(lo, loss);
              u.combined_std_error = summarize_losses(ls - lo, loss).std_error;
              u.utility = std::abs(u.risk_synthetic.value - u.risk_original.value);
            }
            if (kind == OutputKind::Utility) {
              ResultRow r = base_row(ctx, est_name, cls_name);
              r.metric = "utility";
              r.value = u.utility;
              r.std_error = u.combined_std_error;
              out.push_back(std::move(r));
            } else {
              ResultRow a = base_row(ctx, est_name, cls_name);
              a.metric = "risk_original";
              a.value = u.risk_original.value;
              a.std_error = u.risk_original.std_error;
              ResultRow b = base_row(ctx, est_name, cls_name);
              b.metric = "risk_synthetic";
              b.value = u.risk_synthetic.value;
              b.std_error = u.risk_synthetic.std_error;
              out.push_back(std::move(a));
              out.push_back(std::move(b));
            }
            continue;
          }
          // Bound
          if (!f_star[c] || !f_tilde_star[c]) throw Error(ErrorCode::InvalidArgument, "missing population optimum");
          BoundScenario scen{real, Population{synth_density, mu_hat,
                                              cfg.task == TaskKind::Regression ? synth->noise.variance : 0.0, cfg.task}};
          RiskConfig bcfg = risk;
          bcfg.seed = ctx.seed.derive(kBound);
          ResultRow r = base_row(ctx, est_name, cls_name);
          r.metric = "bound_total";
          if (cfg.task == TaskKind::Regression) {
            const auto rep = regression_bound(
                scen, {scorer(*f_hat[c]), scorer(*f_tilde[c]), scorer(*f_tilde_star[c]), scorer(*f_star[c])}, bcfg,
                ctx.chi2);
            r.value = rep.total;
            if (rep.infinite) r.error = std::string(to_string(ErrorCode::InfiniteBound));
          } else {
            const auto rep = classification_bound(
                scen, {scorer(*f_hat[c]), scorer(*f_tilde[c]), scorer(*f_tilde_star[c]), scorer(*f_star[c])}, bcfg,
                ctx.chi2);
            r.value = rep.total;
            if (rep.infinite) r.error = std::string(to_string(ErrorCode::InfiniteBound));
          }
          out.push_back(std::move(r));
        } catch (const std::exception& e) {
          push_error_rows(out, ctx, est_name, cls_name, kind, error_name(e));
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_scenarios(const std::vector<ScenarioConfig>& configs, const RunOptions& options) {
  std::vector<double> chi2(configs.size(), 0.0);
  std::vector<Unit> units;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].validate();
    const auto& c = configs[i];
    const bool fidelity_needed = std::any_of(c.outputs.begin(), c.outputs.end(), [](OutputKind k) {
      return k == OutputKind::Fidelity || k == OutputKind::Bound;
    });
    if (fidelity_needed) {
      chi2[i] = c.synth_density ? chi_square_divergence(c.real_density, *c.synth_density) : 0.0;
    }
    for (Eigen::Index n : c.n_grid) {
      for (int r = 0; r < c.replications; ++r) units.push_back({i, n, r});
    }
  }
  std::vector<std::vector<ResultRow>> results(units.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t u = next++; u < units.size(); u = next++) {
      const Unit& unit = units[u];
      const ScenarioConfig& cfg = configs[unit.config];
      Context ctx{cfg, unit.n, unit.replication, replication_seed(cfg, unit.n, unit.replication), chi2[unit.config]};
      results[u] = run_unit(ctx);
    }
  };
  const int workers = std::min<int>(resolve_workers(options.workers), static_cast<int>(std::max<std::size_t>(units.size(), 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  // Units are already in (config, n, replication) order; concatenation is schedule-independent.
  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  return rows;
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  return run_scenarios({config}, options);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, std::ostream* warnings) {
  using Key = std::tuple<std::string, std::string, Eigen::Index, std::string, std::string, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<Key> order;
  std::vector<std::vector<double>> values;
  std::vector<int> errors;
  for (const auto& r : rows) {
    Key key{r.scenario, r.param, r.n, r.estimator, r.model_class, r.metric};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, order.size()).first;
      order.push_back(key);
      values.emplace_back();
      errors.push_back(0);
    }
    if (r.error.empty()) values[it->second].push_back(r.value);
    else ++errors[it->second];
  }
  std::vector<SummaryRow> out;
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& [scenario, param, n, est, cls, metric] = order[g];
    const auto& v = values[g];
    if (v.empty()) {
      if (warnings) {
        *warnings << "warning: no successful rows for " << scenario << " " << param << " n=" << n << " " << est << " "
                  << cls << " " << metric << " (" << errors[g] << " errors); omitted\n";
      }
      continue;
    }
    SummaryRow s{scenario, param, n, est, cls, metric};
    const double k = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / k;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    const double half = 1.96 * s.sd / std::sqrt(k);
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    s.count = static_cast<int>(v.size());
    s.errors = errors[g];
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "scenario,param,n,replication,estimator,model_class,metric,value,std_error,error\n";
  for (const auto& r : rows) {
    out << csv_field(r.scenario) << ',' << csv_field(r.param) << ',' << r.n << ',' << r.replication << ','
        << csv_field(r.estimator) << ',' << csv_field(r.model_class) << ',' << r.metric << ','
        << (r.error.empty() ? format_number(r.value) : std::string()) << ','
        << (r.error.empty() ? format_number(r.std_error) : std::string()) << ',' << r.error << '\n';
  }
}

void write_summary_json(std::ostream& out, const std::vector<SummaryRow>& summary) {
  nlohmann::json arr = nlohmann::json::array();
  const auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  for (const auto& s : summary) {
    arr.push_back({{"scenario", s.scenario},
                   {"param", s.param},
                   {"n", s.n},
                   {"estimator", s.estimator},
                   {"model_class", s.model_class},
                   {"metric", s.metric},
                   {"mean", num(s.mean)},
                   {"sd", num(s.sd)},
                   {"ci95", {num(s.ci_low), num(s.ci_high)}},
                   {"count", s.count},
                   {"errors", s.errors}});
  }
  out << nlohmann::json{{"version", 1}, {"groups", arr}}.dump(2) << '\n';
}

DensityModel parse_density(const std::string& spec) {
  const SpecItem item = parse_spec_item(spec);
  const auto box = [&]() {
    if (item.has("lower")) return BoxSupport(item.vector("lower"), item.vector("upper"));
    const Vector b = item.vector("box");
    if (b.size() != 2) throw Error(ErrorCode::ConfigError, "box expects lo,hi");
    return BoxSupport::cube(item.has("p") ? item.integer("p") : 1, b[0], b[1]);
  };
  if (item.name == "uniform") return DensityModel::uniform_box(box());
  if (item.name == "tn" || item.name == "truncated-normal") {
    const BoxSupport s = box();
    const Vector mean = item.has("mean") ? item.vector("mean") : Vector::Zero(s.dim());
    Vector var = item.has("var") ? item.vector("var") : Vector::Ones(s.dim());
    if (var.size() == 1 && s.dim() > 1) var = Vector::Constant(s.dim(), var[0]);
    return DensityModel::truncated_normal(s, mean.size() == 1 && s.dim() > 1 ? Vector::Constant(s.dim(), mean[0]) : mean,
                                          var);
  }
  if (item.name == "two-block") return DensityModel::two_block(item.number("alpha"));
  if (item.name == "tilt") return DensityModel::linear_tilt(item.number("alpha"));
  if (item.name == "triangular") return DensityModel::triangular(!item.has_flag("decreasing"));
  if (item.name == "piecewise") {
    const Vector b = item.vector("breaks"), h = item.vector("heights");
    return DensityModel::piecewise_constant(std::vector<double>(b.data(), b.data() + b.size()),
                                            std::vector<double>(h.data(), h.data() + h.size()));
  }
  throw Error(ErrorCode::ConfigError, "unknown density '" + item.name + "'");
}

NoiseModel parse_noise(const std::string& spec) {
  const SpecItem item = parse_spec_item(spec);
  if (item.name == "none") return NoiseModel::none();
  const double v = item.number_or("var", item.flags.empty() ? 0.0 : parse_number(item.flags.front()));
  if (v < 0.0) throw Error(ErrorCode::InvalidVariance, "noise variance must be >= 0");
  if (item.name == "gaussian") return NoiseModel::gaussian(v);
  if (item.name == "uniform" || item.name == "bounded-uniform") return NoiseModel::bounded_uniform(v);
  throw Error(ErrorCode::ConfigError, "unknown noise '" + item.name + "'");
}

ScenarioConfig scenario_from_section(const std::string& name, const ConfigFile::Section& section) {
  ScenarioConfig c;
  c.name = name;
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = section.find(key);
    return it == section.end() ? nullptr : &it->second;
  };
  static const std::vector<std::string> known = {
      "task", "param", "real_density", "synth_density", "truth", "noise", "synthetic_noise", "estimators",
      "classes", "n_grid", "synthetic_n", "replications", "n_test", "seed", "outputs", "mode", "risk",
      "optimum_samples"};
  for (const auto& [key, value] : section) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::ConfigError, "[" + name + "]: unknown key '" + key + "'");
    }
  }
  if (const auto* v = get("task")) c.task = parse_task(*v);
  if (const auto* v = get("param")) c.param = *v;
  const auto* real = get("real_density");
  if (!real) throw Error(ErrorCode::ConfigError, "[" + name + "]: real_density is required");
  c.real_density = parse_density(*real);
  if (const auto* v = get("synth_density")) {
    if (trim(*v) == "resample") c.synth_density.reset();
    else if (trim(*v) == "real") c.synth_density = c.real_density;
    else c.synth_density = parse_density(*v);
  } else {
    c.synth_density = c.real_density;
  }
  const auto* truth = get("truth");
  if (!truth) throw Error(ErrorCode::ConfigError, "[" + name + "]: truth is required");
  c.truth = parse_truth(*truth);
  if (const auto* v = get("noise")) c.noise = parse_noise(*v);
  if (const auto* v = get("synthetic_noise")) c.synthetic_noise = parse_noise(*v);
  const auto* ests = get("estimators");
  for (const auto& e : split_list(ests ? *ests : "oracle", '|')) c.estimators.push_back(parse_estimator(e, c.truth));
  const auto* classes = get("classes");
  if (!classes) throw Error(ErrorCode::ConfigError, "[" + name + "]: classes is required");
  c.model_classes = split_list(*classes, '|');
  if (const auto* v = get("n_grid")) {
    c.n_grid.clear();
    for (const auto& s : split_list(*v)) c.n_grid.push_back(static_cast<Eigen::Index>(parse_number(s)));
  }
  if (const auto* v = get("synthetic_n")) c.synthetic_n = trim(*v) == "equal" ? 0 : static_cast<Eigen::Index>(parse_number(*v));
  if (const auto* v = get("replications")) c.replications = static_cast<int>(parse_number(*v));
  if (const auto* v = get("n_test")) c.n_test = static_cast<Eigen::Index>(parse_number(*v));
  if (const auto* v = get("seed")) c.master_seed = static_cast<std::uint64_t>(std::stoull(trim(*v)));
  if (const auto* v = get("outputs")) {
    c.outputs.clear();
    for (const auto& s : split_list(*v)) c.outputs.push_back(parse_output(s));
  }
  if (const auto* v = get("mode")) {
    if (trim(*v) == "population") c.mode = TrainingMode::PopulationOptima;
    else if (trim(*v) == "sample") c.mode = TrainingMode::Sample;
    else throw Error(ErrorCode::ConfigError, "[" + name + "]: mode must be sample or population");
  }
  if (const auto* v = get("risk")) {
    if (trim(*v) == "quadrature") c.risk_method = RiskMethod::Quadrature1D;
    else if (trim(*v) == "monte-carlo") c.risk_method = RiskMethod::MonteCarlo;
    else throw Error(ErrorCode::ConfigError, "[" + name + "]: risk must be monte-carlo or quadrature");
  }
  if (const auto* v = get("optimum_samples")) c.optimum_samples = static_cast<Eigen::Index>(parse_number(*v));
  c.validate();
  return c;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path) {
  const ConfigFile file = ConfigFile::load(path);
  std::vector<ScenarioConfig> out;
  for (const auto& name : file.section_names()) out.push_back(scenario_from_section(name, file.section(name)));
  if (out.empty()) throw Error(ErrorCode::ConfigError, "no scenarios in '" + path + "'");
  return out;
}

}  // namespace syndatum
