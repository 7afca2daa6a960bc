#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "syndatum/bounds.hpp"
#include "syndatum/config.hpp"
#include "syndatum/synthesis.hpp"

namespace syndatum {

enum class OutputKind { Utility, Risks, Bound, Comparison, Fidelity };
enum class TrainingMode {
  /// Fit downstream models on finite original and synthetic samples.
  Sample,
  /// Replace both fits by population optima (large-sample ERM).
  PopulationOptima,
};

std::string_view to_string(OutputKind kind) noexcept;
OutputKind parse_output(const std::string& text);

struct ScenarioConfig {
  std::string name = "scenario";
  /// Free-form label for swept parameters, e.g. "alpha=0.5".
  std::string param;
  TaskKind task = TaskKind::Regression;
  DensityModel real_density = DensityModel::uniform_box(BoxSupport::interval(0.0, 1.0));
  /// Empty means resampling the original rows.
  std::optional<DensityModel> synth_density;
  Truth truth = truths::zero();
  NoiseModel noise = NoiseModel::none();
  std::optional<NoiseModel> synthetic_noise;
  std::vector<EstimatorSpec> estimators;
  std::vector<std::string> model_classes;
  std::vector<Eigen::Index> n_grid{1000};
  /// 0 means ñ = n.
  Eigen::Index synthetic_n = 0;
  int replications = 1;
  Eigen::Index n_test = 50000;
  std::uint64_t master_seed = 0;
  std::vector<OutputKind> outputs{OutputKind::Utility};
  TrainingMode mode = TrainingMode::Sample;
  RiskMethod risk_method = RiskMethod::MonteCarlo;
  Eigen::Index optimum_samples = 100000;

  void validate() const;
  Population real_population() const;
  SynthesisConfig synthesis(std::size_t estimator, Eigen::Index n) const;
};

/// Metric names one output kind contributes per (estimator, class).
std::vector<std::string> metric_names(OutputKind kind);

struct ResultRow {
  std::string scenario;
  std::string param;
  Eigen::Index n = 0;
  int replication = 0;
  std::string estimator;
  std::string model_class;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  /// Empty on success, otherwise the error code name.
  std::string error;
};

struct RunOptions {
  int workers = 1;
};

/// Worker count: SYNDATUM_WORKERS when set, else `requested` (at least 1).
int resolve_workers(int requested);

/// Original sample for replication seed `seed`.
Dataset draw_original(const ScenarioConfig& config, Eigen::Index n, const SeedSpec& seed);

/// Seed of replication `replication` at sample size n.
SeedSpec replication_seed(const ScenarioConfig& config, Eigen::Index n, int replication);

std::vector<ResultRow> run_scenario(const ScenarioConfig& config, const RunOptions& options = {});
std::vector<ResultRow> run_scenarios(const std::vector<ScenarioConfig>& configs, const RunOptions& options = {});

struct BuiltinOptions {
  /// Divides n_grid, replications and n_test; must be a power of 2.
  int scale = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
};

const std::vector<std::string>& builtin_names();
/// The scenarios behind a builtin (empty for fidelity-fig2, which is not a sweep).
std::vector<ScenarioConfig> builtin_scenarios(const std::string& name, const BuiltinOptions& options = {});
std::vector<ResultRow> run_builtin(const std::string& name, const BuiltinOptions& options = {},
                                   const RunOptions& run = {});

struct SummaryRow {
  std::string scenario;
  std::string param;
  Eigen::Index n = 0;
  std::string estimator;
  std::string model_class;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int count = 0;
  int errors = 0;
};

/// Mean and normal-approximation 95% interval per (param, n, estimator, class, metric).
/// Groups with no successful rows are dropped with a warning on `warnings`.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, std::ostream* warnings = nullptr);

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_json(std::ostream& out, const std::vector<SummaryRow>& summary);

DensityModel parse_density(const std::string& spec);
NoiseModel parse_noise(const std::string& spec);
ScenarioConfig scenario_from_section(const std::string& name, const ConfigFile::Section& section);
std::vector<ScenarioConfig> load_scenarios(const std::string& path);

}  // namespace syndatum
