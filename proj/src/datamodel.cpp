#include "syndatum/datamodel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace syndatum {

std::string_view to_string(TaskKind task) noexcept {
  return task == TaskKind::Regression ? "regression" : "classification";
}

TaskKind parse_task(std::string_view text) {
  if (text == "regression" || text == "reg") return TaskKind::Regression;
  if (text == "classification" || text == "cls") return TaskKind::Classification;
  throw Error(ErrorCode::ConfigError, "unknown task '" + std::string(text) + "'");
}

Dataset make_dataset(Matrix features, Vector responses, TaskKind task) {
  if (features.rows() != responses.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features have " + std::to_string(features.rows()) +
                                                  " rows but responses have length " +
                                                  std::to_string(responses.size()));
  }
  if (!features.allFinite()) throw Error(ErrorCode::NonFiniteValue, "features contain a non-finite entry");
  if (!responses.allFinite()) throw Error(ErrorCode::NonFiniteValue, "responses contain a non-finite entry");
  if (task == TaskKind::Classification) {
    for (Eigen::Index i = 0; i < responses.size(); ++i) {
      if (responses[i] != 1.0 && responses[i] != -1.0) {
        throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(responses[i]) + " at row " +
                                                 std::to_string(i) + " is not -1 or +1");
      }
    }
  }
  Dataset d;
  d.features_ = std::move(features);
  d.responses_ = std::move(responses);
  d.task_ = task;
  return d;
}

double NoiseModel::half_width() const { return std::sqrt(3.0 * variance); }

Vector sample_noise(const NoiseModel& model, Eigen::Index n, const SeedSpec& seed) {
  if (!(model.variance >= 0.0)) throw Error(ErrorCode::InvalidVariance, "noise variance must be >= 0");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "noise sample size must be >= 1");
  Vector out = Vector::Zero(n);
  if (model.variance == 0.0) return out;
  Rng rng(seed);
  if (model.distribution == NoiseDistribution::Gaussian) {
    const double sd = std::sqrt(model.variance);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = sd * rng.normal();
  } else {
    const double h = model.half_width();
    for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.uniform(-h, h);
  }
  return out;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Eigen::Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const bool labels = data.task() == TaskKind::Classification;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << data.features()(i, j) << ',';
    if (labels) {
      out << (data.responses()[i] > 0 ? "1" : "-1");
    } else {
      out << data.responses()[i];
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_csv(out, data);
}

Dataset read_csv(std::istream& in, TaskKind task) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "y") {
    throw Error(ErrorCode::IoError, "CSV header must be x1,...,xp,y");
  }
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "bad number '" + cell + "' in CSV row " + std::to_string(rows + 1));
      }
      ++cols;
    }
    if (cols != p + 1) throw Error(ErrorCode::DimensionMismatch, "CSV row " + std::to_string(rows + 1) + " has wrong width");
    ++rows;
  }
  Matrix x(rows, p);
  Vector y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = values[static_cast<std::size_t>(i * (p + 1) + j)];
    y[i] = values[static_cast<std::size_t>(i * (p + 1) + p)];
  }
  return make_dataset(std::move(x), std::move(y), task);
}

Dataset read_csv(const std::string& path, TaskKind task) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_csv(in, task);
}

}  // namespace syndatum
