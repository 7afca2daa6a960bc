#include "syndatum/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cctype>
#include <fstream>
#include <sstream>

namespace syndatum {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, sep)) {
    piece = trim(piece);
    if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  // Simple fractions like 5/6 are accepted for convenience.
  if (const auto slash = t.find('/'); slash != std::string::npos && slash > 0) {
    return parse_number(t.substr(0, slash)) / parse_number(t.substr(slash + 1));
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "not a number: '" + t + "'");
  }
  if (used != t.size()) throw Error(ErrorCode::ConfigError, "not a number: '" + t + "'");
  return v;
}

Vector parse_vector(const std::string& text) {
  const auto parts = split_list(text);
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_number(parts[i]);
  return v;
}

SpecItem parse_spec_item(const std::string& text) {
  std::stringstream ss(text);
  SpecItem item;
  std::string token;
  if (!(ss >> item.name)) throw Error(ErrorCode::ConfigError, "empty specification");
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      item.flags.push_back(token);
    } else {
      item.params[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  return item;
}

bool SpecItem::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double SpecItem::number(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorCode::ConfigError, "'" + name + "' is missing parameter '" + key + "'");
  return parse_number(it->second);
}

double SpecItem::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long SpecItem::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw Error(ErrorCode::ConfigError, "parameter '" + key + "' must be an integer");
  return static_cast<long long>(v);
}

std::optional<long long> SpecItem::optional_integer(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

Vector SpecItem::vector(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorCode::ConfigError, "'" + name + "' is missing parameter '" + key + "'");
  return parse_vector(it->second);
}

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::string current = "scenario";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ConfigError, "bad section header on line " + std::to_string(lineno));
      current = trim(line.substr(1, line.size() - 2));
      if (!cfg.sections_.count(current)) cfg.order_.push_back(current);
      cfg.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "expected key = value on line " + std::to_string(lineno));
    if (!cfg.sections_.count(current)) cfg.order_.push_back(current);
    cfg.sections_[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
  return parse(in);
}

const ConfigFile::Section& ConfigFile::section(const std::string& name) const {
  const auto it = sections_.find(name);
  if (it == sections_.end()) throw Error(ErrorCode::ConfigError, "missing section [" + name + "]");
  return it->second;
}

}  // namespace syndatum
