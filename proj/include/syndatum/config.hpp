#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "syndatum/datamodel.hpp"

namespace syndatum {

/// One "name key=value key=v1,v2 flag" item, as used for density, truth and
/// estimator specifications inside config values.
struct SpecItem {
  std::string name;
  std::vector<std::string> flags;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  bool has_flag(const std::string& flag) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  std::optional<long long> optional_integer(const std::string& key) const;
  Vector vector(const std::string& key) const;
};

SpecItem parse_spec_item(const std::string& text);

/// Splits on commas, trimming whitespace and dropping empty pieces.
std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::string trim(const std::string& text);
double parse_number(const std::string& text);
Vector parse_vector(const std::string& text);

/// Flat key-value file with [section] headers. '#' and ';' start comments.
class ConfigFile {
 public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::string& path);

  const std::vector<std::string>& section_names() const noexcept { return order_; }
  const Section& section(const std::string& name) const;
  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

 private:
  std::map<std::string, Section> sections_;
  std::vector<std::string> order_;
};

}  // namespace syndatum
