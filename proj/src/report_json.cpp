#include "syndatum/report_json.hpp"

#include <cmath>

namespace syndatum {

using nlohmann::json;

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
  return a;
}

}  // namespace

json to_json(const FidelityCertificate& cert) {
  json grid = json::array();
  for (const auto& g : cert.grid) {
    grid.push_back({{"C", json_number(g.threshold)}, {"tail", json_number(g.tail)}, {"bound", json_number(g.bound)}});
  }
  return {{"d", json_number(cert.d)}, {"V", json_number(cert.V)}, {"grid", grid}};
}

json to_json(const RiskEstimate& r) {
  return {{"value", json_number(r.value)},
          {"std_error", json_number(r.std_error)},
          {"method", std::string(to_string(r.method))},
          {"loss", std::string(to_string(r.loss))},
          {"n_test", r.n_test}};
}

json to_json(const UtilityReport& r) {
  return {{"task", std::string(to_string(r.task))},
          {"risk_synthetic", to_json(r.risk_synthetic)},
          {"risk_original", to_json(r.risk_original)},
          {"utility", json_number(r.utility)},
          {"combined_std_error", json_number(r.combined_std_error)}};
}

json to_json(const ComparisonReport& r) {
  static const char* labels[4] = {"original_class1", "original_class2", "synthetic_class1", "synthetic_class2"};
  json optima = json::object();
  for (int k = 0; k < 4; ++k) optima[labels[k]] = {{"coefficients", vec(r.coefficients[k])}, {"risk", to_json(r.risks[k])}};
  return {{"optima", optima},
          {"original_gap", json_number(r.original_gap)},
          {"synthetic_gap", json_number(r.synthetic_gap)},
          {"original_std_error", json_number(r.original_std_error)},
          {"synthetic_std_error", json_number(r.synthetic_std_error)},
          {"original_sign", r.original_sign},
          {"synthetic_sign", r.synthetic_sign},
          {"consistent", r.consistent},
          {"indeterminate", r.indeterminate()}};
}

json to_json(const RegressionBoundReport& r) {
  return {{"est_err_original", json_number(r.est_err_original)},
          {"est_err_synthetic", json_number(r.est_err_synthetic)},
          {"chi2", json_number(r.chi2)},
          {"M", json_number(r.M)},
          {"upsilon1", json_number(r.upsilon1)},
          {"upsilon2", json_number(r.upsilon2)},
          {"phi_mu_hat", json_number(r.phi_mu_hat)},
          {"total", json_number(r.total)},
          {"infinite", r.infinite}};
}

json to_json(const ClassificationBoundReport& r) {
  return {{"est_err_original", json_number(r.est_err_original)},
          {"est_err_synthetic", json_number(r.est_err_synthetic)},
          {"chi2", json_number(r.chi2)},
          {"upsilon3", json_number(r.upsilon3)},
          {"eta_l2_gap", json_number(r.eta_l2_gap)},
          {"c_terms", json_number(r.c_terms)},
          {"phi_plugin", json_number(r.phi_plugin)},
          {"total", json_number(r.total)},
          {"infinite", r.infinite}};
}

json to_json(const LRBoundReport& r) {
  return {{"t1", json_number(r.t1)},
          {"t2", json_number(r.t2)},
          {"t3", json_number(r.t3)},
          {"chi2_term", json_number(r.chi2_term)},
          {"cross_term", json_number(r.cross_term)},
          {"M_LR", json_number(r.M_LR)},
          {"total", json_number(r.total)}};
}

json to_json(const AssumptionCheck& r) {
  return {{"d", json_number(r.d)},
          {"V", json_number(r.V)},
          {"U", json_number(r.U)},
          {"C_dVU", json_number(r.C_dVU)},
          {"K_dV", json_number(r.K_dV)},
          {"lhs_reg", json_number(r.lhs_reg)},
          {"rhs_reg", json_number(r.rhs_reg)},
          {"lhs_cls", json_number(r.lhs_cls)},
          {"rhs_cls", json_number(r.rhs_cls)},
          {"holds_reg", r.holds_reg},
          {"holds_cls", r.holds_cls}};
}

}  // namespace syndatum
