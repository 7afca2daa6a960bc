#pragma once

#include <json.hpp>

#include "syndatum/bounds.hpp"
#include "syndatum/densities.hpp"
#include "syndatum/metrics.hpp"

namespace syndatum {

/// Non-finite doubles become the strings "inf", "-inf" or "nan".
nlohmann::json json_number(double v);

nlohmann::json to_json(const FidelityCertificate& cert);
nlohmann::json to_json(const RiskEstimate& r);
nlohmann::json to_json(const UtilityReport& r);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const RegressionBoundReport& r);
nlohmann::json to_json(const ClassificationBoundReport& r);
nlohmann::json to_json(const LRBoundReport& r);
nlohmann::json to_json(const AssumptionCheck& r);

}  // namespace syndatum
