#pragma once

#include <json.hpp>
#include <string>

#include "emi/model.hpp"

namespace emi {

/// Self-describing JSON document: format version, tau0, the quantile fit,
/// both spline surfaces with knots and fallback tables, the configuration
/// snapshot and the fit report. Doubles round-trip losslessly.
nlohmann::json model_to_json(const EmiModel& model);
EmiModel model_from_json(const nlohmann::json& doc);

void save_model(const EmiModel& model, const std::string& path);
EmiModel load_model(const std::string& path);

}  // namespace emi
