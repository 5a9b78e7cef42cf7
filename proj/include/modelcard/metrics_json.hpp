#pragma once

#include "modelcard/metrics.hpp"
#include "modelcard/uncertainty.hpp"

#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace modelcard {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kMetricsSchemaId = "modelcard.metrics/1";

/// Metrics document with a fixed key order (see docs/metrics.schema.json).
/// `cis` may be null when no uncertainty report exists.
ordered_json metrics_document(const ConfusionMatrix& cm, const MetricSet& metrics, const CIReport* cis);

/// Point estimates keyed by metric id ("accuracy", "micro_f1", "f1_0", ...),
/// read back from a metrics document.
std::map<std::string, double> metric_estimates(const nlohmann::json& document);

} // namespace modelcard
