#pragma once

#include "modelcard/ingest.hpp"
#include "modelcard/metrics.hpp"
#include "modelcard/uncertainty.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace modelcard {

enum class ChartKind { ConfusionHeatmap, TrainingCurves, CiErrorBars, MetricsTable };

std::string_view to_string(ChartKind kind) noexcept;

/// Deterministic file name inside the asset folder: cm.svg, curves.svg, ci.svg, table.svg.
std::string_view chart_file_name(ChartKind kind) noexcept;

struct Chart {
    ChartKind kind = ChartKind::ConfusionHeatmap;
    std::string svg;
    int width_px = 640;
    int height_px = 480;
};

inline constexpr int kChartWidth = 640;
inline constexpr int kChartHeight = 480;

/// Monochrome ramp: 0 -> lightest, max -> darkest. Returns "#rrggbb".
std::string heatmap_fill(std::uint64_t count, std::uint64_t max_count);

/// Throws EmptyMatrix.
Chart render_confusion_heatmap(const ConfusionMatrix& cm, std::string_view title = "Confusion matrix");

/// Loss and accuracy panels, train and validation series each. Throws TooFewEpochs.
Chart render_training_curves(const std::vector<EpochRecord>& history,
                             std::string_view title = "Training and validation");

Chart render_ci_errorbars(const CIReport& report, const MetricSet& metrics, const ClassLabelMap& labels,
                          std::string_view title = "");

Chart render_metrics_table(const MetricSet& metrics, const CIReport& report, const ClassLabelMap& labels,
                           std::string_view title = "Performance metrics");

/// "95" for 0.95, "99.5" for 0.995.
std::string percent_label(double level);

} // namespace modelcard
